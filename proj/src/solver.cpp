#include "cfgames/solver.hpp"

#include "cfgames/errors.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_set>

#include <omp.h>

namespace cfgames {

void Deadline::check() const {
    if (expired()) throw TimeoutError("deadline exceeded");
}

std::string_view to_string(Engine e) {
    switch (e) {
    case Engine::Naive: return "naive";
    case Engine::NaiveParallel: return "naive-parallel";
    case Engine::Worklist: return "worklist";
    }
    return "?";
}

std::optional<Engine> engine_from_string(std::string_view name) {
    if (name == "naive") return Engine::Naive;
    if (name == "naive-parallel") return Engine::NaiveParallel;
    if (name == "worklist") return Engine::Worklist;
    return std::nullopt;
}

EquationSystem build_system(const GameGrammar& grammar, const Nfa& nfa) {
    if (auto problems = validate(grammar); !problems.empty()) throw ValidationError(problems.front());
    EquationSystem sys;
    sys.dim = nfa.num_states();
    for (const auto& t : grammar.terminals()) {
        auto letter = nfa.letter_index(t);
        if (!letter) throw ValidationError("terminal '" + t + "' is not in the automaton alphabet");
        sys.terminal_boxes.push_back(letter_box(nfa, *letter));
    }
    const auto n = grammar.num_nonterminals();
    sys.equations.resize(n);
    sys.depends_on.resize(n);
    sys.dependents.resize(n);
    for (NonterminalId x = 0; x < n; ++x) {
        auto& eq = sys.equations[x];
        eq.combiner = grammar.owner(x) == Player::Prover ? Combiner::And : Combiner::Or;
        for (RuleId r : grammar.rules_for(x)) {
            eq.rules.push_back(r);
            std::vector<EquationSystem::Term> terms;
            for (Symbol s : grammar.rule(r).rhs) {
                if (s.is_terminal()) {
                    terms.push_back({true, sys.terminal_boxes[s.index], 0});
                } else {
                    terms.push_back({false, Box{}, s.index});
                    sys.depends_on[x].push_back(s.index);
                }
            }
            eq.rhs.push_back(std::move(terms));
        }
        auto& deps = sys.depends_on[x];
        std::sort(deps.begin(), deps.end());
        deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
        for (NonterminalId y : deps) sys.dependents[y].push_back(x);
    }
    return sys;
}

namespace {

// Left fold of compose over a term sequence; runs of boxes are multiplied
// directly before they meet a formula.
template <class Lookup>
Formula eval_terms(std::size_t dim, std::span<const EquationSystem::Term> terms, Lookup&& lookup) {
    Box pending = identity_box(dim);
    std::optional<Formula> acc;
    for (const auto& t : terms) {
        if (t.is_box) {
            pending = compose_box(pending, t.box);
            continue;
        }
        const Formula& value = lookup(static_cast<std::size_t>(&t - terms.data()), t.nonterminal);
        if (value.is_false()) return Formula::bottom();
        if (!acc)
            acc = prefix_compose(pending, value);
        else
            acc = compose(compose(*acc, Formula::atom(pending)), value);
        pending = identity_box(dim);
    }
    if (!acc) return Formula::atom(pending);
    if (pending != identity_box(dim)) return compose(*acc, Formula::atom(pending));
    return *acc;
}

std::vector<EquationSystem::Term> terms_of(const Solution& solution, std::span<const Symbol> form) {
    std::vector<EquationSystem::Term> terms;
    terms.reserve(form.size());
    for (Symbol s : form) {
        if (s.is_terminal()) {
            if (s.index >= solution.terminal_boxes.size()) throw PreconditionError("unknown terminal in form");
            terms.push_back({true, solution.terminal_boxes[s.index], 0});
        } else {
            if (s.index >= solution.final.size()) throw PreconditionError("unknown non-terminal in form");
            terms.push_back({false, Box{}, s.index});
        }
    }
    return terms;
}

using Assignment = std::vector<Formula>;

void note_boxes(const Formula& f, std::unordered_set<Box, BoxHash>& seen) {
    for (const auto& c : f.clauses())
        for (const auto& b : c) seen.insert(b);
}

// Heuristic cap on the number of rounds: |N| * 2^(distinct boxes). Only
// meaningful while the exponent is small.
void check_round_cap(std::size_t rounds, std::size_t nonterminals, std::size_t distinct_boxes) {
    if (distinct_boxes >= 40) return;
    const std::size_t cap = std::max<std::size_t>(nonterminals, 1) << distinct_boxes;
    if (rounds > cap + 1) {
        std::ostringstream msg;
        msg << "Kleene iteration exceeded its round bound: rounds=" << rounds << " nonterminals=" << nonterminals
            << " distinct_boxes=" << distinct_boxes;
        throw InvariantError(msg.str());
    }
}

Solution finish(const EquationSystem& system, Solution sol, Engine engine, std::size_t distinct,
                std::chrono::steady_clock::time_point start) {
    sol.terminal_boxes = system.terminal_boxes;
    sol.dim = system.dim;
    sol.stats.engine = engine;
    sol.stats.distinct_boxes = distinct;
    for (const auto& f : sol.final) sol.stats.clause_counts.push_back(f.size());
    sol.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

template <bool Parallel>
Solution kleene_rounds(const EquationSystem& system, const SolveOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = system.equations.size();
    Solution sol;
    Assignment current(n, Formula::bottom());
    if (options.keep_snapshots) sol.snapshots.push_back(current);
    std::unordered_set<Box, BoxHash> seen;

    while (true) {
        options.deadline.check();
        Assignment next(n);
        if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
            for (std::ptrdiff_t x = 0; x < static_cast<std::ptrdiff_t>(n); ++x)
                next[static_cast<std::size_t>(x)] = evaluate_equation(system, static_cast<NonterminalId>(x), current);
        } else {
            for (NonterminalId x = 0; x < n; ++x) next[x] = evaluate_equation(system, x, current);
        }
        sol.stats.evaluations += n;
        ++sol.rounds;
        bool stable = true;
        for (std::size_t x = 0; x < n; ++x) {
            if (next[x] != current[x]) {
                stable = false;
                ++sol.stats.updates;
                note_boxes(next[x], seen);
            }
        }
        if (options.keep_snapshots) sol.snapshots.push_back(next);
        current = std::move(next);
        if (stable) break;
        check_round_cap(sol.rounds, n, seen.size());
    }
    sol.final = std::move(current);
    sol.stats.rounds = sol.rounds;
    return finish(system, std::move(sol), Parallel ? Engine::NaiveParallel : Engine::Naive, seen.size(), start);
}

} // namespace

Formula evaluate_equation(const EquationSystem& system, NonterminalId x, const std::vector<Formula>& sigma) {
    const auto& eq = system.equations.at(x);
    auto lookup = [&](std::size_t, NonterminalId y) -> const Formula& { return sigma[y]; };
    Formula acc = eq.combiner == Combiner::And ? Formula::top() : Formula::bottom();
    for (const auto& rhs : eq.rhs) {
        Formula value = eval_terms(system.dim, rhs, lookup);
        acc = eq.combiner == Combiner::And ? conj(acc, value) : disj(acc, value);
    }
    return acc;
}

Solution kleene_naive(const EquationSystem& system, const SolveOptions& options) {
    return kleene_rounds<false>(system, options);
}

Solution kleene_naive_parallel(const EquationSystem& system, const SolveOptions& options) {
    return kleene_rounds<true>(system, options);
}

Solution kleene_worklist(const EquationSystem& system, const SolveOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = system.equations.size();
    Solution sol;
    Assignment sigma(n, Formula::bottom());
    std::deque<NonterminalId> queue;
    std::vector<bool> queued(n, true);
    for (NonterminalId x = 0; x < n; ++x) queue.push_back(x);
    std::unordered_set<Box, BoxHash> seen;

    while (!queue.empty()) {
        options.deadline.check();
        const NonterminalId x = queue.front();
        queue.pop_front();
        queued[x] = false;
        Formula value = evaluate_equation(system, x, sigma);
        ++sol.stats.evaluations;
        if (value == sigma[x]) continue;
        ++sol.stats.updates;
        note_boxes(value, seen);
        sigma[x] = std::move(value);
        for (NonterminalId y : system.dependents[x]) {
            if (!queued[y]) {
                queued[y] = true;
                queue.push_back(y);
            }
        }
    }
    sol.final = std::move(sigma);
    return finish(system, std::move(sol), Engine::Worklist, seen.size(), start);
}

Solution solve(const EquationSystem& system, Engine engine, const SolveOptions& options) {
    switch (engine) {
    case Engine::Naive: return kleene_naive(system, options);
    case Engine::NaiveParallel: return kleene_naive_parallel(system, options);
    case Engine::Worklist: return kleene_worklist(system, options);
    }
    throw PreconditionError("unknown engine");
}

Formula eval_sentential(const Solution& solution, std::span<const Symbol> form) {
    const auto terms = terms_of(solution, form);
    return eval_terms(solution.dim, terms,
                      [&](std::size_t, NonterminalId y) -> const Formula& { return solution.final[y]; });
}

Formula eval_sentential_at(const Solution& solution, std::span<const Symbol> form, std::size_t round) {
    const auto terms = terms_of(solution, form);
    return eval_terms(solution.dim, terms,
                      [&](std::size_t, NonterminalId y) -> const Formula& { return approximant(solution, y, round); });
}

Formula eval_sentential_levels(const Solution& solution, std::span<const Symbol> form,
                               std::span<const std::size_t> levels) {
    if (levels.size() != form.size()) throw PreconditionError("level sequence length differs from form length");
    const auto terms = terms_of(solution, form);
    return eval_terms(solution.dim, terms, [&](std::size_t pos, NonterminalId y) -> const Formula& {
        return approximant(solution, y, levels[pos]);
    });
}

bool refuter_wins(const Solution& solution, std::span<const Symbol> form, const BoxPredicate& pred) {
    return is_rejecting(eval_sentential(solution, form), pred);
}

bool prover_forces_infinite(const Solution& solution, std::span<const Symbol> form) {
    return eval_sentential(solution, form).is_false();
}

const Formula& approximant(const Solution& solution, NonterminalId x, std::size_t round) {
    if (!solution.has_snapshots()) throw PreconditionError("solution has no Kleene snapshots (worklist engine)");
    if (round >= solution.snapshots.size()) throw PreconditionError("approximant round out of range");
    if (x >= solution.final.size()) throw PreconditionError("unknown non-terminal");
    return solution.snapshots[round][x];
}

std::optional<std::size_t> box_entry_round(const Solution& solution, NonterminalId x, const Box& box) {
    if (!solution.has_snapshots()) throw PreconditionError("solution has no Kleene snapshots (worklist engine)");
    for (std::size_t i = 0; i < solution.snapshots.size(); ++i)
        for (const auto& c : solution.snapshots[i].at(x).clauses())
            if (std::binary_search(c.begin(), c.end(), box)) return i;
    return std::nullopt;
}

} // namespace cfgames
