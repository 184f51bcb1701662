#include "cfgames/strategy.hpp"

#include "cfgames/errors.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace cfgames {

namespace {

Box terminal_word_box(const Solution& solution, std::span<const Symbol> word) {
    Box acc = identity_box(solution.dim);
    for (Symbol s : word) acc = compose_box(acc, solution.terminal_boxes.at(s.index));
    return acc;
}

std::size_t top_round(const Solution& solution) {
    if (!solution.has_snapshots()) throw PreconditionError("refuter strategies need Kleene snapshots (naive engine)");
    return solution.snapshots.size() - 1;
}

// Levels of w eta beta: those of w and beta are kept, eta gets `level`.
std::vector<std::size_t> splice_levels(std::span<const std::size_t> levels, std::size_t pos, std::size_t eta_len,
                                       std::size_t level) {
    std::vector<std::size_t> out(levels.begin(), levels.begin() + static_cast<std::ptrdiff_t>(pos));
    out.insert(out.end(), eta_len, level);
    out.insert(out.end(), levels.begin() + static_cast<std::ptrdiff_t>(pos) + 1, levels.end());
    return out;
}

} // namespace

PositionTriple make_triple(const Arena& arena, std::span<const Symbol> form) {
    auto split = leftmost_split(form);
    if (!split) throw PreconditionError("terminal words have no triple");
    return PositionTriple{terminal_word_box(arena.solution, split->prefix), split->head,
                          eval_sentential(arena.solution, split->suffix), SententialForm(form.begin(), form.end())};
}

Formula level_formula(const Solution& solution, std::span<const Symbol> form, std::span<const std::size_t> levels) {
    return eval_sentential_levels(solution, form, levels);
}

RuleId prover_move(const Arena& arena, const PositionTriple& triple) {
    if (arena.grammar.owner(triple.head) != Player::Prover) throw PreconditionError("position is not prover-owned");
    auto value = [&](std::span<const Symbol> eta) {
        return prefix_compose(triple.prefix_box, compose(eval_sentential(arena.solution, eta), triple.suffix_formula));
    };
    for (RuleId r : arena.grammar.rules_for(triple.head))
        if (!is_rejecting(value(arena.grammar.rule(r).rhs), arena.pred)) return r;
    throw PreconditionError("position is already won by refuter");
}

RuleId prover_move(const Arena& arena, std::span<const Symbol> form) {
    auto split = leftmost_split(form);
    if (!split || arena.grammar.owner(split->head) != Player::Prover)
        throw PreconditionError("position is not prover-owned");
    if (is_rejecting(eval_sentential(arena.solution, form), arena.pred))
        throw PreconditionError("position is already won by refuter");
    for (RuleId r : arena.grammar.rules_for(split->head)) {
        auto next = derive(arena.grammar, form, r);
        if (!is_rejecting(eval_sentential(arena.solution, next), arena.pred)) return r;
    }
    throw InvariantError("no prover rule keeps the position non-rejecting");
}

RefuterStrategyState refuter_init(const Arena& arena, std::span<const Symbol> form) {
    const std::size_t top = top_round(arena.solution);
    const Formula value = eval_sentential(arena.solution, form);
    if (!is_rejecting(value, arena.pred)) throw PreconditionError("refuter does not win from this position");

    std::vector<Formula> rounds;
    for (std::size_t i = 0; i <= top; ++i) rounds.push_back(eval_sentential_at(arena.solution, form, i));
    auto rank = [&](const Box& b) {
        for (std::size_t i = 0; i < rounds.size(); ++i)
            for (const auto& c : rounds[i].clauses())
                if (std::binary_search(c.begin(), c.end(), b)) return i;
        return rounds.size();
    };
    auto choice = pick_choice(value, arena.pred, rank);
    if (!choice) throw InvariantError("rejecting formula without a rejecting choice function");

    RefuterStrategyState state;
    state.form.assign(form.begin(), form.end());
    for (Symbol s : form) state.levels.push_back(s.is_nonterminal() ? top : 0);
    state.initial_image = choice->image();
    state.choice = std::move(*choice);
    return state;
}

RefuterStep refuter_move(const Arena& arena, const RefuterStrategyState& state) {
    auto split = leftmost_split(state.form);
    if (!split || arena.grammar.owner(split->head) != Player::Refuter)
        throw PreconditionError("position is not refuter-owned");
    const std::size_t level = state.levels.at(split->position);
    const auto image = state.choice.image();
    for (std::size_t j = 0; j < level; ++j) {
        for (RuleId r : arena.grammar.rules_for(split->head)) {
            const auto& eta = arena.grammar.rule(r).rhs;
            auto levels = splice_levels(state.levels, split->position, eta.size(), j);
            auto next = derive(arena.grammar, state.form, r);
            auto refined = choice_within(level_formula(arena.solution, next, levels), image);
            if (!refined) continue;
            RefuterStrategyState out{std::move(next), std::move(levels), std::move(*refined), state.initial_image};
            return {r, std::move(out)};
        }
    }
    std::ostringstream msg;
    msg << "no refuter rule refines the choice function at " << arena.grammar.render(state.form) << " (level "
        << level << ")";
    throw InvariantError(msg.str());
}

RefuterStrategyState refuter_observe(const Arena& arena, const RefuterStrategyState& state, RuleId rule) {
    auto split = leftmost_split(state.form);
    if (!split || arena.grammar.owner(split->head) != Player::Prover)
        throw PreconditionError("position is not prover-owned");
    const std::size_t level = state.levels.at(split->position);
    if (level == 0) throw InvariantError("non-terminal at level 0 under a choice function");
    const auto& eta = arena.grammar.rule(rule).rhs;
    auto next = derive(arena.grammar, state.form, rule);
    auto levels = splice_levels(state.levels, split->position, eta.size(), level - 1);
    const Formula target = level_formula(arena.solution, next, levels);
    if (!implies(state.choice.formula, target))
        throw InvariantError("level formula of a prover move is not implied by the current one");
    return RefuterStrategyState{std::move(next), std::move(levels), refine_choice(state.choice, target),
                                state.initial_image};
}

// ---------------------------------------------------------------------------

std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::RefuterWins: return "refuter-wins";
    case Outcome::ProverWins: return "prover-wins";
    case Outcome::CapReached: return "cap-reached";
    }
    return "?";
}

PlaySession::PlaySession(const Arena& arena, SententialForm start, std::size_t step_cap)
    : arena_(arena), form_(std::move(start)), cap_(step_cap) {
    transcript_.start = form_;
}

bool PlaySession::finished() const { return is_terminal_word(form_) || steps() >= cap_; }

std::vector<RuleId> PlaySession::legal_rules() const {
    auto split = leftmost_split(form_);
    if (!split || finished()) return {};
    auto rules = arena_.grammar.rules_for(split->head);
    return {rules.begin(), rules.end()};
}

bool PlaySession::is_legal(RuleId rule) const {
    auto legal = legal_rules();
    return std::find(legal.begin(), legal.end(), rule) != legal.end();
}

void PlaySession::apply(RuleId rule) {
    if (finished()) throw PreconditionError("the play is over");
    if (!is_legal(rule)) throw PreconditionError("rule " + std::to_string(rule) + " is not legal here");
    transcript_.steps.push_back({form_, turn(), rule});
    form_ = derive(arena_.grammar, form_, rule);
}

Transcript PlaySession::transcript() const {
    Transcript t = transcript_;
    t.final_form = form_;
    if (is_terminal_word(form_)) {
        t.outcome = arena_.pred(terminal_word_box(arena_.solution, form_)) ? Outcome::RefuterWins : Outcome::ProverWins;
    } else {
        t.outcome = Outcome::CapReached;
        t.prover_forces_infinite = prover_forces_infinite(arena_.solution, form_);
    }
    return t;
}

Transcript play(PlaySession& session, Agent& refuter, Agent& prover) {
    while (!session.finished()) {
        Agent& mover = session.turn() == Player::Refuter ? refuter : prover;
        const RuleId rule = mover.choose(session);
        const SententialForm before = session.form();
        session.apply(rule);
        refuter.observe(session, before, rule);
        prover.observe(session, before, rule);
    }
    return session.transcript();
}

void SynthesizedRefuter::sync(const PlaySession& session) {
    if (state_ && state_->form == session.form()) return;
    state_.reset();
    const Arena& arena = session.arena();
    if (refuter_wins(arena.solution, session.form(), arena.pred)) state_ = refuter_init(arena, session.form());
}

RuleId SynthesizedRefuter::choose(const PlaySession& session) {
    sync(session);
    planned_.reset();
    planned_state_.reset();
    if (state_) {
        auto step = refuter_move(session.arena(), *state_);
        planned_ = step.rule;
        planned_state_ = std::move(step.state);
        return *planned_;
    }
    // Outside the winning region any legal rule will do.
    return session.legal_rules().front();
}

void SynthesizedRefuter::observe(const PlaySession& session, const SententialForm& before, RuleId rule) {
    if (!state_ || state_->form != before) {
        state_.reset();
        planned_.reset();
        const Arena& arena = session.arena();
        if (!refuter_wins(arena.solution, before, arena.pred)) return;
        state_ = refuter_init(arena, before);
    }
    if (planned_ && *planned_ == rule && planned_state_) {
        state_ = std::move(planned_state_);
    } else if (owner_of(session.arena().grammar, before) == Player::Prover) {
        state_ = refuter_observe(session.arena(), *state_, rule);
    } else {
        state_.reset();
    }
    planned_.reset();
    planned_state_.reset();
}

RuleId SynthesizedProver::choose(const PlaySession& session) {
    const Arena& arena = session.arena();
    if (!refuter_wins(arena.solution, session.form(), arena.pred)) return prover_move(arena, session.form());
    return session.legal_rules().front();
}

RuleId RandomAgent::choose(const PlaySession& session) {
    auto legal = session.legal_rules();
    if (legal.empty()) throw PreconditionError("no legal move");
    return legal[uniform_below(rng_, legal.size())];
}

RuleId ScriptedAgent::choose(const PlaySession&) {
    if (next_ >= script_.size()) throw PreconditionError("scripted agent ran out of moves");
    return script_[next_++];
}

RuleId InteractiveAgent::choose(const PlaySession& session) {
    const auto& g = session.arena().grammar;
    while (true) {
        out_ << "position: " << g.render(session.form()) << "\nyour move (" << to_string(session.turn()) << "):\n";
        for (RuleId r : session.legal_rules()) out_ << "  [" << r << "] " << g.render_rule(r) << '\n';
        out_ << "> " << std::flush;
        std::string line;
        if (!std::getline(in_, line)) throw GameError("input closed during an interactive play");
        std::istringstream parse(line);
        long long choice = -1;
        std::string rest;
        if (parse >> choice && !(parse >> rest) && choice >= 0 && session.is_legal(static_cast<RuleId>(choice)))
            return static_cast<RuleId>(choice);
        out_ << "illegal move, pick one of the listed indices\n";
    }
}

void InteractiveAgent::observe(const PlaySession& session, const SententialForm&, RuleId rule) {
    out_ << "played " << session.arena().grammar.render_rule(rule) << '\n';
}

// ---------------------------------------------------------------------------

namespace {

void check_leaf(const Arena& arena, const SententialForm& word, const std::vector<Box>& image, VerifyReport& report) {
    ++report.branches;
    const Box box = terminal_word_box(arena.solution, word);
    if (!arena.pred(box))
        report.failures.push_back("word " + arena.grammar.render(word) + " is not rejecting");
    else if (!image.empty() && !std::binary_search(image.begin(), image.end(), box))
        report.failures.push_back("word " + arena.grammar.render(word) + " is outside the initial choice image");
    if (report.words.size() < 64 && std::find(report.words.begin(), report.words.end(), word) == report.words.end())
        report.words.push_back(word);
}

struct TreeNode {
    SententialForm form;
    std::size_t depth;
    std::optional<RuleId> move; // refuter's move at this node
    std::size_t height = 0;
    std::size_t parent;
};

} // namespace

VerifyReport verify_refuter_exhaustive(const Arena& arena, std::span<const Symbol> start, std::size_t node_budget) {
    VerifyReport report;
    auto init = refuter_init(arena, start);
    const auto image = init.initial_image;
    std::vector<std::pair<RefuterStrategyState, std::size_t>> stack;
    stack.emplace_back(std::move(init), 0);
    while (!stack.empty()) {
        auto [state, depth] = std::move(stack.back());
        stack.pop_back();
        if (++report.nodes > node_budget) {
            report.failures.push_back("node budget exhausted");
            report.all_good = false;
            return report;
        }
        report.max_depth = std::max(report.max_depth, depth);
        auto split = leftmost_split(state.form);
        if (!split) {
            check_leaf(arena, state.form, image, report);
            continue;
        }
        try {
            if (arena.grammar.owner(split->head) == Player::Refuter) {
                stack.emplace_back(refuter_move(arena, state).state, depth + 1);
            } else {
                auto rules = arena.grammar.rules_for(split->head);
                for (auto it = rules.rbegin(); it != rules.rend(); ++it)
                    stack.emplace_back(refuter_observe(arena, state, *it), depth + 1);
            }
        } catch (const InvariantError& e) {
            report.failures.push_back(e.what());
        }
    }
    report.complete = true;
    report.all_good = report.failures.empty();
    return report;
}

PositionalTable extract_positional_refuter(const Arena& arena, std::span<const Symbol> start, std::size_t node_budget) {
    PositionalTable table;
    std::vector<TreeNode> nodes;
    std::vector<std::pair<RefuterStrategyState, std::size_t>> stack;
    auto init = refuter_init(arena, start);
    nodes.push_back({init.form, 0, std::nullopt, 0, 0});
    stack.emplace_back(std::move(init), 0);
    while (!stack.empty()) {
        auto [state, index] = std::move(stack.back());
        stack.pop_back();
        if (nodes.size() > node_budget) {
            table.nodes = nodes.size();
            return table;
        }
        auto split = leftmost_split(state.form);
        if (!split) continue;
        const std::size_t depth = nodes[index].depth + 1;
        if (arena.grammar.owner(split->head) == Player::Refuter) {
            auto step = refuter_move(arena, state);
            nodes[index].move = step.rule;
            nodes.push_back({step.state.form, depth, std::nullopt, 0, index});
            stack.emplace_back(std::move(step.state), nodes.size() - 1);
        } else {
            for (RuleId r : arena.grammar.rules_for(split->head)) {
                auto next = refuter_observe(arena, state, r);
                nodes.push_back({next.form, depth, std::nullopt, 0, index});
                stack.emplace_back(std::move(next), nodes.size() - 1);
            }
        }
    }
    // Children are created after their parents.
    for (std::size_t i = nodes.size(); i-- > 1;)
        nodes[nodes[i].parent].height = std::max(nodes[nodes[i].parent].height, nodes[i].height + 1);

    std::map<SententialForm, std::pair<std::size_t, RuleId>> best;
    for (const auto& n : nodes) {
        if (!n.move) continue;
        auto [it, fresh] = best.emplace(n.form, std::make_pair(n.height, *n.move));
        if (!fresh && std::make_pair(n.height, *n.move) < it->second) it->second = {n.height, *n.move};
    }
    for (const auto& [form, hr] : best) table.moves.emplace(form, hr.second);
    table.nodes = nodes.size();
    table.complete = true;
    return table;
}

VerifyReport replay_positional_refuter(const Arena& arena, const PositionalTable& table, std::span<const Symbol> start,
                                       std::size_t node_budget) {
    VerifyReport report;
    std::vector<std::pair<SententialForm, std::size_t>> stack;
    stack.emplace_back(SententialForm(start.begin(), start.end()), 0);
    while (!stack.empty()) {
        auto [form, depth] = std::move(stack.back());
        stack.pop_back();
        if (++report.nodes > node_budget) {
            report.failures.push_back("node budget exhausted");
            return report;
        }
        report.max_depth = std::max(report.max_depth, depth);
        auto split = leftmost_split(form);
        if (!split) {
            check_leaf(arena, form, {}, report);
            continue;
        }
        if (arena.grammar.owner(split->head) == Player::Refuter) {
            auto it = table.moves.find(form);
            if (it == table.moves.end()) {
                report.failures.push_back("no table entry for " + arena.grammar.render(form));
                continue;
            }
            stack.emplace_back(derive(arena.grammar, form, it->second), depth + 1);
        } else {
            for (RuleId r : arena.grammar.rules_for(split->head))
                stack.emplace_back(derive(arena.grammar, form, r), depth + 1);
        }
    }
    report.complete = true;
    report.all_good = report.failures.empty();
    return report;
}

PositionalTable extract_prover_table(const Arena& arena, std::span<const Symbol> start, std::size_t node_budget) {
    if (refuter_wins(arena.solution, start, arena.pred)) throw PreconditionError("prover does not win from this position");
    PositionalTable table;
    std::set<SententialForm> seen;
    std::vector<SententialForm> queue{SententialForm(start.begin(), start.end())};
    seen.insert(queue.front());
    for (std::size_t head = 0; head < queue.size(); ++head) {
        if (head >= node_budget) {
            table.nodes = seen.size();
            return table;
        }
        const SententialForm form = queue[head];
        auto split = leftmost_split(form);
        if (!split) continue;
        std::vector<RuleId> successors;
        if (arena.grammar.owner(split->head) == Player::Prover) {
            const RuleId r = prover_move(arena, form);
            table.moves.emplace(form, r);
            successors.push_back(r);
        } else {
            auto rules = arena.grammar.rules_for(split->head);
            successors.assign(rules.begin(), rules.end());
        }
        for (RuleId r : successors) {
            auto next = derive(arena.grammar, form, r);
            if (seen.insert(next).second) queue.push_back(std::move(next));
        }
    }
    table.nodes = seen.size();
    table.complete = true;
    return table;
}

} // namespace cfgames
