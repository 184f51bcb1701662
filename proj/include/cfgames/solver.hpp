#pragma once

#include "cfgames/automaton.hpp"
#include "cfgames/formula.hpp"
#include "cfgames/grammar.hpp"

#include <chrono>
#include <optional>
#include <string_view>
#include <vector>

namespace cfgames {

/// Cooperative timeout checked inside solver loops.
class Deadline {
public:
    Deadline() = default;
    static Deadline after(std::chrono::milliseconds budget) { return Deadline(std::chrono::steady_clock::now() + budget); }

    bool expired() const { return at_ && std::chrono::steady_clock::now() >= *at_; }
    void check() const;

private:
    explicit Deadline(std::chrono::steady_clock::time_point at) : at_(at) {}
    std::optional<std::chrono::steady_clock::time_point> at_;
};

enum class Combiner { And, Or };

/// One equation per non-terminal: prover-owned ones conjoin their right-hand
/// sides, refuter-owned ones disjoin them. Terminals are pre-resolved to
/// their letter boxes.
struct EquationSystem {
    struct Term {
        bool is_box;
        Box box;
        NonterminalId nonterminal;
    };
    struct Equation {
        Combiner combiner;
        std::vector<RuleId> rules;
        std::vector<std::vector<Term>> rhs;
    };

    std::size_t dim = 0;
    std::vector<Equation> equations;
    /// X -> non-terminals occurring in some rhs of X, ascending.
    std::vector<std::vector<NonterminalId>> depends_on;
    /// X -> non-terminals whose equation mentions X, ascending.
    std::vector<std::vector<NonterminalId>> dependents;
    /// Box of each grammar terminal, indexed like GameGrammar::terminals().
    std::vector<Box> terminal_boxes;
};

/// Throws ValidationError if the grammar is invalid or uses terminals outside
/// the automaton's alphabet.
EquationSystem build_system(const GameGrammar& grammar, const Nfa& nfa);

/// Right-hand side of X's equation under the given assignment.
Formula evaluate_equation(const EquationSystem& system, NonterminalId x, const std::vector<Formula>& sigma);

enum class Engine { Naive, NaiveParallel, Worklist };

std::string_view to_string(Engine e);
std::optional<Engine> engine_from_string(std::string_view name);

struct SolveStats {
    Engine engine = Engine::Naive;
    std::size_t rounds = 0;       ///< synchronous rounds (naive engines)
    std::size_t evaluations = 0;  ///< equation evaluations
    std::size_t updates = 0;      ///< evaluations that changed a component
    std::size_t distinct_boxes = 0;
    std::vector<std::size_t> clause_counts;
    double wall_ms = 0.0;
};

/// Least solution of an equation system. Naive engines also keep every
/// Kleene approximant: snapshots[i][X] is the i-th approximant of X,
/// snapshots[0] is all FALSE and the last two snapshots coincide.
struct Solution {
    std::vector<Formula> final;
    std::vector<std::vector<Formula>> snapshots;
    std::size_t rounds = 0;
    std::vector<Box> terminal_boxes;
    std::size_t dim = 0;
    SolveStats stats;

    bool has_snapshots() const noexcept { return !snapshots.empty(); }
};

struct SolveOptions {
    Deadline deadline;
    bool keep_snapshots = true;
};

/// Synchronous Kleene iteration, serial reference implementation.
Solution kleene_naive(const EquationSystem& system, const SolveOptions& options = {});
/// Same rounds as kleene_naive, with the components of each round computed
/// by an OpenMP team. Results are identical to the serial engine.
Solution kleene_naive_parallel(const EquationSystem& system, const SolveOptions& options = {});
/// Chaotic iteration with a FIFO worklist. No snapshots.
Solution kleene_worklist(const EquationSystem& system, const SolveOptions& options = {});

Solution solve(const EquationSystem& system, Engine engine, const SolveOptions& options = {});

/// sigma lifted to forms: FALSE-free fold of compose, the empty form is {{id}}.
Formula eval_sentential(const Solution& solution, std::span<const Symbol> form);
/// Same, with every non-terminal at the i-th approximant.
Formula eval_sentential_at(const Solution& solution, std::span<const Symbol> form, std::size_t round);

/// Per-position approximants: the non-terminal at position j is read at
/// round levels[j]; entries for terminals are ignored.
Formula eval_sentential_levels(const Solution& solution, std::span<const Symbol> form,
                               std::span<const std::size_t> levels);

bool refuter_wins(const Solution& solution, std::span<const Symbol> form, const BoxPredicate& pred);
bool prover_forces_infinite(const Solution& solution, std::span<const Symbol> form);

/// i-th Kleene approximant of X. Throws PreconditionError for worklist
/// solutions and out-of-range rounds.
const Formula& approximant(const Solution& solution, NonterminalId x, std::size_t round);

/// Least round whose approximant of X mentions the box.
std::optional<std::size_t> box_entry_round(const Solution& solution, NonterminalId x, const Box& box);

} // namespace cfgames
