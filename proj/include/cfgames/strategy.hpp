#pragma once

#include "cfgames/formula.hpp"
#include "cfgames/random.hpp"
#include "cfgames/instance.hpp"
#include "cfgames/solver.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cfgames {

/// Everything a strategy needs to evaluate positions. The solution must come
/// from a naive engine when refuter strategies are involved.
struct Arena {
    const GameGrammar& grammar;
    const Nfa& nfa;
    const Solution& solution;
    BoxPredicate pred;
};

/// (box of the terminal prefix, leftmost non-terminal, formula of the suffix).
struct PositionTriple {
    Box prefix_box;
    NonterminalId head;
    Formula suffix_formula;
    SententialForm form;
};

/// Throws PreconditionError on terminal words.
PositionTriple make_triple(const Arena& arena, std::span<const Symbol> form);

/// Formula of a form with the non-terminal at position j read at round levels[j].
Formula level_formula(const Solution& solution, std::span<const Symbol> form, std::span<const std::size_t> levels);

/// Lowest-index rule for the leftmost (prover-owned) non-terminal whose
/// result is not rejecting. Throws PreconditionError when the position is
/// not prover-owned or already rejecting.
RuleId prover_move(const Arena& arena, std::span<const Symbol> form);
/// Same decision computed from the triple alone.
RuleId prover_move(const Arena& arena, const PositionTriple& triple);

/// Finite-memory refuter strategy: the current form, one level per symbol
/// and a choice function on the level formula.
struct RefuterStrategyState {
    SententialForm form;
    std::vector<std::size_t> levels;
    ChoiceFunction choice;
    std::vector<Box> initial_image;

    std::vector<Box> image() const { return choice.image(); }
};

/// Throws PreconditionError when the refuter does not win from the form.
RefuterStrategyState refuter_init(const Arena& arena, std::span<const Symbol> form);

struct RefuterStep {
    RuleId rule;
    RefuterStrategyState state;
};

/// Refuter's rule at a refuter-owned position. Throws InvariantError when no
/// refinement exists.
RefuterStep refuter_move(const Arena& arena, const RefuterStrategyState& state);
/// Follows a prover move. Throws InvariantError when refinement fails.
RefuterStrategyState refuter_observe(const Arena& arena, const RefuterStrategyState& state, RuleId rule);

// ---------------------------------------------------------------------------
// Play engine

enum class Outcome { RefuterWins, ProverWins, CapReached };
std::string_view to_string(Outcome o);

struct TranscriptStep {
    SententialForm position;
    Player chooser;
    RuleId rule;
};

struct Transcript {
    SententialForm start;
    std::vector<TranscriptStep> steps;
    SententialForm final_form;
    Outcome outcome = Outcome::CapReached;
    /// Set when the cap was reached: prover can keep the play infinite.
    bool prover_forces_infinite = false;
};

class PlaySession;

/// A participant in a play. observe() is called after every move, including
/// the agent's own.
class Agent {
public:
    virtual ~Agent() = default;
    virtual RuleId choose(const PlaySession& session) = 0;
    virtual void observe(const PlaySession&, const SententialForm&, RuleId) {}
    virtual std::string kind() const = 0;
};

/// One play as a state machine. Not thread-safe; callers serialize moves.
class PlaySession {
public:
    PlaySession(const Arena& arena, SententialForm start, std::size_t step_cap = 10000);

    const Arena& arena() const noexcept { return arena_; }
    const SententialForm& form() const noexcept { return form_; }
    std::size_t steps() const noexcept { return transcript_.steps.size(); }
    std::size_t step_cap() const noexcept { return cap_; }
    Player turn() const { return owner_of(arena_.grammar, form_); }
    bool finished() const;
    std::vector<RuleId> legal_rules() const;
    bool is_legal(RuleId rule) const;

    /// Throws PreconditionError on illegal moves or when the play is over.
    void apply(RuleId rule);

    /// Transcript so far; the outcome is final once finished().
    Transcript transcript() const;

private:
    Arena arena_;
    SententialForm form_;
    std::size_t cap_;
    Transcript transcript_;
};

/// Runs the session to completion, notifying both agents of every move.
Transcript play(PlaySession& session, Agent& refuter, Agent& prover);

class SynthesizedRefuter final : public Agent {
public:
    RuleId choose(const PlaySession& session) override;
    void observe(const PlaySession& session, const SententialForm& before, RuleId rule) override;
    std::string kind() const override { return "synthesized"; }
    /// Initializes the strategy state at the current position, if it is winning.
    void prime(const PlaySession& session) { sync(session); }
    const std::optional<RefuterStrategyState>& state() const noexcept { return state_; }

private:
    void sync(const PlaySession& session);
    std::optional<RefuterStrategyState> state_;
    std::optional<RuleId> planned_;
    std::optional<RefuterStrategyState> planned_state_;
};

class SynthesizedProver final : public Agent {
public:
    RuleId choose(const PlaySession& session) override;
    std::string kind() const override { return "synthesized"; }
};

class RandomAgent final : public Agent {
public:
    explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}
    RuleId choose(const PlaySession& session) override;
    std::string kind() const override { return "random"; }

private:
    Rng rng_;
};

/// Plays a fixed rule list; throws PreconditionError when it runs out.
class ScriptedAgent final : public Agent {
public:
    explicit ScriptedAgent(std::vector<RuleId> script) : script_(std::move(script)) {}
    RuleId choose(const PlaySession& session) override;
    std::string kind() const override { return "scripted"; }

private:
    std::vector<RuleId> script_;
    std::size_t next_ = 0;
};

/// Reads rule indices from a stream, re-prompting on illegal input.
class InteractiveAgent final : public Agent {
public:
    InteractiveAgent(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
    RuleId choose(const PlaySession& session) override;
    void observe(const PlaySession& session, const SententialForm& before, RuleId rule) override;
    std::string kind() const override { return "interactive"; }

private:
    std::istream& in_;
    std::ostream& out_;
};

// ---------------------------------------------------------------------------
// Verification and extraction

struct VerifyReport {
    bool complete = false;      ///< false when the node budget ran out
    bool all_good = false;      ///< every branch ended in a rejecting word from the image
    std::size_t nodes = 0;
    std::size_t branches = 0;
    std::size_t max_depth = 0;
    std::vector<std::string> failures;
    std::vector<SententialForm> words;
};

/// Expands every prover alternative against the synthesized refuter.
VerifyReport verify_refuter_exhaustive(const Arena& arena, std::span<const Symbol> start, std::size_t node_budget = 100000);

struct PositionalTable {
    std::map<SententialForm, RuleId> moves;
    std::size_t nodes = 0;
    bool complete = false;
};

/// Positional refuter strategy read off the tree of conforming plays. For
/// every refuter form the move from the occurrence with the lowest subtree
/// height is kept, so following the table never loops.
PositionalTable extract_positional_refuter(const Arena& arena, std::span<const Symbol> start,
                                           std::size_t node_budget = 100000);

/// Replays the table against every prover alternative.
VerifyReport replay_positional_refuter(const Arena& arena, const PositionalTable& table,
                                       std::span<const Symbol> start, std::size_t node_budget = 100000);

/// prover_move on the prover positions reachable from start under the prover
/// strategy and every refuter choice, up to the node budget.
PositionalTable extract_prover_table(const Arena& arena, std::span<const Symbol> start, std::size_t node_budget = 10000);

} // namespace cfgames
