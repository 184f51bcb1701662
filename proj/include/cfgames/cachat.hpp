#pragma once

#include "cfgames/formula.hpp"
#include "cfgames/instance.hpp"
#include "cfgames/solver.hpp"

#include <cstdint>
#include <vector>

namespace cfgames {

/// Set of P-AFA states as a fixed-width bitset.
class StateSet {
public:
    StateSet() = default;
    explicit StateSet(std::size_t universe) : words_((universe + 63) / 64, 0) {}

    void insert(std::size_t s) { words_[s / 64] |= std::uint64_t{1} << (s % 64); }
    bool contains(std::size_t s) const { return (words_[s / 64] >> (s % 64)) & 1U; }
    bool subset_of(const StateSet& other) const;
    StateSet& operator|=(const StateSet& other);
    std::vector<std::size_t> members() const;
    std::size_t hash() const noexcept;

    friend bool operator==(const StateSet&, const StateSet&) = default;

private:
    std::vector<std::uint64_t> words_;
};

/// Pushdown game encoding of an instance. Control state p = 2*d + owner,
/// where d is a state of the (minimized) DFA for the specification.
/// Stack symbols: terminals first, then non-terminals offset by |T|.
struct Pds {
    struct Move {
        std::uint32_t target;
        std::vector<std::uint32_t> push; ///< top of stack first
    };

    explicit Pds(Nfa d) : dfa(std::move(d)) {}

    Nfa dfa;
    std::size_t num_terminals = 0;
    std::size_t num_symbols = 0;
    std::size_t num_controls = 0;
    std::vector<Player> control_owner;
    /// moves[p * num_symbols + gamma]
    std::vector<std::vector<Move>> moves;

    const std::vector<Move>& moves_for(std::size_t p, std::size_t gamma) const { return moves[p * num_symbols + gamma]; }
};

/// Alternating automaton over stack words: p --gamma--> S reads gamma and
/// continues from every state of S. A configuration is accepted if some run
/// ends in a set of accepting states.
struct PAfa {
    std::size_t num_states = 0;
    std::size_t num_symbols = 0;
    std::vector<bool> accepting;
    /// trans[p * num_symbols + gamma] is an antichain of successor sets.
    std::vector<std::vector<StateSet>> trans;

    std::size_t transition_count() const;
};

struct Configuration {
    std::uint32_t control;
    std::vector<std::uint32_t> stack;
};

struct CachatOptions {
    bool minimize = true;
    PredicateKind predicate = PredicateKind::Reject;
    Deadline deadline;
};

struct Encoding {
    Pds pds;
    PAfa afa;
};

Encoding encode(const Instance& instance, const CachatOptions& options = {});

/// config(w X beta) = (post(q0, w) with the owner of X, X beta); a terminal
/// word w maps to (initial state, refuter, w).
Configuration make_config(const Instance& instance, const Pds& pds, std::span<const Symbol> form);

struct SaturationStats {
    std::size_t rounds = 0;
    std::size_t transitions = 0;
    std::size_t dfa_states = 0;
    std::size_t control_states = 0;
    double wall_ms = 0.0;
};

/// Adds transitions until nothing changes. Returns the number of rounds.
SaturationStats saturate(const Pds& pds, PAfa& afa, const Deadline& deadline = {});

bool afa_accepts(const PAfa& afa, const Configuration& config);

struct CachatResult {
    bool refuter_wins;
    SaturationStats stats;
};

CachatResult cachat_solve(const Instance& instance, std::span<const Symbol> form, const CachatOptions& options = {});
bool cachat_refuter_wins(const Instance& instance, std::span<const Symbol> form, const CachatOptions& options = {});

} // namespace cfgames
