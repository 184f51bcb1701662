#pragma once

#include "cfgames/instance.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace cfgames {

/// Random instance parameters: Tabakov-Vardi automata plus grammars with
/// rules of the shape X -> [a] [Y] [b].
struct GenParams {
    std::size_t states = 5;
    std::size_t letters = 5;
    double density = 2.0;        ///< transitions per letter = round(density * states)
    double final_fraction = 0.5;
    bool initial_final = false;  ///< force the initial state to be final

    std::size_t refuter_nonterminals = 5;
    std::size_t prover_nonterminals = 5;
    /// Defaults to twice the player's non-terminal count.
    std::optional<std::size_t> refuter_rules;
    std::optional<std::size_t> prover_rules;
    double p_a = 0.8;
    double p_y = 0.8;
    double p_b = 0.8;

    std::uint64_t seed = 1;

    std::size_t rules_for(Player p) const;
    /// Throws PreconditionError when out of range.
    void check() const;
};

Nfa gen_nfa(const GenParams& params, std::uint64_t seed);
GameGrammar gen_grammar(const GenParams& params, std::uint64_t seed, const std::vector<std::string>& alphabet);

/// Instance with start symbol X0 (Y0 when the refuter has no non-terminals).
Instance gen_instance(const GenParams& params);

/// Comment header recording the parameters and the seed.
std::string gen_metadata(const GenParams& params);

/// "5/5/10": 5 states, 5 letters, 10 non-terminals per player.
struct Combo {
    std::size_t states;
    std::size_t letters;
    std::size_t nonterminals;
    std::string label() const;
};
Combo parse_combo(std::string_view text);

} // namespace cfgames
