#pragma once

#include "cfgames/cachat.hpp"
#include "cfgames/instance.hpp"
#include "cfgames/solver.hpp"
#include "cfgames/strategy.hpp"

#include <json.hpp>

namespace cfgames {

using Json = nlohmann::json;

/// Clause list over box names plus the name -> relation table.
Json formula_json(const Nfa& nfa, const Formula& formula);
Json stats_json(const SolveStats& stats);
Json saturation_json(const SaturationStats& stats);

/// Result record of a solve query for one position.
Json solve_json(const Instance& instance, const Solution& solution, std::span<const Symbol> form, PredicateKind kind,
                bool with_stats);

Json transcript_json(const GameGrammar& grammar, const Nfa& nfa, const Transcript& transcript);
Json verify_json(const GameGrammar& grammar, const VerifyReport& report);
/// Form -> {rule, rendering}.
Json table_json(const GameGrammar& grammar, const PositionalTable& table);

Json instance_summary_json(const Instance& instance);

std::string_view to_string(PredicateKind kind);
std::optional<PredicateKind> predicate_from_string(std::string_view name);

} // namespace cfgames
