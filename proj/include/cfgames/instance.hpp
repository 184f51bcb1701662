#pragma once

#include "cfgames/automaton.hpp"
#include "cfgames/grammar.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace cfgames {

/// A game instance: specification automaton, game grammar over the same
/// alphabet and an optional start form.
struct Instance {
    Nfa nfa;
    GameGrammar grammar;
    std::optional<SententialForm> start;
};

/// Parses the line-oriented instance format:
///
///     [automaton]
///     states: q0 q1
///     initial: q0
///     final: q0
///     alphabet: a b        # optional, defaults to the letters used in trans
///     trans:
///     q0 a q1
///     [grammar]
///     refuter: X
///     prover: Y
///     rules:
///     X -> a Y
///     X -> _eps_
///     [start]              # optional
///     X
///
/// `#` starts a comment. Throws ParseError (with line) on syntax errors and
/// ValidationError when the grammar is inconsistent.
Instance parse_instance(std::string_view text);
Instance load_instance(const std::filesystem::path& path);

/// Canonical text form; `header` lines are emitted as `#` comments.
std::string render_instance(const Instance& instance, std::string_view header = {});

/// The explicit start form, or the first non-terminal.
SententialForm default_start(const Instance& instance);

} // namespace cfgames
