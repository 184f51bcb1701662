#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cfgames {

enum class Player : std::uint8_t { Refuter, Prover };

std::string_view to_string(Player p);
inline Player opponent(Player p) { return p == Player::Refuter ? Player::Prover : Player::Refuter; }

using NonterminalId = std::uint32_t;
using RuleId = std::uint32_t;

/// A grammar symbol: a terminal (index into the shared alphabet) or a
/// non-terminal (index into the grammar's non-terminal table).
struct Symbol {
    enum class Kind : std::uint8_t { Terminal, Nonterminal };

    Kind kind;
    std::uint32_t index;

    static Symbol terminal(std::uint32_t letter) { return {Kind::Terminal, letter}; }
    static Symbol nonterminal(NonterminalId x) { return {Kind::Nonterminal, x}; }
    bool is_terminal() const { return kind == Kind::Terminal; }
    bool is_nonterminal() const { return kind == Kind::Nonterminal; }

    friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

using SententialForm = std::vector<Symbol>;

struct Rule {
    NonterminalId lhs;
    SententialForm rhs;
};

struct NonterminalInfo {
    std::string name;
    Player owner;
};

/// Context-free grammar whose non-terminals are partitioned between the two
/// players. Terminals are the alphabet of the specification automaton.
/// Rules keep their file order; the index is the rule's stable identity.
class GameGrammar {
public:
    GameGrammar(std::vector<NonterminalInfo> nonterminals, std::vector<std::string> terminals, std::vector<Rule> rules);

    std::size_t num_nonterminals() const noexcept { return nonterminals_.size(); }
    std::size_t num_terminals() const noexcept { return terminals_.size(); }
    std::size_t num_rules() const noexcept { return rules_.size(); }

    const std::vector<NonterminalInfo>& nonterminals() const noexcept { return nonterminals_; }
    const std::vector<std::string>& terminals() const noexcept { return terminals_; }
    const std::vector<Rule>& rules() const noexcept { return rules_; }
    const Rule& rule(RuleId r) const { return rules_.at(r); }

    Player owner(NonterminalId x) const { return nonterminals_.at(x).owner; }
    const std::string& name(NonterminalId x) const { return nonterminals_.at(x).name; }
    /// Rule indices with the given lhs, ascending.
    std::span<const RuleId> rules_for(NonterminalId x) const { return rules_by_lhs_.at(x); }

    std::optional<NonterminalId> nonterminal_index(std::string_view name) const;
    std::optional<std::uint32_t> terminal_index(std::string_view name) const;

    std::string symbol_name(Symbol s) const;
    /// Space separated symbol names; the empty form renders as `_eps_`.
    std::string render(std::span<const Symbol> form) const;
    std::string render_rule(RuleId r) const;

    /// Tokens separated by whitespace; `_eps_` or an empty string is the empty form.
    /// Throws ValidationError on unknown tokens.
    SententialForm parse_form(std::string_view text) const;

private:
    std::vector<NonterminalInfo> nonterminals_;
    std::vector<std::string> terminals_;
    std::vector<Rule> rules_;
    std::vector<std::vector<RuleId>> rules_by_lhs_;
};

inline constexpr std::string_view kEpsilonToken = "_eps_";

/// Split of a form into terminal prefix, leftmost non-terminal and the rest.
struct LeftmostSplit {
    std::size_t position; ///< index of the leftmost non-terminal
    NonterminalId head;
    std::span<const Symbol> prefix;
    std::span<const Symbol> suffix;
};

std::optional<LeftmostSplit> leftmost_split(std::span<const Symbol> form);

bool is_terminal_word(std::span<const Symbol> form);

/// Owner of the leftmost non-terminal; the refuter owns terminal words.
Player owner_of(const GameGrammar& grammar, std::span<const Symbol> form);

/// Left derivation step wXb => w eta b. Throws PreconditionError on terminal
/// words, lhs mismatch or a bad rule index.
SententialForm derive(const GameGrammar& grammar, std::span<const Symbol> form, RuleId rule);

/// Every grammar invariant violation as a readable message; empty iff valid.
std::vector<std::string> validate(const GameGrammar& grammar);

} // namespace cfgames
