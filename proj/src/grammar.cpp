#include "cfgames/grammar.hpp"

#include "cfgames/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace cfgames {

std::string_view to_string(Player p) { return p == Player::Refuter ? "refuter" : "prover"; }

GameGrammar::GameGrammar(std::vector<NonterminalInfo> nonterminals, std::vector<std::string> terminals,
                         std::vector<Rule> rules)
    : nonterminals_(std::move(nonterminals)), terminals_(std::move(terminals)), rules_(std::move(rules)) {
    rules_by_lhs_.resize(nonterminals_.size());
    // Out-of-range lhs are kept in rules_ so validate() can report them.
    for (RuleId r = 0; r < rules_.size(); ++r)
        if (rules_[r].lhs < nonterminals_.size()) rules_by_lhs_[rules_[r].lhs].push_back(r);
}

std::optional<NonterminalId> GameGrammar::nonterminal_index(std::string_view name) const {
    for (std::size_t i = 0; i < nonterminals_.size(); ++i)
        if (nonterminals_[i].name == name) return static_cast<NonterminalId>(i);
    return std::nullopt;
}

std::optional<std::uint32_t> GameGrammar::terminal_index(std::string_view name) const {
    for (std::size_t i = 0; i < terminals_.size(); ++i)
        if (terminals_[i] == name) return static_cast<std::uint32_t>(i);
    return std::nullopt;
}

std::string GameGrammar::symbol_name(Symbol s) const {
    if (s.is_terminal()) return s.index < terminals_.size() ? terminals_[s.index] : "?t" + std::to_string(s.index);
    return s.index < nonterminals_.size() ? nonterminals_[s.index].name : "?n" + std::to_string(s.index);
}

std::string GameGrammar::render(std::span<const Symbol> form) const {
    if (form.empty()) return std::string(kEpsilonToken);
    std::string out;
    for (std::size_t i = 0; i < form.size(); ++i) {
        if (i) out += ' ';
        out += symbol_name(form[i]);
    }
    return out;
}

std::string GameGrammar::render_rule(RuleId r) const {
    const Rule& rule = rules_.at(r);
    return symbol_name(Symbol::nonterminal(rule.lhs)) + " -> " + render(rule.rhs);
}

SententialForm GameGrammar::parse_form(std::string_view text) const {
    std::istringstream in{std::string(text)};
    std::vector<std::string> tokens;
    for (std::string tok; in >> tok;) tokens.push_back(tok);
    if (tokens.size() == 1 && tokens[0] == kEpsilonToken) return {};
    SententialForm form;
    for (const auto& tok : tokens) {
        if (auto x = nonterminal_index(tok))
            form.push_back(Symbol::nonterminal(*x));
        else if (auto a = terminal_index(tok))
            form.push_back(Symbol::terminal(*a));
        else
            throw ValidationError("unknown symbol '" + tok + "'");
    }
    return form;
}

std::optional<LeftmostSplit> leftmost_split(std::span<const Symbol> form) {
    auto it = std::find_if(form.begin(), form.end(), [](Symbol s) { return s.is_nonterminal(); });
    if (it == form.end()) return std::nullopt;
    const auto pos = static_cast<std::size_t>(it - form.begin());
    return LeftmostSplit{pos, it->index, form.first(pos), form.subspan(pos + 1)};
}

bool is_terminal_word(std::span<const Symbol> form) {
    return std::all_of(form.begin(), form.end(), [](Symbol s) { return s.is_terminal(); });
}

Player owner_of(const GameGrammar& grammar, std::span<const Symbol> form) {
    auto split = leftmost_split(form);
    return split ? grammar.owner(split->head) : Player::Refuter;
}

SententialForm derive(const GameGrammar& grammar, std::span<const Symbol> form, RuleId rule) {
    auto split = leftmost_split(form);
    if (!split) throw PreconditionError("cannot derive from a terminal word");
    if (rule >= grammar.num_rules()) throw PreconditionError("rule index out of range");
    const Rule& r = grammar.rule(rule);
    if (r.lhs != split->head)
        throw PreconditionError("rule " + grammar.render_rule(rule) + " does not rewrite leftmost non-terminal " +
                                grammar.name(split->head));
    SententialForm out(split->prefix.begin(), split->prefix.end());
    out.insert(out.end(), r.rhs.begin(), r.rhs.end());
    out.insert(out.end(), split->suffix.begin(), split->suffix.end());
    return out;
}

std::vector<std::string> validate(const GameGrammar& grammar) {
    std::vector<std::string> problems;
    std::set<std::string> names;
    for (const auto& nt : grammar.nonterminals())
        if (!names.insert(nt.name).second) problems.push_back("duplicate non-terminal '" + nt.name + "'");
    for (const auto& t : grammar.terminals()) {
        if (names.count(t)) problems.push_back("symbol '" + t + "' is both terminal and non-terminal");
        if (t == kEpsilonToken) problems.push_back("'_eps_' cannot be a terminal");
    }
    for (const auto& nt : grammar.nonterminals())
        if (nt.name == kEpsilonToken) problems.push_back("'_eps_' cannot be a non-terminal");

    for (RuleId r = 0; r < grammar.num_rules(); ++r) {
        const Rule& rule = grammar.rule(r);
        if (rule.lhs >= grammar.num_nonterminals())
            problems.push_back("rule " + std::to_string(r) + ": lhs is not a declared non-terminal");
        for (Symbol s : rule.rhs) {
            const std::size_t bound = s.is_terminal() ? grammar.num_terminals() : grammar.num_nonterminals();
            if (s.index >= bound)
                problems.push_back("rule " + std::to_string(r) + ": rhs references undeclared " +
                                   (s.is_terminal() ? "terminal" : "non-terminal"));
        }
    }
    for (NonterminalId x = 0; x < grammar.num_nonterminals(); ++x)
        if (grammar.rules_for(x).empty())
            problems.push_back("non-terminal '" + grammar.name(x) + "' is not the lhs of any rule");
    return problems;
}

} // namespace cfgames
