#include "cfgames/instance.hpp"

#include "cfgames/errors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace cfgames {

namespace {

std::vector<std::string> split_ws(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

struct Line {
    std::size_t number;
    std::string text;
};

enum class Section { None, Automaton, Grammar, Start };
enum class Block { None, Trans, Rules };

} // namespace

Instance parse_instance(std::string_view text) {
    std::vector<Line> lines;
    {
        std::istringstream in{std::string(text)};
        std::size_t n = 0;
        for (std::string raw; std::getline(in, raw);) {
            ++n;
            if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            if (split_ws(raw).empty()) continue;
            lines.push_back({n, raw});
        }
        if (lines.empty()) throw ParseError(n + 1, "empty instance");
    }
    const std::size_t eof_line = lines.back().number + 1;

    std::optional<std::vector<std::string>> states, alphabet;
    std::optional<std::string> initial;
    std::vector<std::string> finals;
    bool saw_final = false;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> trans;
    std::vector<std::pair<std::string, Player>> nonterminals;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rules;
    std::optional<std::pair<std::size_t, std::string>> start;
    bool saw_automaton = false, saw_grammar = false;

    Section section = Section::None;
    Block block = Block::None;
    for (const auto& [num, raw] : lines) {
        auto tokens = split_ws(raw);
        const std::string& head = tokens.front();
        if (head.front() == '[') {
            if (tokens.size() != 1 || head.back() != ']') throw ParseError(num, "malformed section header");
            block = Block::None;
            if (head == "[automaton]") {
                if (saw_automaton) throw ParseError(num, "duplicate [automaton] section");
                section = Section::Automaton;
                saw_automaton = true;
            } else if (head == "[grammar]") {
                if (saw_grammar) throw ParseError(num, "duplicate [grammar] section");
                section = Section::Grammar;
                saw_grammar = true;
            } else if (head == "[start]") {
                if (start) throw ParseError(num, "duplicate [start] section");
                section = Section::Start;
            } else {
                throw ParseError(num, "unknown section " + head);
            }
            continue;
        }
        if (section == Section::None) throw ParseError(num, "content before the first section");

        if (section == Section::Start) {
            if (start) throw ParseError(num, "[start] takes a single line");
            start = std::make_pair(num, raw);
            continue;
        }

        const auto colon = raw.find(':');
        const bool keyed = colon != std::string::npos && split_ws(raw.substr(0, colon)).size() == 1;
        if (keyed) {
            const std::string key = split_ws(raw.substr(0, colon)).front();
            auto values = split_ws(raw.substr(colon + 1));
            block = Block::None;
            if (section == Section::Automaton) {
                if (key == "states") states = values;
                else if (key == "alphabet") alphabet = values;
                else if (key == "initial") {
                    if (values.size() != 1) throw ParseError(num, "initial: expects exactly one state");
                    initial = values.front();
                } else if (key == "final") {
                    saw_final = true;
                    finals.insert(finals.end(), values.begin(), values.end());
                } else if (key == "trans") {
                    if (!values.empty()) throw ParseError(num, "transitions go on the following lines");
                    block = Block::Trans;
                } else {
                    throw ParseError(num, "unknown automaton key '" + key + "'");
                }
            } else {
                if (key == "refuter" || key == "prover") {
                    const Player p = key == "refuter" ? Player::Refuter : Player::Prover;
                    for (auto& v : values) nonterminals.emplace_back(v, p);
                } else if (key == "rules") {
                    if (!values.empty()) throw ParseError(num, "rules go on the following lines");
                    block = Block::Rules;
                } else {
                    throw ParseError(num, "unknown grammar key '" + key + "'");
                }
            }
            continue;
        }

        if (block == Block::Trans) {
            if (tokens.size() != 3) throw ParseError(num, "transition must be 'source letter target'");
            trans.emplace_back(num, tokens);
        } else if (block == Block::Rules) {
            if (tokens.size() < 3 || tokens[1] != "->") throw ParseError(num, "rule must be 'X -> symbols'");
            rules.emplace_back(num, tokens);
        } else {
            throw ParseError(num, "unexpected line");
        }
    }

    if (!saw_automaton) throw ParseError(eof_line, "missing [automaton] section");
    if (!saw_grammar) throw ParseError(eof_line, "missing [grammar] section");
    if (!states || states->empty()) throw ParseError(eof_line, "automaton needs 'states:'");
    if (!initial) throw ParseError(eof_line, "automaton needs 'initial:'");
    if (!saw_final) throw ParseError(eof_line, "automaton needs 'final:' (may be empty)");

    std::map<std::string, StateId> state_ids;
    for (std::size_t i = 0; i < states->size(); ++i)
        if (!state_ids.emplace((*states)[i], static_cast<StateId>(i)).second)
            throw ParseError(eof_line, "duplicate state '" + (*states)[i] + "'");
    auto state_of = [&](std::size_t line, const std::string& name) {
        auto it = state_ids.find(name);
        if (it == state_ids.end()) throw ParseError(line, "unknown state '" + name + "'");
        return it->second;
    };

    std::vector<std::string> letters;
    if (alphabet) {
        letters = *alphabet;
    } else {
        for (const auto& [num, t] : trans)
            if (std::find(letters.begin(), letters.end(), t[1]) == letters.end()) letters.push_back(t[1]);
    }
    auto letter_of = [&](std::size_t line, const std::string& name) {
        auto it = std::find(letters.begin(), letters.end(), name);
        if (it == letters.end()) throw ParseError(line, "letter '" + name + "' not in the alphabet");
        return static_cast<LetterId>(it - letters.begin());
    };

    std::vector<Transition> transitions;
    for (const auto& [num, t] : trans) transitions.push_back({state_of(num, t[0]), letter_of(num, t[1]), state_of(num, t[2])});
    std::vector<StateId> final_ids;
    for (const auto& f : finals) final_ids.push_back(state_of(eof_line, f));
    const StateId init = state_of(eof_line, *initial);

    Nfa nfa(*states, letters, init, std::move(final_ids), std::move(transitions));

    std::map<std::string, NonterminalId> nt_ids;
    std::vector<NonterminalInfo> nts;
    for (const auto& [name, owner] : nonterminals) {
        if (!nt_ids.emplace(name, static_cast<NonterminalId>(nts.size())).second)
            throw ParseError(eof_line, "non-terminal '" + name + "' declared twice");
        if (name == kEpsilonToken || name == "->") throw ParseError(eof_line, "reserved token used as non-terminal");
        nts.push_back({name, owner});
    }
    std::vector<Rule> grammar_rules;
    for (const auto& [num, tokens] : rules) {
        auto lhs = nt_ids.find(tokens[0]);
        if (lhs == nt_ids.end()) throw ParseError(num, "rule lhs '" + tokens[0] + "' is not a declared non-terminal");
        Rule rule{lhs->second, {}};
        const bool eps = tokens.size() == 3 && tokens[2] == kEpsilonToken;
        if (!eps) {
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                if (tokens[i] == kEpsilonToken) throw ParseError(num, "'_eps_' must stand alone");
                if (auto x = nt_ids.find(tokens[i]); x != nt_ids.end())
                    rule.rhs.push_back(Symbol::nonterminal(x->second));
                else if (auto it = std::find(letters.begin(), letters.end(), tokens[i]); it != letters.end())
                    rule.rhs.push_back(Symbol::terminal(static_cast<std::uint32_t>(it - letters.begin())));
                else
                    throw ParseError(num, "unknown symbol '" + tokens[i] +
                                              "' (not a non-terminal and not in the automaton alphabet)");
            }
        }
        grammar_rules.push_back(std::move(rule));
    }

    GameGrammar grammar(std::move(nts), letters, std::move(grammar_rules));
    if (auto problems = validate(grammar); !problems.empty()) throw ValidationError(problems.front());

    std::optional<SententialForm> start_form;
    if (start) {
        try {
            start_form = grammar.parse_form(start->second);
        } catch (const ValidationError& e) {
            throw ParseError(start->first, e.what());
        }
    }
    return Instance{std::move(nfa), std::move(grammar), std::move(start_form)};
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw GameError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str());
}

std::string render_instance(const Instance& instance, std::string_view header) {
    std::ostringstream out;
    if (!header.empty()) {
        std::istringstream h{std::string(header)};
        for (std::string line; std::getline(h, line);) out << "# " << line << '\n';
    }
    const auto& nfa = instance.nfa;
    auto join = [](const std::vector<std::string>& xs) {
        std::string s;
        for (const auto& x : xs) s += " " + x;
        return s;
    };
    out << "[automaton]\n";
    out << "states:" << join(nfa.state_names()) << '\n';
    out << "initial: " << nfa.state_names()[nfa.initial()] << '\n';
    std::vector<std::string> finals;
    for (StateId f : nfa.finals()) finals.push_back(nfa.state_names()[f]);
    out << "final:" << join(finals) << '\n';
    out << "alphabet:" << join(nfa.alphabet()) << '\n';
    out << "trans:\n";
    for (const auto& t : nfa.transitions())
        out << nfa.state_names()[t.from] << ' ' << nfa.alphabet()[t.letter] << ' ' << nfa.state_names()[t.to] << '\n';

    const auto& g = instance.grammar;
    out << "[grammar]\n";
    std::vector<std::string> refuter, prover;
    for (const auto& nt : g.nonterminals()) (nt.owner == Player::Refuter ? refuter : prover).push_back(nt.name);
    out << "refuter:" << join(refuter) << '\n';
    out << "prover:" << join(prover) << '\n';
    out << "rules:\n";
    for (RuleId r = 0; r < g.num_rules(); ++r) out << g.render_rule(r) << '\n';
    if (instance.start) out << "[start]\n" << g.render(*instance.start) << '\n';
    return out.str();
}

SententialForm default_start(const Instance& instance) {
    if (instance.start) return *instance.start;
    if (instance.grammar.num_nonterminals() == 0) return {};
    return {Symbol::nonterminal(0)};
}

} // namespace cfgames
