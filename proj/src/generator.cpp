#include "cfgames/generator.hpp"

#include "cfgames/errors.hpp"
#include "cfgames/random.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace cfgames {

namespace {

std::size_t round_count(double x) { return static_cast<std::size_t>(std::llround(x)); }

// Floyd's algorithm: `count` distinct values in [0, universe), sorted.
std::vector<std::uint64_t> sample_distinct(Rng& rng, std::uint64_t universe, std::size_t count) {
    std::set<std::uint64_t> chosen;
    for (std::uint64_t j = universe - count; j < universe; ++j) {
        const std::uint64_t t = uniform_below(rng, j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    return {chosen.begin(), chosen.end()};
}

std::string letter_name(std::size_t i, std::size_t k) {
    if (k <= 26) return std::string(1, static_cast<char>('a' + i));
    return "t" + std::to_string(i);
}

} // namespace

std::size_t GenParams::rules_for(Player p) const {
    if (p == Player::Refuter) return refuter_rules.value_or(2 * refuter_nonterminals);
    return prover_rules.value_or(2 * prover_nonterminals);
}

void GenParams::check() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (states < 1 || states > kMaxBoxStates) throw PreconditionError("states must be in 1..16");
    if (letters < 1) throw PreconditionError("letters must be at least 1");
    if (!(density >= 0.0 && density <= static_cast<double>(states))) throw PreconditionError("density must be in [0, states]");
    if (!prob(final_fraction) || !prob(p_a) || !prob(p_y) || !prob(p_b))
        throw PreconditionError("fractions and probabilities must be in [0, 1]");
    if (refuter_nonterminals + prover_nonterminals == 0) throw PreconditionError("need at least one non-terminal");
}

Nfa gen_nfa(const GenParams& params, std::uint64_t seed) {
    params.check();
    Rng rng(seed);
    const std::size_t n = params.states;
    std::vector<std::string> names, alphabet;
    for (std::size_t i = 0; i < n; ++i) names.push_back("q" + std::to_string(i));
    for (std::size_t i = 0; i < params.letters; ++i) alphabet.push_back(letter_name(i, params.letters));

    const std::size_t per_letter = std::min(round_count(params.density * static_cast<double>(n)), n * n);
    std::vector<Transition> transitions;
    for (std::size_t a = 0; a < params.letters; ++a)
        for (auto pair : sample_distinct(rng, n * n, per_letter))
            transitions.push_back({static_cast<StateId>(pair / n), static_cast<LetterId>(a), static_cast<StateId>(pair % n)});

    std::size_t final_count = std::min(round_count(params.final_fraction * static_cast<double>(n)), n);
    if (params.final_fraction > 0.0) final_count = std::max<std::size_t>(final_count, 1);
    std::vector<StateId> finals;
    if (params.initial_final) {
        finals.push_back(0);
        if (final_count > 1)
            for (auto s : sample_distinct(rng, n - 1, final_count - 1)) finals.push_back(static_cast<StateId>(s + 1));
    } else {
        for (auto s : sample_distinct(rng, n, final_count)) finals.push_back(static_cast<StateId>(s));
    }
    return Nfa(std::move(names), std::move(alphabet), 0, std::move(finals), std::move(transitions));
}

GameGrammar gen_grammar(const GenParams& params, std::uint64_t seed, const std::vector<std::string>& alphabet) {
    params.check();
    if (alphabet.empty()) throw PreconditionError("grammar generation needs a non-empty alphabet");
    Rng rng(seed);
    std::vector<NonterminalInfo> nts;
    for (std::size_t i = 0; i < params.refuter_nonterminals; ++i) nts.push_back({"X" + std::to_string(i), Player::Refuter});
    for (std::size_t i = 0; i < params.prover_nonterminals; ++i) nts.push_back({"Y" + std::to_string(i), Player::Prover});

    std::vector<Rule> rules;
    auto draw_letter = [&] { return Symbol::terminal(static_cast<std::uint32_t>(uniform_below(rng, alphabet.size()))); };
    for (Player p : {Player::Refuter, Player::Prover}) {
        const std::size_t first = p == Player::Refuter ? 0 : params.refuter_nonterminals;
        const std::size_t count = p == Player::Refuter ? params.refuter_nonterminals : params.prover_nonterminals;
        if (count == 0) continue;
        for (std::size_t r = 0; r < params.rules_for(p); ++r) {
            Rule rule{static_cast<NonterminalId>(first + uniform_below(rng, count)), {}};
            if (bernoulli(rng, params.p_a)) rule.rhs.push_back(draw_letter());
            if (bernoulli(rng, params.p_y))
                rule.rhs.push_back(Symbol::nonterminal(static_cast<NonterminalId>(uniform_below(rng, nts.size()))));
            if (bernoulli(rng, params.p_b)) rule.rhs.push_back(draw_letter());
            rules.push_back(std::move(rule));
        }
    }
    std::vector<bool> has_rule(nts.size(), false);
    for (const auto& r : rules) has_rule[r.lhs] = true;
    for (NonterminalId x = 0; x < nts.size(); ++x)
        if (!has_rule[x]) rules.push_back({x, {}});
    return GameGrammar(std::move(nts), alphabet, std::move(rules));
}

Instance gen_instance(const GenParams& params) {
    Nfa nfa = gen_nfa(params, mix_seed(params.seed));
    GameGrammar grammar = gen_grammar(params, mix_seed(params.seed ^ 0x6a09e667f3bcc908ULL), nfa.alphabet());
    SententialForm start{Symbol::nonterminal(0)};
    return Instance{std::move(nfa), std::move(grammar), std::move(start)};
}

std::string gen_metadata(const GenParams& p) {
    std::ostringstream out;
    out << "generated instance (rng mt19937_64, sub-seeds via splitmix64)\n";
    out << "seed=" << p.seed << '\n';
    out << "states=" << p.states << " letters=" << p.letters << " density=" << p.density
        << " final_fraction=" << p.final_fraction << " initial_final=" << (p.initial_final ? 1 : 0) << '\n';
    out << "refuter_nonterminals=" << p.refuter_nonterminals << " prover_nonterminals=" << p.prover_nonterminals
        << " refuter_rules=" << p.rules_for(Player::Refuter) << " prover_rules=" << p.rules_for(Player::Prover) << '\n';
    out << "p_a=" << p.p_a << " p_y=" << p.p_y << " p_b=" << p.p_b;
    return out.str();
}

std::string Combo::label() const {
    return std::to_string(states) + "/" + std::to_string(letters) + "/" + std::to_string(nonterminals);
}

Combo parse_combo(std::string_view text) {
    Combo c{};
    std::string s(text);
    std::replace(s.begin(), s.end(), '/', ' ');
    std::istringstream in(s);
    std::string rest;
    if (!(in >> c.states >> c.letters >> c.nonterminals) || (in >> rest) || c.states == 0 || c.letters == 0 ||
        c.nonterminals == 0)
        throw PreconditionError("combo must look like 5/5/10, got '" + std::string(text) + "'");
    return c;
}

} // namespace cfgames
