#include "cfgames/cachat.hpp"

#include "cfgames/errors.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <map>
#include <unordered_map>

namespace cfgames {

bool StateSet::subset_of(const StateSet& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
        if (words_[i] & ~other.words_[i]) return false;
    return true;
}

StateSet& StateSet::operator|=(const StateSet& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
}

std::vector<std::size_t> StateSet::members() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < words_.size(); ++i)
        for (std::uint64_t w = words_[i]; w; w &= w - 1) out.push_back(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
    return out;
}

std::size_t StateSet::hash() const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto w : words_) h = (h ^ w) * 1099511628211ULL;
    return h;
}

std::size_t PAfa::transition_count() const {
    std::size_t n = 0;
    for (const auto& t : trans) n += t.size();
    return n;
}

namespace {

// Keeps only subset-minimal sets: a smaller successor set is an easier
// obligation, so supersets never change acceptance.
bool antichain_insert(std::vector<StateSet>& sets, StateSet s) {
    for (const auto& t : sets)
        if (t.subset_of(s)) return false;
    std::erase_if(sets, [&](const StateSet& t) { return s.subset_of(t); });
    sets.push_back(std::move(s));
    return true;
}

std::vector<StateSet> union_product(const std::vector<StateSet>& lhs, const std::vector<StateSet>& rhs) {
    std::vector<StateSet> out;
    for (const auto& a : lhs)
        for (const auto& b : rhs) {
            StateSet u = a;
            u |= b;
            antichain_insert(out, std::move(u));
        }
    return out;
}

// Run sets p =>u S, memoized per (state, word, offset).
class Runner {
public:
    Runner(const PAfa& afa, const std::vector<std::vector<std::uint32_t>>& words, const Deadline& deadline)
        : afa_(afa), words_(words), deadline_(deadline) {
        max_len_ = 0;
        for (const auto& w : words_) max_len_ = std::max(max_len_, w.size());
    }

    const std::vector<StateSet>& runs(std::uint32_t q, std::size_t word, std::size_t off) {
        const std::uint64_t key = (static_cast<std::uint64_t>(q) * words_.size() + word) * (max_len_ + 1) + off;
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        if ((++calls_ & 1023U) == 0) deadline_.check();
        std::vector<StateSet> out;
        const auto& w = words_[word];
        if (off == w.size()) {
            StateSet self(afa_.num_states);
            self.insert(q);
            out.push_back(std::move(self));
        } else {
            for (const auto& target : afa_.trans[q * afa_.num_symbols + w[off]])
                for (auto& s : runs_from_set(target, word, off + 1)) antichain_insert(out, std::move(s));
        }
        return memo_.emplace(key, std::move(out)).first->second;
    }

    std::vector<StateSet> runs_from_set(const StateSet& from, std::size_t word, std::size_t off) {
        std::vector<StateSet> acc{StateSet(afa_.num_states)};
        for (std::size_t q : from.members()) {
            const auto& r = runs(static_cast<std::uint32_t>(q), word, off);
            if (r.empty()) return {};
            acc = union_product(acc, r);
        }
        return acc;
    }

private:
    const PAfa& afa_;
    const std::vector<std::vector<std::uint32_t>>& words_;
    const Deadline& deadline_;
    std::size_t max_len_;
    std::size_t calls_ = 0;
    std::unordered_map<std::uint64_t, std::vector<StateSet>> memo_;
};

std::uint32_t control_of(std::size_t dfa_state, Player owner) {
    return static_cast<std::uint32_t>(2 * dfa_state + (owner == Player::Prover ? 1 : 0));
}

std::vector<LetterId> terminal_letters(const GameGrammar& grammar, const Nfa& dfa) {
    std::vector<LetterId> out;
    for (const auto& t : grammar.terminals()) {
        auto l = dfa.letter_index(t);
        if (!l) throw ValidationError("terminal '" + t + "' is not in the automaton alphabet");
        out.push_back(*l);
    }
    return out;
}

} // namespace

Encoding encode(const Instance& instance, const CachatOptions& options) {
    if (auto problems = validate(instance.grammar); !problems.empty()) throw ValidationError(problems.front());
    const auto& g = instance.grammar;
    Nfa dfa = options.minimize ? minimize(determinize(instance.nfa)) : determinize(instance.nfa);
    Encoding enc{Pds{std::move(dfa)}, PAfa{}};
    Pds& pds = enc.pds;
    const auto letters = terminal_letters(g, pds.dfa);
    pds.num_terminals = g.num_terminals();
    pds.num_symbols = g.num_terminals() + g.num_nonterminals();
    pds.num_controls = 2 * pds.dfa.num_states();
    pds.moves.resize(pds.num_controls * pds.num_symbols);
    auto stack_symbol = [&](Symbol s) {
        return static_cast<std::uint32_t>(s.is_terminal() ? s.index : pds.num_terminals + s.index);
    };

    for (std::size_t d = 0; d < pds.dfa.num_states(); ++d) {
        for (Player o : {Player::Refuter, Player::Prover}) {
            const std::uint32_t p = control_of(d, o);
            pds.control_owner.resize(pds.num_controls);
            pds.control_owner[p] = o;
            for (std::size_t t = 0; t < pds.num_terminals; ++t) {
                auto succ = pds.dfa.successors(static_cast<StateId>(d), letters[t]);
                if (succ.size() != 1) throw InvariantError("determinized automaton is not complete");
                pds.moves[p * pds.num_symbols + t].push_back({control_of(succ.front(), o), {}});
            }
            for (NonterminalId x = 0; x < g.num_nonterminals(); ++x) {
                const std::size_t gamma = pds.num_terminals + x;
                auto& out = pds.moves[p * pds.num_symbols + gamma];
                if (g.owner(x) != o) {
                    out.push_back({control_of(d, opponent(o)), {static_cast<std::uint32_t>(gamma)}});
                    continue;
                }
                for (RuleId r : g.rules_for(x)) {
                    Pds::Move m{p, {}};
                    for (Symbol s : g.rule(r).rhs) m.push.push_back(stack_symbol(s));
                    out.push_back(std::move(m));
                }
            }
        }
    }

    PAfa& afa = enc.afa;
    afa.num_states = pds.num_controls;
    afa.num_symbols = pds.num_symbols;
    afa.trans.resize(afa.num_states * afa.num_symbols);
    afa.accepting.resize(afa.num_states);
    for (std::size_t d = 0; d < pds.dfa.num_states(); ++d) {
        const bool target = options.predicate == PredicateKind::Reject ? !pds.dfa.is_final(static_cast<StateId>(d))
                                                                       : pds.dfa.is_final(static_cast<StateId>(d));
        for (Player o : {Player::Refuter, Player::Prover}) afa.accepting[control_of(d, o)] = target;
    }
    return enc;
}

Configuration make_config(const Instance& instance, const Pds& pds, std::span<const Symbol> form) {
    const auto letters = terminal_letters(instance.grammar, pds.dfa);
    Configuration c{};
    auto split = leftmost_split(form);
    const std::size_t prefix_len = split ? split->position : 0;
    StateId d = pds.dfa.initial();
    for (std::size_t i = 0; i < prefix_len; ++i) d = pds.dfa.successors(d, letters[form[i].index]).front();
    c.control = control_of(d, split ? instance.grammar.owner(split->head) : Player::Refuter);
    for (std::size_t i = prefix_len; i < form.size(); ++i)
        c.stack.push_back(static_cast<std::uint32_t>(form[i].is_terminal() ? form[i].index
                                                                            : pds.num_terminals + form[i].index));
    return c;
}

SaturationStats saturate(const Pds& pds, PAfa& afa, const Deadline& deadline) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::vector<std::uint32_t>> words;
    std::map<std::vector<std::uint32_t>, std::size_t> word_ids;
    std::vector<std::vector<std::size_t>> move_words(pds.moves.size());
    for (std::size_t k = 0; k < pds.moves.size(); ++k) {
        for (const auto& m : pds.moves[k]) {
            auto [it, fresh] = word_ids.emplace(m.push, words.size());
            if (fresh) words.push_back(m.push);
            move_words[k].push_back(it->second);
        }
    }

    SaturationStats stats;
    stats.dfa_states = pds.dfa.num_states();
    stats.control_states = pds.num_controls;
    while (true) {
        deadline.check();
        ++stats.rounds;
        Runner runner(afa, words, deadline);
        auto next = afa.trans;
        bool changed = false;
        for (std::size_t p = 0; p < pds.num_controls; ++p) {
            for (std::size_t gamma = 0; gamma < pds.num_symbols; ++gamma) {
                const std::size_t k = p * pds.num_symbols + gamma;
                const auto& moves = pds.moves[k];
                if (moves.empty()) continue;
                if (pds.control_owner[p] == Player::Refuter) {
                    for (std::size_t i = 0; i < moves.size(); ++i)
                        for (const auto& s : runner.runs(moves[i].target, move_words[k][i], 0))
                            changed |= antichain_insert(next[k], s);
                } else {
                    std::vector<StateSet> acc{StateSet(afa.num_states)};
                    for (std::size_t i = 0; i < moves.size() && !acc.empty(); ++i)
                        acc = union_product(acc, runner.runs(moves[i].target, move_words[k][i], 0));
                    for (auto& s : acc) changed |= antichain_insert(next[k], std::move(s));
                }
            }
        }
        afa.trans = std::move(next);
        if (!changed) break;
    }
    stats.transitions = afa.transition_count();
    stats.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return stats;
}

bool afa_accepts(const PAfa& afa, const Configuration& config) {
    std::vector<std::vector<std::uint32_t>> words{config.stack};
    Deadline none;
    Runner runner(afa, words, none);
    for (const auto& s : runner.runs(config.control, 0, 0)) {
        auto members = s.members();
        if (std::all_of(members.begin(), members.end(), [&](std::size_t q) { return afa.accepting[q]; })) return true;
    }
    return false;
}

CachatResult cachat_solve(const Instance& instance, std::span<const Symbol> form, const CachatOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    auto enc = encode(instance, options);
    auto config = make_config(instance, enc.pds, form);
    CachatResult result{false, saturate(enc.pds, enc.afa, options.deadline)};
    result.refuter_wins = afa_accepts(enc.afa, config);
    result.stats.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

bool cachat_refuter_wins(const Instance& instance, std::span<const Symbol> form, const CachatOptions& options) {
    return cachat_solve(instance, form, options).refuter_wins;
}

} // namespace cfgames
