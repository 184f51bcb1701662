#pragma once

// Shared fixtures and independent oracles. Nothing here calls the library
// operation it is used to check.

#include "cfgames/automaton.hpp"
#include "cfgames/formula.hpp"
#include "cfgames/generator.hpp"
#include "cfgames/instance.hpp"
#include "cfgames/random.hpp"
#include "cfgames/solver.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace testing {

using namespace cfgames;

inline std::string example_path(const std::string& name) { return std::string(CFGAMES_SOURCE_DIR) + "/docs/examples/" + name; }

inline Instance running_example() { return load_instance(example_path("ab.game")); }

inline SententialForm form(const Instance& inst, const std::string& text) { return inst.grammar.parse_form(text); }

inline Box box_of(const Nfa& nfa, const std::string& word) {
    std::vector<std::string> letters;
    for (char c : word) letters.emplace_back(1, c);
    return word_box(nfa, letters);
}

inline Box box_from_pairs(std::size_t dim, std::initializer_list<std::pair<StateId, StateId>> pairs) {
    Box b(dim);
    for (auto [p, q] : pairs) b.set(p, q);
    return b;
}

// ---------------------------------------------------------------------------
// Relations as pair sets

using PairSet = std::set<std::pair<StateId, StateId>>;

inline PairSet pairs_of(const Box& b) {
    PairSet out;
    for (StateId p = 0; p < b.dim(); ++p)
        for (StateId q = 0; q < b.dim(); ++q)
            if (b.get(p, q)) out.insert({p, q});
    return out;
}

inline PairSet compose_pairs(const PairSet& r, const PairSet& s) {
    PairSet out;
    for (auto [p, m] : r)
        for (auto [m2, q] : s)
            if (m == m2) out.insert({p, q});
    return out;
}

// Subset simulation of the automaton, written against the transition list.
inline bool nfa_member(const Nfa& nfa, const std::vector<LetterId>& word) {
    std::set<StateId> cur{nfa.initial()};
    for (LetterId a : word) {
        std::set<StateId> next;
        for (const auto& t : nfa.transitions())
            if (t.letter == a && cur.count(t.from)) next.insert(t.to);
        cur = std::move(next);
    }
    return std::any_of(cur.begin(), cur.end(), [&](StateId q) {
        return std::find(nfa.finals().begin(), nfa.finals().end(), q) != nfa.finals().end();
    });
}

inline std::vector<LetterId> random_word(Rng& rng, std::size_t letters, std::size_t max_len) {
    std::vector<LetterId> w(uniform_below(rng, max_len + 1));
    for (auto& a : w) a = static_cast<LetterId>(uniform_below(rng, letters));
    return w;
}

inline Box random_box(Rng& rng, std::size_t dim) {
    Box b(dim);
    for (StateId p = 0; p < dim; ++p)
        for (StateId q = 0; q < dim; ++q)
            if (bernoulli(rng, 0.4)) b.set(p, q);
    return b;
}

inline Nfa random_nfa(Rng& rng, std::size_t states, std::size_t letters, double density = 1.5) {
    GenParams p;
    p.states = states;
    p.letters = letters;
    p.density = std::min(density, static_cast<double>(states));
    p.final_fraction = 0.5;
    return gen_nfa(p, rng());
}

// ---------------------------------------------------------------------------
// CNF oracles

using RawCnf = std::vector<std::vector<Box>>;

inline RawCnf raw_of(const Formula& f) {
    RawCnf out;
    for (const auto& c : f.clauses()) out.emplace_back(c.begin(), c.end());
    return out;
}

// Sorted, deduplicated, subset-minimal clause set.
inline std::set<std::set<Box>> minimal_clauses(const RawCnf& cnf) {
    std::vector<std::set<Box>> sets;
    for (const auto& c : cnf) sets.emplace_back(c.begin(), c.end());
    std::set<std::set<Box>> out;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < sets.size() && !dominated; ++j) {
            if (i == j) continue;
            const bool sub = std::includes(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end());
            if (sub && (sets[i] != sets[j] || j < i)) dominated = true;
        }
        if (!dominated) out.insert(sets[i]);
    }
    return out;
}

inline std::set<std::set<Box>> clause_sets(const Formula& f) {
    std::set<std::set<Box>> out;
    for (const auto& c : f.clauses()) out.emplace(c.begin(), c.end());
    return out;
}

// Formula trees for the recursive definition of composition.
struct Tree {
    enum Kind { Leaf, And, Or } kind = And;
    Box leaf;
    std::vector<Tree> kids;
};

inline Tree tree_of(const RawCnf& cnf) {
    Tree t{Tree::And, {}, {}};
    for (const auto& c : cnf) {
        Tree clause{Tree::Or, {}, {}};
        for (const auto& b : c) clause.kids.push_back(Tree{Tree::Leaf, b, {}});
        t.kids.push_back(std::move(clause));
    }
    return t;
}

inline bool tree_false(const Tree& t) {
    switch (t.kind) {
    case Tree::Leaf: return false;
    case Tree::And: return std::any_of(t.kids.begin(), t.kids.end(), tree_false);
    case Tree::Or: return std::all_of(t.kids.begin(), t.kids.end(), tree_false);
    }
    return false;
}

// rho;(G1 * G2) = rho;G1 * rho;G2.
inline Tree prefix_tree(const Box& rho, const Tree& g) {
    if (g.kind == Tree::Leaf) return Tree{Tree::Leaf, compose_box(rho, g.leaf), {}};
    Tree out{g.kind, {}, {}};
    for (const auto& k : g.kids) out.kids.push_back(prefix_tree(rho, k));
    return out;
}

// (F1 * F2);G = F1;G * F2;G, with the leaf case handed to prefix_tree.
inline Tree compose_tree(const Tree& f, const Tree& g) {
    if (f.kind == Tree::Leaf) return prefix_tree(f.leaf, g);
    Tree out{f.kind, {}, {}};
    for (const auto& k : f.kids) out.kids.push_back(compose_tree(k, g));
    return out;
}

// Plain distribution to CNF without any simplification.
inline RawCnf cnf_of(const Tree& t) {
    switch (t.kind) {
    case Tree::Leaf: return {{t.leaf}};
    case Tree::And: {
        RawCnf out;
        for (const auto& k : t.kids) {
            auto sub = cnf_of(k);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
    }
    case Tree::Or: {
        RawCnf acc{{}};
        for (const auto& k : t.kids) {
            auto sub = cnf_of(k);
            RawCnf next;
            for (const auto& a : acc)
                for (const auto& b : sub) {
                    auto c = a;
                    c.insert(c.end(), b.begin(), b.end());
                    next.push_back(std::move(c));
                }
            acc = std::move(next);
        }
        return acc;
    }
    }
    return {};
}

// Composition by the recursive definition, FALSE absorbing on both sides.
inline std::set<std::set<Box>> oracle_compose(const Formula& f, const Formula& g) {
    const Tree tf = tree_of(raw_of(f)), tg = tree_of(raw_of(g));
    if (tree_false(tf) || tree_false(tg)) return {{}};
    return minimal_clauses(cnf_of(compose_tree(tf, tg)));
}

// Truth tables over the boxes of the given formulas.
inline std::vector<Box> atoms_of(std::initializer_list<const Formula*> fs) {
    std::set<Box> s;
    for (const auto* f : fs)
        for (const auto& c : f->clauses()) s.insert(c.begin(), c.end());
    return {s.begin(), s.end()};
}

inline bool eval_cnf(const Formula& f, const std::vector<Box>& atoms, unsigned mask) {
    return std::all_of(f.clauses().begin(), f.clauses().end(), [&](const Clause& c) {
        return std::any_of(c.begin(), c.end(), [&](const Box& b) {
            auto i = std::lower_bound(atoms.begin(), atoms.end(), b) - atoms.begin();
            return ((mask >> i) & 1U) != 0;
        });
    });
}

inline bool tt_implies(const Formula& f, const Formula& g) {
    const auto atoms = atoms_of({&f, &g});
    for (unsigned m = 0; m < (1U << atoms.size()); ++m)
        if (eval_cnf(f, atoms, m) && !eval_cnf(g, atoms, m)) return false;
    return true;
}

inline bool tt_equivalent(const Formula& f, const Formula& g) { return tt_implies(f, g) && tt_implies(g, f); }

inline Formula random_formula(Rng& rng, const std::vector<Box>& pool, std::size_t max_clauses = 3,
                              std::size_t max_width = 3) {
    std::vector<Clause> raw(1 + uniform_below(rng, max_clauses));
    for (auto& c : raw) {
        const std::size_t w = 1 + uniform_below(rng, max_width);
        for (std::size_t i = 0; i < w; ++i) c.push_back(pool[uniform_below(rng, pool.size())]);
        c = make_clause(std::move(c));
    }
    return normalize(std::move(raw));
}

// ---------------------------------------------------------------------------
// Games

inline GenParams small_params(std::uint64_t seed, std::size_t max_states = 4) {
    GenParams p;
    p.states = 2 + seed % (max_states - 1);
    p.letters = 2;
    p.refuter_nonterminals = 2;
    p.prover_nonterminals = 2;
    p.seed = seed;
    return p;
}

// Sparser automata with fewer final states, so both players win often.
inline GenParams varied_params(std::uint64_t seed) {
    GenParams p = small_params(seed);
    p.density = seed % 2 ? 1.0 : 2.0;
    p.final_fraction = seed % 3 ? 0.25 : 0.5;
    return p;
}

// Non-terminals from which the refuter can force a terminal word, by the
// usual AND-OR attractor on the non-terminal graph.
inline std::vector<bool> termination_attractor(const GameGrammar& g) {
    std::vector<bool> in(g.num_nonterminals(), false);
    auto finished_rule = [&](RuleId r) {
        for (const auto& s : g.rule(r).rhs)
            if (s.is_nonterminal() && !in[s.index]) return false;
        return true;
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (NonterminalId x = 0; x < g.num_nonterminals(); ++x) {
            if (in[x]) continue;
            auto rs = g.rules_for(x);
            const bool ok = g.owner(x) == Player::Refuter ? std::any_of(rs.begin(), rs.end(), finished_rule)
                                                          : std::all_of(rs.begin(), rs.end(), finished_rule);
            if (ok) in[x] = changed = true;
        }
    }
    return in;
}

inline bool oracle_forces_infinite(const GameGrammar& g, const SententialForm& f) {
    const auto att = termination_attractor(g);
    return std::any_of(f.begin(), f.end(), [&](const Symbol& s) { return s.is_nonterminal() && !att[s.index]; });
}

// Random sentential form of length 1..max_len over the grammar's symbols.
inline SententialForm random_form(Rng& rng, const GameGrammar& g, std::size_t max_len = 4) {
    SententialForm f(1 + uniform_below(rng, max_len));
    for (auto& s : f) {
        if (bernoulli(rng, 0.5)) s = Symbol::terminal(static_cast<std::uint32_t>(uniform_below(rng, g.num_terminals())));
        else s = Symbol::nonterminal(static_cast<NonterminalId>(uniform_below(rng, g.num_nonterminals())));
    }
    return f;
}

} // namespace testing
