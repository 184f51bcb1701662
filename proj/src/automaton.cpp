#include "cfgames/automaton.hpp"

#include "cfgames/errors.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <set>
#include <unordered_set>

namespace cfgames {

Nfa::Nfa(std::vector<std::string> state_names, std::vector<std::string> alphabet, StateId initial,
         std::vector<StateId> finals, std::vector<Transition> transitions)
    : state_names_(std::move(state_names)),
      alphabet_(std::move(alphabet)),
      initial_(initial),
      finals_(std::move(finals)),
      transitions_(std::move(transitions)) {
    const auto n = state_names_.size();
    if (n == 0) throw ValidationError("automaton needs at least one state");
    if (initial_ >= n) throw ValidationError("initial state index out of range");
    {
        std::set<std::string> seen(state_names_.begin(), state_names_.end());
        if (seen.size() != n) throw ValidationError("duplicate state name");
        std::set<std::string> letters(alphabet_.begin(), alphabet_.end());
        if (letters.size() != alphabet_.size()) throw ValidationError("duplicate letter");
    }
    std::sort(finals_.begin(), finals_.end());
    finals_.erase(std::unique(finals_.begin(), finals_.end()), finals_.end());
    final_mask_.assign(n, false);
    for (StateId f : finals_) {
        if (f >= n) throw ValidationError("final state index out of range");
        final_mask_[f] = true;
    }
    std::sort(transitions_.begin(), transitions_.end());
    transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());
    succ_.assign(n * alphabet_.size(), {});
    for (const auto& t : transitions_) {
        if (t.from >= n || t.to >= n) throw ValidationError("transition endpoint out of range");
        if (t.letter >= alphabet_.size()) throw ValidationError("transition letter not in alphabet");
        succ_[static_cast<std::size_t>(t.from) * alphabet_.size() + t.letter].push_back(t.to);
    }
}

std::optional<LetterId> Nfa::letter_index(std::string_view name) const {
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
        if (alphabet_[i] == name) return static_cast<LetterId>(i);
    return std::nullopt;
}

std::optional<StateId> Nfa::state_index(std::string_view name) const {
    for (std::size_t i = 0; i < state_names_.size(); ++i)
        if (state_names_[i] == name) return static_cast<StateId>(i);
    return std::nullopt;
}

bool Nfa::accepts(std::span<const LetterId> word) const {
    std::vector<bool> current(num_states(), false);
    current[initial_] = true;
    for (LetterId a : word) {
        if (a >= num_letters()) throw PreconditionError("letter not in alphabet");
        std::vector<bool> next(num_states(), false);
        for (StateId q = 0; q < num_states(); ++q)
            if (current[q])
                for (StateId r : successors(q, a)) next[r] = true;
        current = std::move(next);
    }
    for (StateId f : finals_)
        if (current[f]) return true;
    return false;
}

bool Nfa::is_deterministic() const {
    return std::all_of(succ_.begin(), succ_.end(), [](const auto& s) { return s.size() == 1; });
}

// ---------------------------------------------------------------------------

Box::Box(std::size_t dim) {
    if (dim == 0 || dim > kMaxBoxStates)
        throw PreconditionError("box dimension must be in [1, " + std::to_string(kMaxBoxStates) + "], got " +
                                std::to_string(dim));
    dim_ = static_cast<std::uint8_t>(dim);
}

void Box::set(StateId from, StateId to, bool present) {
    const Row bit = static_cast<Row>(1U << to);
    rows_[from] = present ? static_cast<Row>(rows_[from] | bit) : static_cast<Row>(rows_[from] & ~bit);
}

bool Box::empty_relation() const noexcept {
    return std::all_of(rows_.begin(), rows_.end(), [](Row r) { return r == 0; });
}

std::size_t Box::pair_count() const noexcept {
    std::size_t n = 0;
    for (Row r : rows_) n += static_cast<std::size_t>(std::popcount(r));
    return n;
}

std::size_t Box::hash() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ dim_;
    for (std::size_t q = 0; q < dim_; ++q) {
        h ^= rows_[q];
        h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
}

std::strong_ordering operator<=>(const Box& lhs, const Box& rhs) noexcept {
    if (auto c = lhs.dim_ <=> rhs.dim_; c != 0) return c;
    for (std::size_t q = 0; q < lhs.dim_; ++q) {
        const Box::Row diff = lhs.rows_[q] ^ rhs.rows_[q];
        if (diff == 0) continue;
        // First differing entry of this row decides; the side holding the pair is larger.
        const int col = std::countr_zero(diff);
        return ((lhs.rows_[q] >> col) & 1U) ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    return std::strong_ordering::equal;
}

Box identity_box(std::size_t dim) {
    Box box(dim);
    for (StateId q = 0; q < dim; ++q) box.set(q, q);
    return box;
}

Box letter_box(const Nfa& nfa, LetterId letter) {
    if (letter >= nfa.num_letters()) throw PreconditionError("letter not in alphabet");
    Box box(nfa.num_states());
    for (StateId q = 0; q < nfa.num_states(); ++q)
        for (StateId r : nfa.successors(q, letter)) box.set(q, r);
    return box;
}

Box letter_box(const Nfa& nfa, std::string_view letter) {
    auto idx = nfa.letter_index(letter);
    if (!idx) throw PreconditionError("unknown letter '" + std::string(letter) + "'");
    return letter_box(nfa, *idx);
}

Box compose_box(const Box& lhs, const Box& rhs) {
    if (lhs.dim_ != rhs.dim_) throw PreconditionError("box dimension mismatch");
    Box out;
    out.dim_ = lhs.dim_;
    for (std::size_t q = 0; q < lhs.dim_; ++q) {
        Box::Row row = lhs.rows_[q];
        Box::Row acc = 0;
        while (row != 0) {
            const int mid = std::countr_zero(row);
            acc = static_cast<Box::Row>(acc | rhs.rows_[static_cast<std::size_t>(mid)]);
            row = static_cast<Box::Row>(row & (row - 1));
        }
        out.rows_[q] = acc;
    }
    return out;
}

Box word_box(const Nfa& nfa, std::span<const LetterId> word) {
    Box acc = identity_box(nfa.num_states());
    for (LetterId a : word) acc = compose_box(acc, letter_box(nfa, a));
    return acc;
}

Box word_box(const Nfa& nfa, std::span<const std::string> word) {
    Box acc = identity_box(nfa.num_states());
    for (const auto& a : word) acc = compose_box(acc, letter_box(nfa, a));
    return acc;
}

bool box_rejecting(const Nfa& nfa, const Box& box) {
    if (box.dim() != nfa.num_states()) throw PreconditionError("box dimension does not match automaton");
    for (StateId f : nfa.finals())
        if (box.get(nfa.initial(), f)) return false;
    return true;
}

bool box_accepting(const Nfa& nfa, const Box& box) { return !box_rejecting(nfa, box); }

std::vector<Box> monoid_closure(const Nfa& nfa, std::size_t limit) {
    std::vector<Box> generators;
    for (LetterId a = 0; a < nfa.num_letters(); ++a) generators.push_back(letter_box(nfa, a));

    std::unordered_set<Box, BoxHash> seen;
    std::deque<Box> work;
    auto push = [&](const Box& b) {
        if (seen.insert(b).second) work.push_back(b);
    };
    push(identity_box(nfa.num_states()));
    for (const auto& g : generators) push(g);
    // Right-multiplying by generators reaches every product of generators.
    while (!work.empty()) {
        if (seen.size() > limit) throw PreconditionError("transition monoid exceeds " + std::to_string(limit) + " boxes");
        Box b = work.front();
        work.pop_front();
        for (const auto& g : generators) push(compose_box(b, g));
    }
    std::vector<Box> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::string subset_name(const Nfa& nfa, const std::vector<StateId>& subset) {
    std::string name = "{";
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (i) name += ',';
        name += nfa.state_names()[subset[i]];
    }
    return name + "}";
}

} // namespace

Nfa determinize(const Nfa& nfa) {
    std::map<std::vector<StateId>, StateId> index;
    std::vector<std::vector<StateId>> subsets;
    std::vector<Transition> trans;
    auto intern = [&](std::vector<StateId> s) {
        auto [it, fresh] = index.emplace(s, static_cast<StateId>(subsets.size()));
        if (fresh) subsets.push_back(std::move(s));
        return it->second;
    };
    intern({nfa.initial()});
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        for (LetterId a = 0; a < nfa.num_letters(); ++a) {
            std::vector<bool> mark(nfa.num_states(), false);
            for (StateId q : subsets[i])
                for (StateId r : nfa.successors(q, a)) mark[r] = true;
            std::vector<StateId> post;
            for (StateId r = 0; r < nfa.num_states(); ++r)
                if (mark[r]) post.push_back(r);
            const StateId target = intern(std::move(post));
            trans.push_back({static_cast<StateId>(i), a, target});
        }
    }
    std::vector<std::string> names;
    std::vector<StateId> finals;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        names.push_back(subset_name(nfa, subsets[i]));
        if (std::any_of(subsets[i].begin(), subsets[i].end(), [&](StateId q) { return nfa.is_final(q); }))
            finals.push_back(static_cast<StateId>(i));
    }
    return Nfa(std::move(names), nfa.alphabet(), 0, std::move(finals), std::move(trans));
}

Nfa minimize(const Nfa& dfa) {
    if (!dfa.is_deterministic()) throw PreconditionError("minimize requires a complete deterministic automaton");
    const std::size_t k = dfa.num_letters();
    auto delta = [&](StateId q, LetterId a) { return dfa.successors(q, a)[0]; };

    // Reachable part, in BFS order so the output numbering is canonical.
    std::vector<StateId> order;
    std::vector<int> bfs_index(dfa.num_states(), -1);
    order.push_back(dfa.initial());
    bfs_index[dfa.initial()] = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (LetterId a = 0; a < k; ++a) {
            StateId r = delta(order[i], a);
            if (bfs_index[r] < 0) {
                bfs_index[r] = static_cast<int>(order.size());
                order.push_back(r);
            }
        }

    // Moore refinement: block ids are recomputed from (block, successor blocks) signatures.
    const std::size_t n = order.size();
    std::vector<std::size_t> block(n);
    for (std::size_t i = 0; i < n; ++i) block[i] = dfa.is_final(order[i]) ? 1 : 0;
    std::size_t num_blocks = 0;
    while (true) {
        std::map<std::vector<std::size_t>, std::size_t> sig_ids;
        std::vector<std::size_t> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::size_t> sig{block[i]};
            for (LetterId a = 0; a < k; ++a) sig.push_back(block[static_cast<std::size_t>(bfs_index[delta(order[i], a)])]);
            auto [it, fresh] = sig_ids.emplace(std::move(sig), sig_ids.size());
            next[i] = it->second;
        }
        const bool stable = sig_ids.size() == num_blocks;
        num_blocks = sig_ids.size();
        block = std::move(next);
        if (stable) break;
    }

    // Renumber blocks by first BFS occurrence.
    std::vector<int> renum(num_blocks, -1);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (renum[block[i]] < 0) renum[block[i]] = static_cast<int>(count++);

    std::vector<std::string> names(count);
    std::vector<StateId> finals;
    std::vector<Transition> trans;
    std::vector<bool> done(count, false);
    for (std::size_t i = 0; i < n; ++i) {
        const auto b = static_cast<StateId>(renum[block[i]]);
        if (done[b]) continue;
        done[b] = true;
        names[b] = "m" + std::to_string(b);
        if (dfa.is_final(order[i])) finals.push_back(b);
        for (LetterId a = 0; a < k; ++a) {
            auto target = static_cast<StateId>(renum[block[static_cast<std::size_t>(bfs_index[delta(order[i], a)])]]);
            trans.push_back({b, a, target});
        }
    }
    return Nfa(std::move(names), dfa.alphabet(), 0, std::move(finals), std::move(trans));
}

std::string render_box(const Nfa& nfa, const Box& box) {
    std::string out = "{";
    bool first = true;
    for (StateId q = 0; q < box.dim(); ++q)
        for (StateId r = 0; r < box.dim(); ++r)
            if (box.get(q, r)) {
                if (!first) out += ',';
                first = false;
                out += "(" + nfa.state_names()[q] + "," + nfa.state_names()[r] + ")";
            }
    return out + "}";
}

} // namespace cfgames
