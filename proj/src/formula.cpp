#include "cfgames/formula.hpp"

#include "cfgames/errors.hpp"

#include <algorithm>
#include <cstdint>

namespace cfgames {

namespace {

// Bloom-style fingerprint: K subset of H implies sig(K) subset of sig(H).
std::uint64_t signature(const Clause& clause) {
    std::uint64_t sig = 0;
    for (const auto& b : clause) sig |= std::uint64_t{1} << (b.hash() & 63U);
    return sig;
}

bool clause_subset(const Clause& small, const Clause& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

Clause clause_union(const Clause& a, const Clause& b) {
    Clause out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

void check_dims(const Formula& a, const Formula& b) {
    const auto da = a.dim(), db = b.dim();
    if (da != 0 && db != 0 && da != db) throw PreconditionError("formula box dimensions differ");
}

} // namespace

Clause make_clause(std::vector<Box> boxes) {
    std::sort(boxes.begin(), boxes.end());
    boxes.erase(std::unique(boxes.begin(), boxes.end()), boxes.end());
    return boxes;
}

Formula Formula::bottom() { return Formula(std::vector<Clause>{Clause{}}); }

Formula Formula::atom(const Box& box) { return Formula(std::vector<Clause>{Clause{box}}); }

Formula Formula::normalize(std::vector<Clause> raw) {
    for (auto& c : raw) {
        if (!std::is_sorted(c.begin(), c.end()) || std::adjacent_find(c.begin(), c.end()) != c.end()) c = make_clause(std::move(c));
    }
    std::sort(raw.begin(), raw.end(), [](const Clause& a, const Clause& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());

    std::vector<Clause> kept;
    std::vector<std::uint64_t> sigs;
    for (auto& c : raw) {
        // Shorter clauses come first, so only kept clauses can absorb c.
        const auto sig = signature(c);
        bool absorbed = false;
        for (std::size_t i = 0; i < kept.size() && !absorbed; ++i)
            absorbed = (sigs[i] & ~sig) == 0 && clause_subset(kept[i], c);
        if (!absorbed) {
            sigs.push_back(sig);
            kept.push_back(std::move(c));
        }
    }
    std::sort(kept.begin(), kept.end());
    return Formula(std::move(kept));
}

std::size_t Formula::dim() const noexcept {
    for (const auto& c : clauses_)
        if (!c.empty()) return c.front().dim();
    return 0;
}

std::size_t Formula::weight() const noexcept {
    std::size_t w = 0;
    for (const auto& c : clauses_) w += c.size();
    return w;
}

std::size_t Formula::hash() const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& c : clauses_) {
        h ^= c.size() + 0x51ed27ULL + (h << 6) + (h >> 2);
        for (const auto& b : c) h ^= b.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

Formula conj(const Formula& lhs, const Formula& rhs) {
    check_dims(lhs, rhs);
    if (lhs.is_false() || rhs.is_true()) return lhs;
    if (rhs.is_false() || lhs.is_true()) return rhs;
    std::vector<Clause> raw = lhs.clauses();
    raw.insert(raw.end(), rhs.clauses().begin(), rhs.clauses().end());
    return Formula::normalize(std::move(raw));
}

Formula disj(const Formula& lhs, const Formula& rhs) {
    check_dims(lhs, rhs);
    if (lhs.is_true() || rhs.is_false()) return lhs;
    if (rhs.is_true() || lhs.is_false()) return rhs;
    std::vector<Clause> raw;
    raw.reserve(lhs.size() * rhs.size());
    for (const auto& k : lhs.clauses())
        for (const auto& h : rhs.clauses()) raw.push_back(clause_union(k, h));
    return Formula::normalize(std::move(raw));
}

Formula prefix_compose(const Box& prefix, const Formula& formula) {
    std::vector<Clause> raw;
    raw.reserve(formula.size());
    for (const auto& h : formula.clauses()) {
        Clause c;
        c.reserve(h.size());
        for (const auto& t : h) c.push_back(compose_box(prefix, t));
        raw.push_back(make_clause(std::move(c)));
    }
    return Formula::normalize(std::move(raw));
}

Formula compose(const Formula& lhs, const Formula& rhs) {
    check_dims(lhs, rhs);
    if (lhs.is_false() || rhs.is_false()) return Formula::bottom();
    std::vector<Clause> raw;
    for (const auto& k : lhs.clauses()) {
        Formula acc = Formula::bottom();
        for (const auto& rho : k) {
            acc = disj(acc, prefix_compose(rho, rhs));
            if (acc.is_true()) break;
        }
        raw.insert(raw.end(), acc.clauses().begin(), acc.clauses().end());
    }
    return Formula::normalize(std::move(raw));
}

bool implies(const Formula& lhs, const Formula& rhs) {
    check_dims(lhs, rhs);
    return std::all_of(rhs.clauses().begin(), rhs.clauses().end(), [&](const Clause& h) {
        return std::any_of(lhs.clauses().begin(), lhs.clauses().end(),
                           [&](const Clause& k) { return clause_subset(k, h); });
    });
}

bool equivalent(const Formula& lhs, const Formula& rhs) {
    check_dims(lhs, rhs);
    return lhs == rhs;
}

BoxPredicate make_predicate(const Nfa& nfa, PredicateKind kind) {
    if (nfa.num_states() > kMaxBoxStates) throw PreconditionError("automaton too large for boxes");
    Box::Row finals = 0;
    for (StateId f : nfa.finals()) finals = static_cast<Box::Row>(finals | (1U << f));
    const StateId init = nfa.initial();
    if (kind == PredicateKind::Reject) return [=](const Box& b) { return (b.row(init) & finals) == 0; };
    return [=](const Box& b) { return (b.row(init) & finals) != 0; };
}

bool is_rejecting(const Formula& formula, const BoxPredicate& pred) {
    return std::all_of(formula.clauses().begin(), formula.clauses().end(),
                       [&](const Clause& c) { return std::any_of(c.begin(), c.end(), pred); });
}

const Box& ChoiceFunction::at(const Clause& clause) const {
    const auto& cs = formula.clauses();
    auto it = std::lower_bound(cs.begin(), cs.end(), clause);
    if (it == cs.end() || *it != clause) throw PreconditionError("clause not in the domain of the choice function");
    return chosen[static_cast<std::size_t>(it - cs.begin())];
}

std::vector<Box> ChoiceFunction::image() const { return make_clause(chosen); }

std::optional<ChoiceFunction> pick_choice(const Formula& formula, const BoxPredicate& pred, const BoxRank& rank) {
    ChoiceFunction out{formula, {}};
    for (const auto& clause : formula.clauses()) {
        const Box* best = nullptr;
        std::size_t best_rank = 0;
        for (const auto& b : clause) {
            if (!pred(b)) continue;
            const std::size_t r = rank ? rank(b) : 0;
            // Clauses are sorted, so the first box of minimal rank is canonical-least.
            if (!best || r < best_rank) {
                best = &b;
                best_rank = r;
            }
        }
        if (!best) return std::nullopt;
        out.chosen.push_back(*best);
    }
    return out;
}

ChoiceFunction refine_choice(const ChoiceFunction& choice, const Formula& target) {
    check_dims(choice.formula, target);
    ChoiceFunction out{target, {}};
    const auto& source = choice.formula.clauses();
    for (const auto& h : target.clauses()) {
        auto it = std::find_if(source.begin(), source.end(), [&](const Clause& k) { return clause_subset(k, h); });
        if (it == source.end()) throw PreconditionError("refine_choice: source formula does not imply the target");
        out.chosen.push_back(choice.chosen[static_cast<std::size_t>(it - source.begin())]);
    }
    return out;
}

std::optional<ChoiceFunction> choice_within(const Formula& target, const std::vector<Box>& image) {
    ChoiceFunction out{target, {}};
    for (const auto& h : target.clauses()) {
        auto hit = std::find_if(h.begin(), h.end(), [&](const Box& b) {
            return std::binary_search(image.begin(), image.end(), b);
        });
        if (hit == h.end()) return std::nullopt;
        out.chosen.push_back(*hit);
    }
    return out;
}

void BoxNaming::add(const Box& box) {
    if (frozen_) throw PreconditionError("BoxNaming already frozen");
    boxes_.push_back(box);
}

void BoxNaming::add(const Formula& formula) {
    for (const auto& c : formula.clauses())
        for (const auto& b : c) add(b);
}

void BoxNaming::freeze() {
    boxes_ = make_clause(std::move(boxes_));
    names_.clear();
    for (std::size_t i = 0; i < boxes_.size(); ++i) names_.push_back("b" + std::to_string(i));
    frozen_ = true;
}

const std::string& BoxNaming::name(const Box& box) const {
    auto it = std::lower_bound(boxes_.begin(), boxes_.end(), box);
    if (!frozen_ || it == boxes_.end() || *it != box) throw PreconditionError("box has no name");
    return names_[static_cast<std::size_t>(it - boxes_.begin())];
}

std::string render_formula(const Formula& formula, const BoxNaming& naming) {
    std::string out = "{";
    for (std::size_t i = 0; i < formula.size(); ++i) {
        if (i) out += ',';
        out += '{';
        const auto& c = formula.clauses()[i];
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (j) out += ',';
            out += naming.name(c[j]);
        }
        out += '}';
    }
    return out + "}";
}

} // namespace cfgames
