#pragma once

#include "cfgames/automaton.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cfgames {

/// Disjunction of boxes, kept sorted and duplicate free.
using Clause = std::vector<Box>;

Clause make_clause(std::vector<Box> boxes);

/// Negation-free CNF over boxes in canonical form: an antichain of
/// subset-minimal clauses, sorted lexicographically. Two formulas are
/// logically equivalent iff they are equal.
///
/// TRUE is the empty clause set, FALSE is exactly { {} }.
class Formula {
public:
    /// TRUE.
    Formula() = default;

    static Formula top() { return Formula(); }
    static Formula bottom();
    static Formula atom(const Box& box);
    /// Absorbs every clause that is a superset of another and sorts.
    static Formula normalize(std::vector<Clause> raw);

    const std::vector<Clause>& clauses() const noexcept { return clauses_; }
    std::size_t size() const noexcept { return clauses_.size(); }
    bool is_false() const noexcept { return clauses_.size() == 1 && clauses_.front().empty(); }
    bool is_true() const noexcept { return clauses_.empty(); }
    /// Dimension of the boxes, 0 for TRUE and FALSE.
    std::size_t dim() const noexcept;
    /// Number of box occurrences over all clauses.
    std::size_t weight() const noexcept;

    std::size_t hash() const noexcept;

    friend bool operator==(const Formula&, const Formula&) = default;
    friend auto operator<=>(const Formula&, const Formula&) = default;

private:
    explicit Formula(std::vector<Clause> canonical) : clauses_(std::move(canonical)) {}

    std::vector<Clause> clauses_;
};

inline Formula atom(const Box& box) { return Formula::atom(box); }
inline Formula normalize(std::vector<Clause> raw) { return Formula::normalize(std::move(raw)); }

/// Clause-set union.
Formula conj(const Formula& lhs, const Formula& rhs);
/// Pairwise clause unions.
Formula disj(const Formula& lhs, const Formula& rhs);
/// Relational composition lifted to CNF. Each clause K of lhs contributes the
/// disjunction over rho in K of rho;rhs, so FALSE is absorbing on both sides.
Formula compose(const Formula& lhs, const Formula& rhs);
/// Every box of the formula pre-composed with `prefix`: {{prefix;t | t in H} | H}.
Formula prefix_compose(const Box& prefix, const Formula& formula);

/// lhs => rhs: every clause of rhs contains some clause of lhs.
bool implies(const Formula& lhs, const Formula& rhs);
bool equivalent(const Formula& lhs, const Formula& rhs);
inline bool is_false(const Formula& f) { return f.is_false(); }

using BoxPredicate = std::function<bool(const Box&)>;

enum class PredicateKind { Reject, Accept };

/// Reject: the box has no (initial, final) pair. Accept: its negation.
BoxPredicate make_predicate(const Nfa& nfa, PredicateKind kind);

/// The formula is satisfied when exactly the boxes satisfying `pred` are true.
bool is_rejecting(const Formula& formula, const BoxPredicate& pred);

/// A choice of one box per clause of `formula`; chosen[i] belongs to clause i.
struct ChoiceFunction {
    Formula formula;
    std::vector<Box> chosen;

    const Box& at(const Clause& clause) const;
    /// Sorted, duplicate free.
    std::vector<Box> image() const;
};

/// Preference among candidate boxes; smaller ranks first. Ties fall back to
/// the canonical box order.
using BoxRank = std::function<std::size_t(const Box&)>;

/// A choice function selecting only boxes that satisfy `pred`, or nullopt if
/// some clause has none.
std::optional<ChoiceFunction> pick_choice(const Formula& formula, const BoxPredicate& pred,
                                          const BoxRank& rank = nullptr);

/// Refinement along lhs => rhs: every clause H of rhs takes the choice of the
/// first clause K of lhs with K subset of H. Throws PreconditionError if the
/// implication does not hold.
ChoiceFunction refine_choice(const ChoiceFunction& choice, const Formula& target);

/// A choice function on `target` whose image lies inside `image` (sorted), if
/// every clause meets it. Picks the smallest box of each intersection.
std::optional<ChoiceFunction> choice_within(const Formula& target, const std::vector<Box>& image);

/// Stable display names b0, b1, ... assigned in canonical box order.
class BoxNaming {
public:
    void add(const Box& box);
    void add(const Formula& formula);
    /// Sorts and assigns names. Must run before name().
    void freeze();

    const std::string& name(const Box& box) const;
    const std::vector<Box>& boxes() const noexcept { return boxes_; }

private:
    std::vector<Box> boxes_;
    std::vector<std::string> names_;
    bool frozen_ = false;
};

/// "{{b0,b1},{b2}}", with FALSE rendered as "{{}}" and TRUE as "{}".
std::string render_formula(const Formula& formula, const BoxNaming& naming);

} // namespace cfgames
