#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cfgames {

using StateId = std::uint32_t;
using LetterId = std::uint32_t;

struct Transition {
    StateId from;
    LetterId letter;
    StateId to;

    friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// Non-deterministic finite automaton with a single initial state.
///
/// States and letters carry display names; everything else works on dense
/// indices. The constructor validates all indices and throws
/// ValidationError on violations.
class Nfa {
public:
    Nfa(std::vector<std::string> state_names, std::vector<std::string> alphabet, StateId initial,
        std::vector<StateId> finals, std::vector<Transition> transitions);

    std::size_t num_states() const noexcept { return state_names_.size(); }
    std::size_t num_letters() const noexcept { return alphabet_.size(); }

    const std::vector<std::string>& state_names() const noexcept { return state_names_; }
    const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
    StateId initial() const noexcept { return initial_; }
    const std::vector<StateId>& finals() const noexcept { return finals_; }
    bool is_final(StateId q) const { return final_mask_[q]; }
    /// Sorted and duplicate-free.
    const std::vector<Transition>& transitions() const noexcept { return transitions_; }

    std::span<const StateId> successors(StateId q, LetterId a) const {
        return succ_[static_cast<std::size_t>(q) * alphabet_.size() + a];
    }

    std::optional<LetterId> letter_index(std::string_view name) const;
    std::optional<StateId> state_index(std::string_view name) const;

    /// Direct subset simulation. Independent of the box machinery.
    bool accepts(std::span<const LetterId> word) const;

    /// Exactly one successor for every (state, letter).
    bool is_deterministic() const;

private:
    std::vector<std::string> state_names_;
    std::vector<std::string> alphabet_;
    StateId initial_;
    std::vector<StateId> finals_;
    std::vector<bool> final_mask_;
    std::vector<Transition> transitions_;
    std::vector<std::vector<StateId>> succ_;
};

inline constexpr std::size_t kMaxBoxStates = 16;

/// A relation over the states of an automaton: one element of its transition
/// monoid. Row q holds the targets q' with (q, q') in the relation, bit q'
/// set. Boxes are totally ordered row-major, entry by entry, with
/// absent < present.
class Box {
public:
    using Row = std::uint16_t;

    Box() = default;
    explicit Box(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    bool get(StateId from, StateId to) const { return (rows_[from] >> to) & 1U; }
    void set(StateId from, StateId to, bool present = true);
    Row row(StateId from) const { return rows_[from]; }
    bool empty_relation() const noexcept;
    std::size_t pair_count() const noexcept;

    std::size_t hash() const noexcept;

    friend bool operator==(const Box&, const Box&) = default;
    friend std::strong_ordering operator<=>(const Box& lhs, const Box& rhs) noexcept;

private:
    friend Box compose_box(const Box&, const Box&);

    std::uint8_t dim_ = 0;
    std::array<Row, kMaxBoxStates> rows_{};
};

struct BoxHash {
    std::size_t operator()(const Box& box) const noexcept { return box.hash(); }
};

Box identity_box(std::size_t dim);
Box letter_box(const Nfa& nfa, LetterId letter);
Box letter_box(const Nfa& nfa, std::string_view letter);
/// Relational composition: (q, q'') iff some q' has (q, q') in lhs and (q', q'') in rhs.
Box compose_box(const Box& lhs, const Box& rhs);
Box word_box(const Nfa& nfa, std::span<const LetterId> word);
Box word_box(const Nfa& nfa, std::span<const std::string> word);

/// No pair (initial, final) in the box: every word the box represents is rejected.
bool box_rejecting(const Nfa& nfa, const Box& box);
bool box_accepting(const Nfa& nfa, const Box& box);

/// All boxes reachable from the identity and the letter boxes under
/// composition, in canonical order. Throws PreconditionError once more than
/// `limit` boxes have been found.
std::vector<Box> monoid_closure(const Nfa& nfa, std::size_t limit = SIZE_MAX);

/// Reachable subset construction. Complete: the empty subset is added as an
/// explicit sink whenever some subset has no successor.
Nfa determinize(const Nfa& nfa);

/// Language-equivalent minimal DFA by partition refinement. Unreachable
/// states are dropped. Throws PreconditionError if the input is not a
/// complete DFA.
Nfa minimize(const Nfa& dfa);

/// "{(q0,q1),(q1,q0)}" with state display names.
std::string render_box(const Nfa& nfa, const Box& box);

} // namespace cfgames
