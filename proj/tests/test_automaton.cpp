#include "support.hpp"

#include "cfgames/errors.hpp"

#include <doctest.h>

using namespace testing;

TEST_CASE("identity box") {
    CHECK(pairs_of(identity_box(2)) == PairSet{{0, 0}, {1, 1}});
    CHECK(pairs_of(identity_box(1)) == PairSet{{0, 0}});
}

TEST_CASE("letter boxes of the running example") {
    const auto inst = running_example();
    const auto& nfa = inst.nfa;
    CHECK(pairs_of(letter_box(nfa, "a")) == PairSet{{0, 1}});
    CHECK(pairs_of(letter_box(nfa, "b")) == PairSet{{1, 0}});
    CHECK(pairs_of(compose_box(letter_box(nfa, "a"), letter_box(nfa, "b"))) == PairSet{{0, 0}});
    CHECK(compose_box(letter_box(nfa, "a"), letter_box(nfa, "a")).empty_relation());
    CHECK(box_of(nfa, "") == identity_box(2));
    CHECK(pairs_of(box_of(nfa, "ab")) == PairSet{{0, 0}});
    CHECK(box_of(nfa, "bab") == box_of(nfa, "b"));
}

TEST_CASE("letter without transitions has the empty box") {
    Nfa nfa({"p", "q"}, {"a", "z"}, 0, {1}, {{0, 0, 1}});
    CHECK(letter_box(nfa, "z").empty_relation());
    CHECK(letter_box(nfa, "z").dim() == 2);
}

TEST_CASE("rejecting boxes") {
    const auto inst = running_example();
    CHECK(box_rejecting(inst.nfa, letter_box(inst.nfa, "b")));
    CHECK_FALSE(box_rejecting(inst.nfa, identity_box(2)));
    CHECK(box_rejecting(inst.nfa, Box(2)));
    CHECK(box_accepting(inst.nfa, identity_box(2)));
}

TEST_CASE("monoid closure") {
    const auto inst = running_example();
    const auto& nfa = inst.nfa;
    std::set<Box> expected{identity_box(2), box_of(nfa, "a"), box_of(nfa, "b"), box_of(nfa, "ab"), box_of(nfa, "ba"),
                           Box(2)};
    const auto closure = monoid_closure(nfa);
    CHECK(closure.size() == 6);
    CHECK(std::set<Box>(closure.begin(), closure.end()) == expected);
    CHECK(std::is_sorted(closure.begin(), closure.end()));
    CHECK_THROWS_AS(monoid_closure(nfa, 3), PreconditionError);

    Nfa loop({"q"}, {"a", "b"}, 0, {0}, {{0, 0, 0}, {0, 1, 0}});
    CHECK(monoid_closure(loop) == std::vector<Box>{identity_box(1)});

    Nfa dead({"p", "q"}, {"a"}, 0, {1}, {});
    CHECK(monoid_closure(dead).size() == 2);
}

TEST_CASE("closure is closed under composition") {
    Rng rng(11);
    for (int round = 0; round < 20; ++round) {
        const auto nfa = random_nfa(rng, 2 + round % 3, 2);
        const auto closure = monoid_closure(nfa);
        const std::set<Box> members(closure.begin(), closure.end());
        for (const auto& x : closure)
            for (const auto& y : closure) REQUIRE(members.count(compose_box(x, y)));
    }
}

TEST_CASE("box order is total and row-major") {
    Box low = box_from_pairs(2, {{1, 1}});
    Box high = box_from_pairs(2, {{0, 0}});
    CHECK(low < high);
    CHECK(Box(2) < low);
}

TEST_CASE("monoid laws and homomorphism on random data") {
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        const std::size_t dim = 1 + uniform_below(rng, 5);
        const Box x = random_box(rng, dim), y = random_box(rng, dim), z = random_box(rng, dim);
        REQUIRE(compose_box(compose_box(x, y), z) == compose_box(x, compose_box(y, z)));
        REQUIRE(compose_box(identity_box(dim), x) == x);
        REQUIRE(compose_box(x, identity_box(dim)) == x);
        REQUIRE(pairs_of(compose_box(x, y)) == compose_pairs(pairs_of(x), pairs_of(y)));
    }
    for (int i = 0; i < 200; ++i) {
        const auto nfa = random_nfa(rng, 1 + i % 5, 3);
        auto u = random_word(rng, 3, 5), v = random_word(rng, 3, 5);
        auto uv = u;
        uv.insert(uv.end(), v.begin(), v.end());
        REQUIRE(word_box(nfa, uv) == compose_box(word_box(nfa, u), word_box(nfa, v)));
        REQUIRE(box_rejecting(nfa, word_box(nfa, uv)) == !nfa_member(nfa, uv));
    }
}

TEST_CASE("determinize the running example") {
    const auto inst = running_example();
    const auto dfa = determinize(inst.nfa);
    CHECK(dfa.is_deterministic());
    CHECK(dfa.num_states() == 3);
    auto s0 = dfa.initial();
    auto a = *dfa.letter_index("a"), b = *dfa.letter_index("b");
    auto s1 = dfa.successors(s0, a)[0];
    auto sink = dfa.successors(s0, b)[0];
    CHECK(s1 != s0);
    CHECK(sink != s0);
    CHECK(sink != s1);
    CHECK(dfa.successors(s1, b)[0] == s0);
    CHECK(dfa.successors(s1, a)[0] == sink);
    CHECK(dfa.successors(sink, a)[0] == sink);
    CHECK(dfa.is_final(s0));
    CHECK_FALSE(dfa.is_final(s1));
    CHECK_FALSE(dfa.is_final(sink));
}

TEST_CASE("minimization") {
    const auto inst = running_example();
    const auto dfa = determinize(inst.nfa);
    CHECK(minimize(dfa).num_states() == dfa.num_states());

    // Two accepting sinks are indistinguishable.
    Nfa two_sinks({"s", "f1", "f2"}, {"a", "b"}, 0, {1, 2},
                  {{0, 0, 1}, {0, 1, 2}, {1, 0, 1}, {1, 1, 1}, {2, 0, 2}, {2, 1, 2}});
    CHECK(minimize(two_sinks).num_states() == 2);
    CHECK_THROWS_AS(minimize(inst.nfa), PreconditionError);
}

TEST_CASE("determinize and minimize preserve the language") {
    Rng rng(3);
    for (int round = 0; round < 30; ++round) {
        const auto nfa = random_nfa(rng, 2 + round % 4, 2 + round % 2);
        const auto dfa = determinize(nfa);
        const auto min = minimize(dfa);
        REQUIRE(dfa.is_deterministic());
        REQUIRE(min.is_deterministic());
        REQUIRE(min.num_states() <= dfa.num_states());
        for (int i = 0; i < 1000; ++i) {
            const auto w = random_word(rng, nfa.num_letters(), 8);
            const bool in = nfa_member(nfa, w);
            REQUIRE(dfa.accepts(w) == in);
            REQUIRE(min.accepts(w) == in);
            REQUIRE(nfa.accepts(w) == in);
        }
    }
}

TEST_CASE("automaton validation") {
    CHECK_THROWS_AS(Nfa({"p"}, {"a"}, 1, {}, {}), ValidationError);
    CHECK_THROWS_AS(Nfa({"p"}, {"a"}, 0, {0}, {{0, 1, 0}}), ValidationError);
    std::vector<std::string> many(17);
    for (std::size_t i = 0; i < many.size(); ++i) many[i] = "q" + std::to_string(i);
    Nfa big(many, {"a"}, 0, {}, {});
    CHECK_THROWS_AS(letter_box(big, 0), PreconditionError);
    CHECK_THROWS_AS(Box(17), PreconditionError);
}
