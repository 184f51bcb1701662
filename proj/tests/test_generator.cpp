#include "support.hpp"

#include "cfgames/bench.hpp"
#include "cfgames/errors.hpp"

#include <doctest.h>

#include <sstream>

using namespace testing;

TEST_CASE("same seed, same instance") {
    GenParams p;
    p.seed = 42;
    const auto a = render_instance(gen_instance(p), gen_metadata(p));
    const auto b = render_instance(gen_instance(p), gen_metadata(p));
    CHECK(a == b);
    CHECK(a.find("# seed=42") != std::string::npos);
    p.seed = 43;
    CHECK(render_instance(gen_instance(p)) != render_instance(gen_instance(GenParams{})));
}

TEST_CASE("the random helpers are pinned") {
    // Reference values of the documented generator and helpers.
    Rng rng;
    rng.discard(9999);
    CHECK(rng() == 9981545732273789042ULL);
    CHECK(mix_seed(0) == 0xe220a8397b1dcdafULL);
    Rng r(7);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(uniform_below(r, 5) < 5);
        const double u = uniform_unit(r);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("transition and final counts") {
    GenParams p;
    p.states = 5;
    p.letters = 5;
    p.density = 2.0;
    const auto nfa = gen_nfa(p, 9);
    CHECK(nfa.transitions().size() == 50);
    for (LetterId a = 0; a < 5; ++a) {
        std::size_t n = 0;
        for (const auto& t : nfa.transitions()) n += t.letter == a;
        CHECK(n == 10);
    }
    CHECK(nfa.finals().size() == 3);
    CHECK(nfa.initial() == 0);

    p.density = 0.0;
    CHECK(gen_nfa(p, 9).transitions().empty());

    p.final_fraction = 0.01;
    CHECK(gen_nfa(p, 9).finals().size() == 1);
    p.final_fraction = 0.0;
    CHECK(gen_nfa(p, 9).finals().empty());

    p.final_fraction = 0.2;
    p.initial_final = true;
    CHECK(gen_nfa(p, 9).is_final(0));
}

TEST_CASE("rule shapes and counts") {
    GenParams p;
    p.p_a = p.p_y = p.p_b = 0.0;
    p.seed = 5;
    const auto g = gen_instance(p).grammar;
    for (const auto& r : g.rules()) CHECK(r.rhs.empty());

    GenParams q;
    q.refuter_nonterminals = 3;
    q.prover_nonterminals = 4;
    q.refuter_rules = 5;
    q.prover_rules = 2;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        q.seed = seed;
        const auto inst = gen_instance(q);
        const auto& gr = inst.grammar;
        std::size_t patched = 0;
        std::vector<std::size_t> per(gr.num_nonterminals(), 0);
        for (RuleId r = 0; r < gr.num_rules(); ++r) {
            const auto& rule = gr.rule(r);
            ++per[rule.lhs];
            REQUIRE(rule.rhs.size() <= 3);
            if (r >= 7) {
                REQUIRE(rule.rhs.empty());
                ++patched;
            } else {
                const bool refuter_rule = r < 5;
                REQUIRE((gr.owner(rule.lhs) == Player::Refuter) == refuter_rule);
            }
        }
        std::size_t empty_before = 0;
        for (std::size_t x = 0; x < per.size(); ++x) REQUIRE(per[x] >= 1);
        for (std::size_t x = 0; x < per.size(); ++x) {
            bool only_patch = true;
            for (RuleId r = 0; r < 7; ++r) only_patch &= gr.rule(r).lhs != x;
            empty_before += only_patch;
        }
        REQUIRE(patched == empty_before);
        REQUIRE(validate(gr).empty());
        REQUIRE_NOTHROW(build_system(gr, inst.nfa));
    }
}

TEST_CASE("default rule counts and names") {
    GenParams p;
    CHECK(p.rules_for(Player::Refuter) == 10);
    const auto inst = gen_instance(p);
    CHECK(inst.grammar.name(0) == "X0");
    CHECK(inst.grammar.name(5) == "Y0");
    CHECK(inst.nfa.alphabet().front() == "a");
    p.letters = 30;
    CHECK(gen_instance(p).nfa.alphabet().back() == "t29");
}

TEST_CASE("parameter checks") {
    GenParams p;
    p.states = 0;
    CHECK_THROWS_AS(gen_instance(p), PreconditionError);
    p.states = 17;
    CHECK_THROWS_AS(gen_instance(p), PreconditionError);
    p.states = 2;
    p.density = 3.0;
    CHECK_THROWS_AS(gen_instance(p), PreconditionError);
    p.density = 1.0;
    p.p_a = 1.5;
    CHECK_THROWS_AS(gen_instance(p), PreconditionError);
}

TEST_CASE("combos") {
    const auto c = parse_combo("5/5/10");
    CHECK(c.states == 5);
    CHECK(c.letters == 5);
    CHECK(c.nonterminals == 10);
    CHECK(c.label() == "5/5/10");
    CHECK_THROWS_AS(parse_combo("5/5"), PreconditionError);
    CHECK_THROWS_AS(parse_combo("5/x/1"), PreconditionError);
    CHECK_THROWS_AS(parse_combo("0/5/1"), PreconditionError);
    CHECK(default_combos().size() == 14);
}

TEST_CASE("bench accounting") {
    BenchSpec spec;
    spec.combos = {parse_combo("3/2/2")};
    spec.count = 4;
    spec.engines = {"naive", "naive-parallel", "worklist", "cachat"};
    spec.workers = 2;
    const auto result = run_bench(spec);
    CHECK(result.rows.size() == 16);
    CHECK(result.disagreements == 0);
    for (const auto& s : result.summary) {
        CHECK(s.total == 4);
        CHECK(s.solved == 4);
        CHECK(s.timeout_pct == 0.0);
    }
    // Every engine saw the same seeds.
    std::map<std::string, std::vector<std::uint64_t>> seeds;
    for (const auto& r : result.rows) seeds[r.engine].push_back(r.seed);
    for (const auto& [engine, list] : seeds) CHECK(list == seeds.begin()->second);

    spec.workers = 1;
    const auto serial = run_bench(spec);
    REQUIRE(serial.rows.size() == result.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        CHECK(serial.rows[i].seed == result.rows[i].seed);
        CHECK(serial.rows[i].engine == result.rows[i].engine);
        CHECK(serial.rows[i].winner == result.rows[i].winner);
    }

    std::ostringstream rows, summary, md;
    write_rows_csv(rows, result);
    write_summary_csv(summary, result);
    write_markdown(md, result, spec.engines);
    CHECK(rows.str().rfind("combo,engine,seed,solved,ms,winner\n", 0) == 0);
    CHECK(summary.str().rfind("combo,engine,avg_ms,timeout_pct\n", 0) == 0);
    CHECK(md.str().find("| 3/2/2 |") != std::string::npos);
}

TEST_CASE("tiny timeouts count as timeouts") {
    BenchSpec spec;
    spec.combos = {parse_combo("8/5/20")};
    spec.count = 3;
    spec.timeout_ms = 1;
    spec.engines = {"naive", "cachat"};
    spec.warmup = false;
    const auto result = run_bench(spec);
    for (const auto& r : result.rows) {
        if (!r.solved) {
            CHECK(r.winner.empty());
            CHECK(r.error.empty());
        }
    }
    for (const auto& s : result.summary) {
        if (s.solved == 0) CHECK(std::isnan(s.avg_ms));
        CHECK(s.timeout_pct == doctest::Approx(100.0 * static_cast<double>(s.total - s.solved) / s.total));
    }
    std::ostringstream summary;
    write_summary_csv(summary, result);
    CHECK(summary.str().find("8/5/20,") != std::string::npos);
}

TEST_CASE("bench spec checks") {
    BenchSpec spec;
    spec.combos = {parse_combo("3/2/2")};
    spec.count = 0;
    CHECK_THROWS_AS(run_bench(spec), PreconditionError);
    spec.count = 1;
    spec.timeout_ms = 0;
    CHECK_THROWS_AS(run_bench(spec), PreconditionError);
    spec.timeout_ms = 10;
    spec.engines = {"warp"};
    CHECK_THROWS_AS(run_bench(spec), PreconditionError);
}
