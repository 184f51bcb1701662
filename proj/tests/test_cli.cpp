#include "support.hpp"

#include "cfgames/cli.hpp"
#include "cfgames/json_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace testing;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    const int code = run_cli(args, in, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "cfgames_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

const std::string ab = example_path("ab.game");

} // namespace

TEST_CASE("solve") {
    auto r = run({"solve", ab, "--position", "Y"});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["winner"] == "refuter");
    CHECK(j["rejecting"] == true);
    CHECK(j["formula"]["clauses"].size() == 1);

    r = run({"solve", ab, "--position", "X", "--engine", "worklist", "--json"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find('\n') == r.out.size() - 1);
    j = Json::parse(r.out);
    CHECK(j["winner"] == "prover");
    CHECK(j["engine"] == "worklist");
    CHECK_FALSE(j.contains("stats"));

    r = run({"solve", ab, "--stats", "--predicate", "accept"});
    REQUIRE(r.code == 0);
    j = Json::parse(r.out);
    CHECK(j["predicate"] == "accept");
    CHECK(j.contains("stats"));
    CHECK(j["stats"]["rounds"] == 4);

    // Output is deterministic.
    CHECK(run({"solve", ab, "--stats", "--position", "a Y"}).out.size() > 0);
    CHECK(run({"solve", ab, "--position", "a Y"}).out == run({"solve", ab, "--position", "a Y"}).out);
}

TEST_CASE("usage and input errors exit with 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"solve"}).code == 2);
    CHECK(run({"solve", ab, "--engine", "magic"}).code == 2);
    CHECK(run({"solve", ab, "--position", "Z"}).code == 2);
    CHECK(run({"solve", "/nonexistent.game"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"--help"}).code == 0);

    const auto bad = scratch("bad.game");
    std::ofstream(bad) << "[automaton]\nstates: q\ninitial: q\nfinal: q\ntrans:\nq a q\n";
    auto r = run({"solve", bad.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 7") != std::string::npos);
}

TEST_CASE("strategy") {
    const auto out = scratch("strategy.json");
    auto r = run({"strategy", ab, "--position", "Y", "--out", out.string()});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["winner"] == "refuter");
    CHECK(j["verify"]["all_good"] == true);
    CHECK(j["verify"]["branches"] == 1);
    CHECK(j["table"]["b X"]["rendering"] == "X -> _eps_");
    CHECK(j["replay"]["all_good"] == true);
    std::ifstream f(out);
    CHECK(Json::parse(f) == j);

    r = run({"strategy", ab, "--verify-budget", "50"});
    REQUIRE(r.code == 0);
    j = Json::parse(r.out);
    CHECK(j["winner"] == "prover");
    CHECK(j["table"]["a Y"]["rendering"] == "Y -> b X");
}

TEST_CASE("play") {
    auto r = run({"play", ab, "--position", "Y", "--human", "prover"}, "0\n2\n");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("outcome: refuter-wins") != std::string::npos);
    CHECK(r.out.find("b is not in the language") != std::string::npos);

    r = run({"play", ab, "--position", "X", "--refuter", "random", "--cap", "200", "--json"});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["outcome"] != "refuter-wins");

    r = run({"play", ab, "--position", "X", "--cap", "20"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("cap-reached") != std::string::npos);

    CHECK(run({"play", ab, "--human", "prover"}, "").code == 2);
    CHECK(run({"play", ab, "--human", "judge"}).code == 2);
}

TEST_CASE("gen, cachat and bench") {
    const auto file = scratch("gen.game");
    REQUIRE(run({"gen", "--combo", "3/2/2", "--seed", "9", "--out", file.string()}).code == 0);
    const auto inst = load_instance(file);
    CHECK(inst.nfa.num_states() == 3);
    CHECK(inst.grammar.num_nonterminals() == 4);
    CHECK(run({"gen", "--combo", "3/2/2", "--seed", "9"}).out == run({"gen", "--combo", "3/2/2", "--seed", "9"}).out);
    CHECK(run({"gen", "--states", "0"}).code == 2);

    auto solve = Json::parse(run({"solve", file.string()}).out);
    auto cachat = Json::parse(run({"cachat", file.string()}).out);
    CHECK(solve["winner"] == cachat["winner"]);
    CHECK(cachat["engine"] == "cachat");
    CHECK(Json::parse(run({"cachat", ab, "--position", "Y", "--no-minimize"}).out)["winner"] == "refuter");

    const auto prefix = scratch("bench").string();
    auto r = run({"bench", "--combos", "3/2/2", "--count", "3", "--engines", "naive,worklist,cachat", "--out", prefix});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("| 3/2/2 |") != std::string::npos);
    CHECK(std::filesystem::exists(prefix + ".rows.csv"));
    CHECK(std::filesystem::exists(prefix + ".summary.csv"));
    CHECK(std::filesystem::exists(prefix + ".md"));
    CHECK(run({"bench", "--combos", "3/2", "--count", "1"}).code == 2);
}
