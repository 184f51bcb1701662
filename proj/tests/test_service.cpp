#include "support.hpp"

#include "cfgames/service.hpp"

#include <doctest.h>
#include <httplib.h>

#include <fstream>
#include <sstream>
#include <thread>

using namespace testing;

namespace {

std::string example_text() {
    std::ifstream f(example_path("ab.game"));
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

int status_of(const std::function<void()>& call) {
    try {
        call();
    } catch (const HttpError& e) {
        return e.status;
    }
    return 200;
}

// Runs a service on an ephemeral port for the lifetime of the object.
struct LiveServer {
    GameService service;
    httplib::Server server;
    std::thread thread;
    int port = 0;

    LiveServer() {
        service.mount(server);
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LiveServer() {
        server.stop();
        thread.join();
    }
    httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

} // namespace

TEST_CASE("direct service calls") {
    GameService svc;
    const auto id = svc.add_instance(running_example(), "ab");
    CHECK(id == "ab");

    const auto summary = svc.instance_summary("ab");
    CHECK(summary["rules"].size() == 3);
    CHECK(summary["rules"][2]["rendering"] == "Y -> b X");
    CHECK(summary["boxes"] == 6);
    CHECK(status_of([&] { svc.instance_summary("nope"); }) == 404);

    auto solved = svc.solve("ab", "Y", "", "");
    CHECK(solved["winner"] == "refuter");
    CHECK(solved["rejecting"] == true);
    CHECK(solved["engine"] == "worklist");
    CHECK(solved.contains("stats"));
    CHECK(svc.solve("ab", "X", "naive", "reject")["winner"] == "prover");
    CHECK(status_of([&] { svc.solve("ab", "Z", "", ""); }) == 400);
    CHECK(status_of([&] { svc.solve("ab", "X", "magic", ""); }) == 400);

    // Human prover from Y: one move, then the machine refuter ends the play.
    auto created = svc.create_play({{"instanceId", "ab"}, {"position", "Y"}, {"humanRole", "prover"}});
    const std::string play = created["playId"];
    auto state = created["state"];
    CHECK(state["turn"] == "prover");
    CHECK(state["form"] == "Y");
    CHECK(state["legalRules"].size() == 1);
    CHECK(state["choiceImage"].size() == 1);
    CHECK(state["split"]["head"] == "Y");

    CHECK(status_of([&] { svc.move(play, {{"ruleIndex", 0}}); }) == 400);
    CHECK(status_of([&] { svc.move(play, {{"rule", 2}}); }) == 400);
    CHECK(status_of([&] { svc.move("missing", {{"ruleIndex", 2}}); }) == 404);
    state = svc.move(play, {{"ruleIndex", 2}});
    CHECK(state["finished"] == true);
    CHECK(state["history"].size() == 2);
    CHECK(state["history"][1]["chooser"] == "refuter");
    CHECK(state["history"][1]["rendering"] == "X -> _eps_");
    CHECK(state["outcome"]["outcome"] == "refuter-wins");
    CHECK(state["outcome"]["word"] == "b");
    CHECK(status_of([&] { svc.move(play, {{"ruleIndex", 2}}); }) == 409);
    CHECK(svc.play_state(play) == state);

    // Machine-only plays finish at creation.
    auto machine = svc.create_play({{"instanceId", "ab"}, {"position", "Y"}, {"humanRole", "none"}});
    CHECK(machine["state"]["finished"] == true);
    CHECK(status_of([&] { svc.move(machine["playId"], {{"ruleIndex", 2}}); }) == 409);

    CHECK(status_of([&] { svc.create_play({{"instanceId", "nope"}}); }) == 404);
    CHECK(status_of([&] { svc.create_play({{"position", "Y"}}); }) == 400);
    CHECK(status_of([&] { svc.create_play({{"instanceId", "ab"}, {"humanRole", "judge"}}); }) == 400);
}

TEST_CASE("sessions are isolated") {
    GameService svc;
    svc.add_instance(running_example(), "ab");
    const std::string p1 = svc.create_play({{"instanceId", "ab"}, {"humanRole", "refuter"}})["playId"];
    const std::string p2 = svc.create_play({{"instanceId", "ab"}, {"humanRole", "refuter"}})["playId"];
    CHECK(p1 != p2);
    auto s1 = svc.move(p1, {{"ruleIndex", 0}});
    CHECK(s1["form"] == "a b X");
    CHECK(s1["turn"] == "refuter");
    auto s2 = svc.play_state(p2);
    CHECK(s2["form"] == "X");
    CHECK(s2["history"].empty());
    s2 = svc.move(p2, {{"ruleIndex", 1}});
    CHECK(s2["finished"] == true);
    CHECK(s2["outcome"]["outcome"] == "prover-wins");
    CHECK(svc.play_state(p1)["finished"] == false);
}

TEST_CASE("moves replay through the play engine") {
    GameService svc;
    svc.add_instance(running_example(), "ab");
    const std::string p = svc.create_play({{"instanceId", "ab"}, {"humanRole", "refuter"}})["playId"];
    svc.move(p, {{"ruleIndex", 0}});
    svc.move(p, {{"ruleIndex", 0}});
    const auto state = svc.move(p, {{"ruleIndex", 1}});
    REQUIRE(state["finished"] == true);

    std::vector<RuleId> refuter_moves, prover_moves;
    for (const auto& h : state["history"])
        (h["chooser"] == "refuter" ? refuter_moves : prover_moves).push_back(h["ruleIndex"].get<RuleId>());
    const auto inst = running_example();
    const auto solution = kleene_naive(build_system(inst.grammar, inst.nfa));
    Arena arena{inst.grammar, inst.nfa, solution, make_predicate(inst.nfa, PredicateKind::Reject)};
    PlaySession session(arena, default_start(inst));
    ScriptedAgent r(refuter_moves), pr(prover_moves);
    const auto t = play(session, r, pr);
    CHECK(std::string(to_string(t.outcome)) == state["outcome"]["outcome"]);
    CHECK(inst.grammar.render(t.final_form) == state["form"]);
}

TEST_CASE("instances from a directory") {
    GameService svc;
    CHECK(svc.load_directory(std::string(CFGAMES_SOURCE_DIR) + "/docs/examples") >= 1);
    CHECK(svc.instance_summary("ab")["start"] == "X");
}

TEST_CASE("HTTP routes") {
    LiveServer live;
    auto cli = live.client();

    auto res = cli.Post("/instances", example_text(), "text/plain");
    REQUIRE(res);
    CHECK(res->status == 200);
    const std::string id = Json::parse(res->body)["id"];
    CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");

    res = cli.Post("/instances", "[automaton]\nstates: q\n", "text/plain");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(Json::parse(res->body)["error"].get<std::string>().find("line") != std::string::npos);

    res = cli.Get("/instances/" + id);
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(Json::parse(res->body)["nonterminals"].size() == 2);
    res = cli.Get("/instances/unknown");
    REQUIRE(res);
    CHECK(res->status == 404);

    res = cli.Get("/instances/" + id + "/solve?position=Y");
    REQUIRE(res);
    CHECK(res->status == 200);
    auto solved = Json::parse(res->body);
    CHECK(solved["winner"] == "refuter");
    CHECK(solved["formula"]["clauses"].size() == 1);
    res = cli.Get("/instances/" + id + "/solve?position=X&engine=naive");
    REQUIRE(res);
    CHECK(Json::parse(res->body)["winner"] == "prover");

    res = cli.Post("/plays", Json{{"instanceId", id}, {"position", "Y"}, {"humanRole", "prover"}}.dump(),
                   "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    const std::string play = Json::parse(res->body)["playId"];

    res = cli.Post("/plays/" + play + "/moves", Json{{"ruleIndex", 0}}.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    res = cli.Post("/plays/" + play + "/moves", "{not json", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    res = cli.Post("/plays/" + play + "/moves", Json{{"ruleIndex", 2}}.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(Json::parse(res->body)["outcome"]["outcome"] == "refuter-wins");
    res = cli.Post("/plays/" + play + "/moves", Json{{"ruleIndex", 2}}.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 409);

    res = cli.Get("/plays/" + play);
    REQUIRE(res);
    CHECK(Json::parse(res->body)["history"].size() == 2);
    res = cli.Get("/plays/unknown");
    REQUIRE(res);
    CHECK(res->status == 404);

    res = cli.Options("/plays");
    REQUIRE(res);
    CHECK(res->status == 204);
}

TEST_CASE("concurrent plays") {
    LiveServer live;
    const std::string id = live.service.add_instance(running_example(), "ab");
    std::vector<std::thread> threads;
    std::atomic<int> wins{0};
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            auto cli = live.client();
            auto res = cli.Post("/plays", Json{{"instanceId", id}, {"position", "Y"}}.dump(), "application/json");
            if (!res || res->status != 200) return;
            const std::string play = Json::parse(res->body)["playId"];
            res = cli.Post("/plays/" + play + "/moves", Json{{"ruleIndex", 2}}.dump(), "application/json");
            if (res && res->status == 200 && Json::parse(res->body)["outcome"]["outcome"] == "refuter-wins") ++wins;
        });
    }
    for (auto& t : threads) t.join();
    CHECK(wins == 8);
}
