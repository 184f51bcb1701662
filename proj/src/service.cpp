#include "cfgames/service.hpp"

#include "cfgames/errors.hpp"

#include <httplib.h>

#include <iomanip>
#include <sstream>

namespace cfgames {

StoredInstance::StoredInstance(Instance instance)
    : instance_(std::move(instance)), system_(build_system(instance_.grammar, instance_.nfa)) {}

const Solution& StoredInstance::solution() {
    std::call_once(once_, [this] { solution_ = std::make_unique<Solution>(kleene_naive(system_)); });
    return *solution_;
}

GameService::GameService() : id_rng_(std::random_device{}()) {}

std::string GameService::fresh_id() {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << id_rng_();
    return out.str();
}

std::string GameService::add_instance(Instance instance, std::optional<std::string> id) {
    auto stored = std::make_shared<StoredInstance>(std::move(instance));
    std::lock_guard lock(mutex_);
    std::string key = id ? *id : fresh_id();
    instances_[key] = std::move(stored);
    return key;
}

std::size_t GameService::load_directory(const std::filesystem::path& dir) {
    std::size_t n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".game") continue;
        add_instance(load_instance(entry.path()), entry.path().stem().string());
        ++n;
    }
    return n;
}

std::shared_ptr<StoredInstance> GameService::find_instance(const std::string& id) {
    std::lock_guard lock(mutex_);
    auto it = instances_.find(id);
    if (it == instances_.end()) throw HttpError(404, "unknown instance '" + id + "'");
    return it->second;
}

std::shared_ptr<PlaySessionState> GameService::find_play(const std::string& id) {
    std::lock_guard lock(mutex_);
    auto it = plays_.find(id);
    if (it == plays_.end()) throw HttpError(404, "unknown play '" + id + "'");
    return it->second;
}

namespace {

SententialForm parse_position(const Instance& instance, const std::string& text) {
    if (text.empty()) return default_start(instance);
    try {
        return instance.grammar.parse_form(text);
    } catch (const ValidationError& e) {
        throw HttpError(400, e.what());
    }
}

} // namespace

Json GameService::instance_summary(const std::string& id) {
    auto stored = find_instance(id);
    Json out = instance_summary_json(stored->instance());
    out["id"] = id;
    return out;
}

Json GameService::solve(const std::string& id, const std::string& position, const std::string& engine,
                        const std::string& predicate) {
    auto stored = find_instance(id);
    const auto& inst = stored->instance();
    auto form = parse_position(inst, position);
    auto e = engine_from_string(engine.empty() ? "worklist" : engine);
    if (!e) throw HttpError(400, "unknown engine '" + engine + "'");
    auto kind = predicate_from_string(predicate.empty() ? "reject" : predicate);
    if (!kind) throw HttpError(400, "unknown predicate '" + predicate + "'");
    const Solution solution = cfgames::solve(stored->system(), *e, {Deadline{}, false});
    return solve_json(inst, solution, form, *kind, true);
}

Json GameService::state_json(PlaySessionState& play) {
    const auto& g = play.stored->instance().grammar;
    const auto& nfa = play.stored->instance().nfa;
    const auto& s = *play.session;
    const auto t = s.transcript();
    Json legal = Json::array();
    for (RuleId r : s.legal_rules()) legal.push_back({{"index", r}, {"rendering", g.render_rule(r)}});
    Json history = Json::array();
    for (const auto& step : t.steps)
        history.push_back({{"position", g.render(step.position)},
                           {"chooser", to_string(step.chooser)},
                           {"ruleIndex", step.rule},
                           {"rendering", g.render_rule(step.rule)}});
    const auto split = leftmost_split(s.form());
    Json out{{"playId", play.id},
             {"instanceId", play.instance_id},
             {"form", g.render(s.form())},
             {"humanRole", play.human ? Json(to_string(*play.human)) : Json("none")},
             {"turn", s.finished() ? Json(nullptr) : Json(to_string(s.turn()))},
             {"finished", s.finished()},
             {"legalRules", legal},
             {"history", history}};
    if (split) {
        out["split"] = {{"prefix", g.render(split->prefix)},
                        {"head", g.name(split->head)},
                        {"suffix", g.render(split->suffix)}};
    }
    out["formula"] = formula_json(nfa, eval_sentential(play.stored->solution(), s.form()));
    if (play.human != Player::Refuter && play.refuter.state()) {
        Json image = Json::array();
        for (const auto& b : play.refuter.state()->image()) image.push_back(render_box(nfa, b));
        out["choiceImage"] = image;
    }
    if (s.finished()) out["outcome"] = transcript_json(g, nfa, t);
    return out;
}

void GameService::run_machine(PlaySessionState& play) {
    auto& s = *play.session;
    while (!s.finished() && (!play.human || s.turn() != *play.human)) {
        Agent& mover = s.turn() == Player::Refuter ? static_cast<Agent&>(play.refuter) : play.prover;
        const RuleId rule = mover.choose(s);
        const SententialForm before = s.form();
        s.apply(rule);
        play.refuter.observe(s, before, rule);
        play.prover.observe(s, before, rule);
    }
}

Json GameService::create_play(const Json& body) {
    if (!body.is_object() || !body.contains("instanceId") || !body["instanceId"].is_string())
        throw HttpError(400, "body needs a string field instanceId");
    const std::string instance_id = body["instanceId"];
    auto stored = find_instance(instance_id);
    const std::string position = body.value("position", std::string());
    const std::string role = body.value("humanRole", std::string("prover"));
    const std::size_t cap = body.value("cap", std::size_t{10000});
    auto form = parse_position(stored->instance(), position);

    auto play = std::make_shared<PlaySessionState>();
    if (role == "refuter") play->human = Player::Refuter;
    else if (role == "prover") play->human = Player::Prover;
    else if (role != "none") throw HttpError(400, "humanRole must be refuter, prover or none");
    play->instance_id = instance_id;
    play->stored = stored;
    play->pred = make_predicate(stored->instance().nfa, PredicateKind::Reject);
    play->arena = std::make_unique<Arena>(
        Arena{stored->instance().grammar, stored->instance().nfa, stored->solution(), play->pred});
    play->session = std::make_unique<PlaySession>(*play->arena, std::move(form), cap);
    {
        std::lock_guard lock(mutex_);
        play->id = fresh_id();
        plays_[play->id] = play;
    }
    std::lock_guard lock(play->mutex);
    if (play->human != Player::Refuter) play->refuter.prime(*play->session);
    run_machine(*play);
    return Json{{"playId", play->id}, {"state", state_json(*play)}};
}

Json GameService::play_state(const std::string& id) {
    auto play = find_play(id);
    std::lock_guard lock(play->mutex);
    return state_json(*play);
}

Json GameService::move(const std::string& id, const Json& body) {
    auto play = find_play(id);
    if (!body.is_object() || !body.contains("ruleIndex") || !body["ruleIndex"].is_number_integer())
        throw HttpError(400, "body needs an integer field ruleIndex");
    const long long rule = body["ruleIndex"];
    std::lock_guard lock(play->mutex);
    auto& s = *play->session;
    if (s.finished()) throw HttpError(409, "the play is over");
    if (!play->human || s.turn() != *play->human) throw HttpError(409, "not the human player's turn");
    if (rule < 0 || !s.is_legal(static_cast<RuleId>(rule)))
        throw HttpError(400, "rule " + std::to_string(rule) + " is not legal at " +
                                 play->stored->instance().grammar.render(s.form()));
    const SententialForm before = s.form();
    s.apply(static_cast<RuleId>(rule));
    play->refuter.observe(s, before, static_cast<RuleId>(rule));
    play->prover.observe(s, before, static_cast<RuleId>(rule));
    run_machine(*play);
    return state_json(*play);
}

namespace {

template <class F>
void respond(httplib::Response& res, F&& body) {
    try {
        res.set_content(body().dump(), "application/json");
    } catch (const HttpError& e) {
        res.status = e.status;
        res.set_content(Json{{"error", e.what()}}.dump(), "application/json");
    } catch (const Json::exception& e) {
        res.status = 400;
        res.set_content(Json{{"error", std::string("malformed JSON: ") + e.what()}}.dump(), "application/json");
    } catch (const InvariantError& e) {
        res.status = 500;
        res.set_content(Json{{"error", e.what()}}.dump(), "application/json");
    } catch (const GameError& e) {
        res.status = 400;
        res.set_content(Json{{"error", e.what()}}.dump(), "application/json");
    }
}

Json parse_body(const httplib::Request& req) {
    try {
        return Json::parse(req.body);
    } catch (const Json::exception& e) {
        throw HttpError(400, std::string("malformed JSON: ") + e.what());
    }
}

} // namespace

void GameService::mount(httplib::Server& server) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Post("/instances", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] {
            try {
                return Json{{"id", add_instance(parse_instance(req.body))}};
            } catch (const ParseError& e) {
                throw HttpError(400, "line " + std::to_string(e.line()) + ": " + e.what());
            } catch (const ValidationError& e) {
                throw HttpError(400, e.what());
            }
        });
    });
    server.Get("/instances/:id", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] { return instance_summary(req.path_params.at("id")); });
    });
    server.Get("/instances/:id/solve", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] {
            return solve(req.path_params.at("id"), req.get_param_value("position"), req.get_param_value("engine"),
                         req.get_param_value("predicate"));
        });
    });
    server.Post("/plays", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] { return create_play(parse_body(req)); });
    });
    server.Get("/plays/:id", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] { return play_state(req.path_params.at("id")); });
    });
    server.Post("/plays/:id/moves", [this](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&] { return move(req.path_params.at("id"), parse_body(req)); });
    });
}

void serve(GameService& service, const std::string& host, int port) {
    httplib::Server server;
    service.mount(server);
    if (!server.listen(host, port)) throw GameError("cannot listen on " + host + ":" + std::to_string(port));
}

} // namespace cfgames
