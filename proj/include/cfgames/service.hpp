#pragma once

#include "cfgames/instance.hpp"
#include "cfgames/json_io.hpp"
#include "cfgames/strategy.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>

namespace httplib {
class Server;
}

namespace cfgames {

/// A loaded instance with its lazily computed naive solution.
class StoredInstance {
public:
    explicit StoredInstance(Instance instance);

    const Instance& instance() const noexcept { return instance_; }
    const EquationSystem& system() const noexcept { return system_; }
    /// Naive solution with snapshots, computed on first use.
    const Solution& solution();

private:
    Instance instance_;
    EquationSystem system_;
    std::once_flag once_;
    std::unique_ptr<Solution> solution_;
};

/// A play against machine agents. Moves are serialized by the owner.
struct PlaySessionState {
    std::string id;
    std::string instance_id;
    std::shared_ptr<StoredInstance> stored;
    std::optional<Player> human;
    BoxPredicate pred;
    std::unique_ptr<Arena> arena;
    std::unique_ptr<PlaySession> session;
    SynthesizedRefuter refuter;
    SynthesizedProver prover;
    std::mutex mutex;
};

/// Errors carrying an HTTP status.
struct HttpError : std::runtime_error {
    HttpError(int status, const std::string& what) : std::runtime_error(what), status(status) {}
    int status;
};

/// Session and instance registry behind the HTTP routes. The methods are
/// the route handlers minus the transport, so they can be tested directly.
class GameService {
public:
    GameService();

    std::string add_instance(Instance instance, std::optional<std::string> id = std::nullopt);
    std::size_t load_directory(const std::filesystem::path& dir);

    Json instance_summary(const std::string& id);
    Json solve(const std::string& id, const std::string& position, const std::string& engine,
               const std::string& predicate);
    Json create_play(const Json& body);
    Json play_state(const std::string& id);
    Json move(const std::string& id, const Json& body);

    /// Installs the routes on a server.
    void mount(httplib::Server& server);

private:
    std::shared_ptr<StoredInstance> find_instance(const std::string& id);
    std::shared_ptr<PlaySessionState> find_play(const std::string& id);
    std::string fresh_id();
    static void run_machine(PlaySessionState& play);
    static Json state_json(PlaySessionState& play);

    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<StoredInstance>> instances_;
    std::map<std::string, std::shared_ptr<PlaySessionState>> plays_;
    std::mt19937_64 id_rng_;
};

/// Blocks serving on host:port.
void serve(GameService& service, const std::string& host, int port);

} // namespace cfgames
