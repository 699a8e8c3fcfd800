#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace ci_planner::http {

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    /// Value of Access-Control-Allow-Origin; empty disables CORS headers.
    std::string cors_origin = "*";
    bool access_log = true;
};

/// Flag values win over CI_PLANNER_HOST / CI_PLANNER_PORT /
/// CI_PLANNER_CORS_ORIGIN, which win over the defaults. `getenv` is
/// injectable for tests.
ServerConfig resolve_config(std::optional<std::string> host_flag, std::optional<int> port_flag,
                            std::optional<std::string> cors_flag,
                            const std::function<const char*(const char*)>& getenv);

/// Stateless JSON API over HTTP/1.1. Routes every /api request through
/// service::handle and answers GET /healthz with "ok".
class Server {
public:
    explicit Server(ServerConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the configured address; port 0 picks a free port. Returns the
    /// bound port, or -1 on failure.
    int bind();
    /// Serves until stop() is called. Requires a successful bind().
    bool listen();
    void stop();
    /// Blocks until the listen loop is accepting connections.
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ci_planner::http
