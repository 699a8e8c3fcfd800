#include "ci_planner/http_server.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>

namespace {
ci_planner::http::Server* g_server = nullptr;

void handle_signal(int) {
    if (g_server != nullptr) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"JSON API for confidence intervals and sample size planning",
                 "ci-planner-server"};
    std::optional<std::string> host;
    std::optional<int> port;
    std::optional<std::string> cors;
    bool quiet = false;
    app.add_option("--host", host, "Bind address (env CI_PLANNER_HOST, default 127.0.0.1)");
    app.add_option("--port", port, "Port (env CI_PLANNER_PORT, default 8080)")
        ->check(CLI::Range(0, 65535));
    app.add_option("--cors-origin", cors,
                   "Access-Control-Allow-Origin value; empty disables (env CI_PLANNER_CORS_ORIGIN)");
    app.add_flag("--quiet", quiet, "Disable access log lines");
    CLI11_PARSE(app, argc, argv);

    ci_planner::http::ServerConfig config;
    try {
        config = ci_planner::http::resolve_config(host, port, cors, [](const char* name) {
            return std::getenv(name);
        });
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    config.access_log = !quiet;

    ci_planner::http::Server server(config);
    const int bound = server.bind();
    if (bound < 0) {
        std::cerr << "error: cannot bind " << config.host << ':' << config.port << '\n';
        return 1;
    }
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::clog << "listening on http://" << config.host << ':' << bound << '\n';
    return server.listen() ? 0 : 1;
}
