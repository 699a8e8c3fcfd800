#include "ci_planner/http_server.hpp"

#include "ci_planner/service.hpp"

#include "httplib.h"

#include <charconv>
#include <iostream>
#include <stdexcept>

namespace ci_planner::http {

namespace {

std::optional<int> parse_port(const char* text) {
    if (text == nullptr || *text == '\0') return std::nullopt;
    const std::string_view s(text);
    int port = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), port);
    if (ec != std::errc{} || ptr != s.data() + s.size() || port < 0 || port > 65535) {
        throw std::invalid_argument("invalid CI_PLANNER_PORT '" + std::string(s) + "'");
    }
    return port;
}

}  // namespace

ServerConfig resolve_config(std::optional<std::string> host_flag, std::optional<int> port_flag,
                            std::optional<std::string> cors_flag,
                            const std::function<const char*(const char*)>& getenv) {
    ServerConfig config;
    if (const char* host = getenv("CI_PLANNER_HOST"); host != nullptr && *host != '\0') {
        config.host = host;
    }
    if (auto port = parse_port(getenv("CI_PLANNER_PORT"))) config.port = *port;
    if (const char* cors = getenv("CI_PLANNER_CORS_ORIGIN"); cors != nullptr) config.cors_origin = cors;

    if (host_flag) config.host = *host_flag;
    if (port_flag) config.port = *port_flag;
    if (cors_flag) config.cors_origin = *cors_flag;
    return config;
}

struct Server::Impl {
    ServerConfig config;
    httplib::Server server;
};

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    auto& srv = impl_->server;
    const std::string cors = impl_->config.cors_origin;

    if (!cors.empty()) {
        srv.set_default_headers({{"Access-Control-Allow-Origin", cors},
                                 {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                 {"Access-Control-Allow-Headers", "Content-Type"}});
    }

    srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("ok", "text/plain");
    });

    const auto dispatch = [](const httplib::Request& req, httplib::Response& res) {
        const service::Response out = service::handle(req.method, req.path, req.body);
        res.status = out.status;
        res.set_content(service::dump(out.body), "application/json");
    };
    srv.Get(R"(/.*)", dispatch);
    srv.Post(R"(/.*)", dispatch);
    srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    if (impl_->config.access_log) {
        srv.set_logger([](const httplib::Request& req, const httplib::Response& res) {
            std::clog << req.method << ' ' << req.path << ' ' << res.status << '\n';
        });
    }
}

Server::~Server() { stop(); }

int Server::bind() {
    auto& srv = impl_->server;
    if (impl_->config.port == 0) return srv.bind_to_any_port(impl_->config.host);
    return srv.bind_to_port(impl_->config.host, impl_->config.port) ? impl_->config.port : -1;
}

bool Server::listen() { return impl_->server.listen_after_bind(); }

void Server::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void Server::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace ci_planner::http
