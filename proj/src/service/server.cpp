#include "screener/service/service.hpp"

#include "httplib.h"

namespace screener::service {

namespace {

void reply(httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

}  // namespace

struct HttpServer::Impl {
    httplib::Server server;
};

HttpServer::HttpServer(SessionService& service) : impl_(std::make_unique<Impl>()) {
    auto& server = impl_->server;
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get(".*", [&service](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.handle("GET", req.path, ""));
    });
    server.Post(".*", [&service](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.handle("POST", req.path, req.body));
    });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw Error("cannot bind " + host);
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
    return port;
}

void HttpServer::run() {
    if (!impl_->server.listen_after_bind()) throw Error("HTTP server stopped unexpectedly");
}

void HttpServer::stop() {
    impl_->server.stop();
}

void serve(SessionService& service, const std::string& host, int port) {
    HttpServer server(service);
    server.bind(host, port);
    server.run();
}

}  // namespace screener::service
