#pragma once

#include "screener/dialog/engine.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace screener::service {

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

// Error payloads are {"code": ..., "message": ...}.
ApiResponse api_error(int status, const std::string& code, const std::string& message);

// Live dialog sessions over HTTP-shaped requests. Sessions stay in memory
// and every turn is written through to <state_dir>/<session id>.jsonl, from
// which unknown ids are reloaded. Requests for one session are serialized;
// different sessions proceed concurrently.
class SessionService {
public:
    SessionService(std::vector<Checker> corpus, llm::Gateway& gateway, std::filesystem::path state_dir);

    // POST /v1/sessions                {"opportunity_ids": [...]}
    // POST /v1/sessions/{id}/answers   {"answer": "..."}
    // GET  /v1/sessions/{id}
    // GET  /v1/opportunities
    ApiResponse handle(const std::string& method, const std::string& path, const std::string& body);

    ApiResponse create_session(const nlohmann::json& body);
    ApiResponse post_answer(const std::string& id, const nlohmann::json& body);
    ApiResponse get_session(const std::string& id);
    ApiResponse list_opportunities() const;

private:
    struct Entry {
        std::mutex mutex;
        dialog::Session session;
    };

    std::shared_ptr<Entry> find(const std::string& id);
    std::string next_id();
    nlohmann::json view(const Entry& e) const;
    ApiResponse advance(Entry& e);

    std::vector<dialog::CheckerRef> corpus_;
    dialog::Engine engine_;
    std::filesystem::path state_dir_;
    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::size_t counter_ = 0;
};

// ApiSession payload: session_id, state, current_question, decisions,
// rationale, turns_used, max_turns, opportunities.
nlohmann::json session_view(const dialog::Session& s, const std::optional<dialog::Ask>& ask);

// HTTP front end (CORS enabled). bind() with port 0 picks a free port and
// returns it; run() blocks until stop() is called from another thread.
class HttpServer {
public:
    explicit HttpServer(SessionService& service);
    ~HttpServer();
    int bind(const std::string& host, int port);
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// bind + run on host:port.
void serve(SessionService& service, const std::string& host, int port);

}  // namespace screener::service
