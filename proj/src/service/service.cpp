#include "screener/service/service.hpp"

#include "screener/text.hpp"

#include <cstdio>
#include <regex>

namespace screener::service {

ApiResponse api_error(int status, const std::string& code, const std::string& message) {
    return {status, {{"code", code}, {"message", message}}};
}

nlohmann::json session_view(const dialog::Session& s, const std::optional<dialog::Ask>& ask) {
    nlohmann::json j = {{"session_id", s.session_id},
                        {"state", s.decisions ? "concluded" : "awaiting_answer"},
                        {"current_question", nullptr},
                        {"current_key", nullptr},
                        {"decisions", nullptr},
                        {"rationale", nullptr},
                        {"turns_used", s.budget.used},
                        {"max_turns", s.budget.max_turns},
                        {"opportunities", s.opportunity_ids()}};
    if (s.decisions) {
        j["decisions"] = *s.decisions;
        j["rationale"] = dialog::rationale(s);
        j["fallback"] = s.fallback_ids;
    } else if (ask) {
        j["current_question"] = ask->question;
        j["current_key"] = to_string(ask->key);
    }
    return j;
}

SessionService::SessionService(std::vector<Checker> corpus, llm::Gateway& gateway, std::filesystem::path state_dir)
    : engine_(gateway), state_dir_(std::move(state_dir)) {
    for (auto& c : corpus) corpus_.push_back(std::make_shared<const Checker>(std::move(c)));
    std::filesystem::create_directories(state_dir_);
}

std::string SessionService::next_id() {
    while (true) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "s-%06zu", ++counter_);
        if (!sessions_.count(buf) && !std::filesystem::exists(state_dir_ / (std::string(buf) + ".jsonl"))) return buf;
    }
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) {
    std::lock_guard lock(sessions_mutex_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
    static const std::regex safe(R"([A-Za-z0-9_.-]+)");
    if (!std::regex_match(id, safe)) return nullptr;
    const auto path = state_dir_ / (id + ".jsonl");
    if (!std::filesystem::exists(path)) return nullptr;
    auto e = std::make_shared<Entry>();
    e->session = dialog::restore_session(path, corpus_);
    e->session.log_path = path;
    sessions_[id] = e;
    return e;
}

ApiResponse SessionService::advance(Entry& e) {
    try {
        auto action = engine_.advance(e.session);
        std::optional<dialog::Ask> ask;
        if (auto* a = std::get_if<dialog::Ask>(&action)) ask = *a;
        return {200, session_view(e.session, ask)};
    } catch (const llm::AuthError&) {
        return api_error(502, "provider_error", "the model provider rejected the configured credentials");
    } catch (const llm::TransportError& err) {
        return api_error(502, "provider_error", err.what());
    } catch (const llm::ProviderRefusal& err) {
        return api_error(502, "provider_error", err.what());
    }
}

ApiResponse SessionService::create_session(const nlohmann::json& body) {
    if (!body.is_object() || !body.contains("opportunity_ids") || !body.at("opportunity_ids").is_array()) {
        return api_error(422, "invalid_request", "body must be {\"opportunity_ids\": [...]}");
    }
    const auto& ids = body.at("opportunity_ids");
    if (ids.empty()) return api_error(422, "invalid_request", "opportunity_ids is empty");
    std::vector<dialog::CheckerRef> chosen;
    for (const auto& id : ids) {
        if (!id.is_string()) return api_error(422, "invalid_request", "opportunity ids must be strings");
        auto it = std::find_if(corpus_.begin(), corpus_.end(),
                               [&](const dialog::CheckerRef& c) { return c->id() == id.get<std::string>(); });
        if (it == corpus_.end()) {
            return api_error(404, "unknown_opportunity", "no checker for opportunity '" + id.get<std::string>() + "'");
        }
        chosen.push_back(*it);
    }
    auto e = std::make_shared<Entry>();
    {
        std::lock_guard lock(sessions_mutex_);
        const std::string id = next_id();
        try {
            e->session = engine_.open_session(std::move(chosen), id, state_dir_ / (id + ".jsonl"));
        } catch (const dialog::SessionError& err) {
            return api_error(422, "invalid_request", err.what());
        } catch (const features::SchemaConflict& err) {
            return api_error(422, "invalid_request", err.what());
        }
        sessions_[id] = e;
    }
    std::lock_guard lock(e->mutex);
    auto r = advance(*e);
    if (r.status == 200) r.status = 201;
    return r;
}

ApiResponse SessionService::post_answer(const std::string& id, const nlohmann::json& body) {
    auto e = find(id);
    if (!e) return api_error(404, "not_found", "no session '" + id + "'");
    if (!body.is_object() || !body.contains("answer") || !body.at("answer").is_string()) {
        return api_error(422, "invalid_request", "body must be {\"answer\": \"...\"}");
    }
    std::lock_guard lock(e->mutex);
    if (e->session.decisions) return api_error(409, "concluded", "session '" + id + "' has already concluded");
    if (!e->session.pending) {
        // Reloaded mid-dialog: put the next question back first.
        auto r = advance(*e);
        if (r.status != 200) return r;
        if (e->session.decisions) return api_error(409, "concluded", "session '" + id + "' has already concluded");
    }
    try {
        engine_.ingest_answer(e->session, body.at("answer").get<std::string>());
    } catch (const llm::AuthError&) {
        return api_error(502, "provider_error", "the model provider rejected the configured credentials");
    } catch (const llm::TransportError& err) {
        return api_error(502, "provider_error", err.what());
    } catch (const llm::ProviderRefusal& err) {
        return api_error(502, "provider_error", err.what());
    }
    return advance(*e);
}

ApiResponse SessionService::get_session(const std::string& id) {
    auto e = find(id);
    if (!e) return api_error(404, "not_found", "no session '" + id + "'");
    std::lock_guard lock(e->mutex);
    std::optional<dialog::Ask> ask;
    if (e->session.pending) ask = dialog::Ask{e->session.pending->question, e->session.pending->key};
    return {200, session_view(e->session, ask)};
}

ApiResponse SessionService::list_opportunities() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : corpus_) {
        out.push_back({{"id", c->id()}, {"title", c->doc.title}});
    }
    return {200, {{"opportunities", out}}};
}

ApiResponse SessionService::handle(const std::string& method, const std::string& path, const std::string& body) {
    static const std::regex answers(R"(^/v1/sessions/([^/]+)/answers/?$)");
    static const std::regex session(R"(^/v1/sessions/([^/]+)/?$)");
    nlohmann::json parsed;
    if (method == "POST") {
        try {
            parsed = body.empty() ? nlohmann::json::object() : nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception&) {
            return api_error(422, "invalid_request", "body is not valid JSON");
        }
    }
    try {
        std::smatch m;
        if (path == "/v1/sessions" || path == "/v1/sessions/") {
            if (method != "POST") return api_error(405, "method_not_allowed", method + " " + path);
            return create_session(parsed);
        }
        if (std::regex_match(path, m, answers)) {
            if (method != "POST") return api_error(405, "method_not_allowed", method + " " + path);
            return post_answer(m[1], parsed);
        }
        if (std::regex_match(path, m, session)) {
            if (method != "GET") return api_error(405, "method_not_allowed", method + " " + path);
            return get_session(m[1]);
        }
        if (path == "/v1/opportunities") {
            if (method != "GET") return api_error(405, "method_not_allowed", method + " " + path);
            return list_opportunities();
        }
        return api_error(404, "not_found", "no route " + method + " " + path);
    } catch (const Error& e) {
        return api_error(500, "internal", e.what());
    }
}

}  // namespace screener::service
