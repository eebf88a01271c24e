#include "screener/llm/http_provider.hpp"

#include "httplib.h"
#include "json.hpp"

#include <cstdlib>

namespace screener::llm {

HttpProviderConfig HttpProviderConfig::from_environment() {
    HttpProviderConfig c;
    const char* base = std::getenv("PROVIDER_BASE_URL");
    const char* key = std::getenv("PROVIDER_API_KEY");
    const char* model = std::getenv("PROVIDER_MODEL");
    if (!base || !*base) throw AuthError("PROVIDER_BASE_URL is not set");
    if (!key || !*key) throw AuthError("PROVIDER_API_KEY is not set");
    c.base_url = base;
    c.api_key = key;
    if (model && *model) c.model = model;
    return c;
}

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
    const std::string& url = config_.base_url;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error("provider base URL needs a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    origin_ = url.substr(0, path_start);
    prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

std::string HttpProvider::complete(const CompletionRequest& req) {
    nlohmann::json body;
    body["model"] = req.model == "default" ? config_.model : req.model;
    if (req.temperature) body["temperature"] = *req.temperature;
    body["max_tokens"] = req.max_tokens;
    auto& msgs = body["messages"] = nlohmann::json::array();
    for (const auto& m : req.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});

    httplib::Client client(origin_);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);
    client.set_bearer_token_auth(config_.api_key);

    auto res = client.Post(prefix_ + "/chat/completions", body.dump(), "application/json");
    if (!res) throw TransportError("request to " + origin_ + " failed: " + httplib::to_string(res.error()));
    const int status = res->status;
    if (status == 401 || status == 403) throw AuthError("provider rejected credentials (HTTP " + std::to_string(status) + ")");
    if (status == 429 || status >= 500) throw TransportError("provider returned HTTP " + std::to_string(status));
    if (status < 200 || status >= 300) throw ProviderRefusal("provider returned HTTP " + std::to_string(status));

    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
        const auto& choice = reply.at("choices").at(0);
        if (choice.value("finish_reason", "") == "content_filter") throw ProviderRefusal("provider content filter");
        const auto& content = choice.at("message").at("content");
        if (!content.is_string()) throw ProviderRefusal("provider returned no text content");
        return content.get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw TransportError("malformed provider response");
    }
}

}  // namespace screener::llm
