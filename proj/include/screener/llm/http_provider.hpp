#pragma once

#include "screener/llm/provider.hpp"

#include <optional>
#include <string>

namespace screener::llm {

struct HttpProviderConfig {
    std::string base_url;  // e.g. https://api.example.com/v1
    std::string api_key;
    std::string model = "gpt-4o";
    int timeout_seconds = 60;

    // Reads PROVIDER_BASE_URL and PROVIDER_API_KEY (and PROVIDER_MODEL if
    // set). Throws AuthError when the base URL or key is missing.
    static HttpProviderConfig from_environment();
};

// OpenAI-style chat-completions client: POST {base_url}/chat/completions.
class HttpProvider : public Provider {
public:
    explicit HttpProvider(HttpProviderConfig config);

    std::string name() const override { return "http"; }
    std::string complete(const CompletionRequest& req) override;

private:
    HttpProviderConfig config_;
    std::string origin_;  // scheme://host[:port]
    std::string prefix_;  // path part of base_url, no trailing slash
};

}  // namespace screener::llm
