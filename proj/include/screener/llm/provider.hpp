#pragma once

#include "screener/error.hpp"

#include <optional>
#include <string>
#include <vector>

namespace screener::llm {

struct Message {
    std::string role;  // "system", "user" or "assistant"
    std::string content;

    bool operator==(const Message&) const = default;
};

struct CompletionRequest {
    std::vector<Message> messages;
    std::optional<double> temperature;  // unset: provider default
    int max_tokens = 1024;
    std::string model = "default";
    // Free-form tag ("key-error", "extract", "ready", ...). Lets mock scripts
    // and the audit log tell call sites apart; never sent to the provider.
    std::string purpose;
};

// Convenience for the common single-turn case.
CompletionRequest user_prompt(std::string text, std::string purpose, std::optional<double> temperature = 0.0);

class InvalidRequest : public Error {
public:
    using Error::Error;
};

// Retryable: connection failures, timeouts, 429 and 5xx responses.
class TransportError : public Error {
public:
    using Error::Error;
};

class AuthError : public Error {
public:
    using Error::Error;
};

// The provider answered but declined (content filter, 4xx other than auth).
class ProviderRefusal : public Error {
public:
    using Error::Error;
};

// Throws InvalidRequest unless messages are non-empty and temperature >= 0.
void check_request(const CompletionRequest& req);

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string name() const = 0;
    // One raw attempt. Throws TransportError, AuthError or ProviderRefusal.
    virtual std::string complete(const CompletionRequest& req) = 0;
};

}  // namespace screener::llm
