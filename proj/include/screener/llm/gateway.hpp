#pragma once

#include "screener/llm/constraint.hpp"
#include "screener/llm/provider.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>

namespace screener::llm {

struct RetryPolicy {
    int max_retries = 3;  // extra attempts after the first transport failure
    std::chrono::milliseconds base_delay{250};
    std::chrono::milliseconds max_delay{4000};

    // base_delay * 2^retry, capped at max_delay.
    std::chrono::milliseconds delay_for(int retry) const;
};

// Token bucket; rate <= 0 disables limiting.
class RateLimiter {
public:
    using Clock = std::chrono::steady_clock;
    RateLimiter(double per_second, double burst);

    // Time the caller must wait before its call may go out (zero if a token
    // was available). Consumes the token either way.
    std::chrono::milliseconds reserve();

private:
    std::mutex mutex_;
    double rate_;
    double burst_;
    double tokens_;
    Clock::time_point last_;
};

struct GatewayOptions {
    RetryPolicy retry;
    double requests_per_second = 0;
    double burst = 1;
    std::optional<std::filesystem::path> audit_path;
    // Replaced in tests so backoff does not actually sleep.
    std::function<void(std::chrono::milliseconds)> sleep;
};

// Thread-safe front door to a provider: retries, rate limiting, constrained
// generation and the audit log.
class Gateway {
public:
    Gateway(std::shared_ptr<Provider> provider, GatewayOptions options = {});

    // Throws InvalidRequest, TransportError (after retries), AuthError,
    // ProviderRefusal.
    std::string complete(const CompletionRequest& req);

    // Validate-and-regenerate: at most max_attempts provider calls, temperature
    // forced to 0. After a bad emission the next attempt carries the bad
    // output and a format reminder. Throws ConstraintExhausted.
    ConstrainedValue complete_constrained(CompletionRequest req, const OutputConstraint& c, int max_attempts = 3);

    bool complete_boolean(CompletionRequest req, int max_attempts = 3);
    std::vector<bool> complete_boolean_array(CompletionRequest req, int n, int max_attempts = 3);

    const std::string& provider_name() const { return provider_name_; }
    // complete() invocations so far, failed ones included.
    std::size_t call_count() const { return calls_.load(); }

private:
    void audit(std::size_t seq, const CompletionRequest& req, const std::string* response, const std::string* error,
               int transport_attempts);

    std::shared_ptr<Provider> provider_;
    std::string provider_name_;
    GatewayOptions options_;
    RateLimiter limiter_;
    std::atomic<std::size_t> calls_{0};
    std::mutex audit_mutex_;
    std::ofstream audit_;
};

inline constexpr int kDefaultMaxAttempts = 3;

}  // namespace screener::llm
