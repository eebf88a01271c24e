#include "screener/llm/gateway.hpp"

#include "json.hpp"

#include <thread>

namespace screener::llm {

CompletionRequest user_prompt(std::string text, std::string purpose, std::optional<double> temperature) {
    CompletionRequest req;
    req.messages.push_back({"user", std::move(text)});
    req.purpose = std::move(purpose);
    req.temperature = temperature;
    return req;
}

void check_request(const CompletionRequest& req) {
    if (req.messages.empty()) throw InvalidRequest("completion request has no messages");
    if (req.temperature && !(*req.temperature >= 0)) throw InvalidRequest("temperature must be non-negative");
    if (req.max_tokens < 1) throw InvalidRequest("max_tokens must be positive");
}

std::chrono::milliseconds RetryPolicy::delay_for(int retry) const {
    auto d = base_delay;
    for (int i = 0; i < retry && d < max_delay; ++i) d *= 2;
    return std::min(d, max_delay);
}

RateLimiter::RateLimiter(double per_second, double burst)
    : rate_(per_second), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)), last_(Clock::now()) {}

std::chrono::milliseconds RateLimiter::reserve() {
    if (rate_ <= 0) return std::chrono::milliseconds(0);
    std::lock_guard lock(mutex_);
    const auto now = Clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
    tokens_ -= 1.0;
    if (tokens_ >= 0) return std::chrono::milliseconds(0);
    return std::chrono::milliseconds(static_cast<long>(-tokens_ / rate_ * 1000.0 + 0.5));
}

Gateway::Gateway(std::shared_ptr<Provider> provider, GatewayOptions options)
    : provider_(std::move(provider)),
      options_(std::move(options)),
      limiter_(options_.requests_per_second, options_.burst) {
    if (!provider_) throw Error("gateway needs a provider");
    provider_name_ = provider_->name();
    if (!options_.sleep) options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    if (options_.audit_path) {
        if (options_.audit_path->has_parent_path()) std::filesystem::create_directories(options_.audit_path->parent_path());
        audit_.open(*options_.audit_path, std::ios::app);
        if (!audit_) throw Error("cannot open audit log " + options_.audit_path->string());
    }
}

void Gateway::audit(std::size_t seq, const CompletionRequest& req, const std::string* response,
                    const std::string* error, int transport_attempts) {
    if (!audit_.is_open()) return;
    nlohmann::json entry;
    entry["seq"] = seq;
    entry["provider"] = provider_name_;
    entry["model"] = req.model;
    entry["purpose"] = req.purpose;
    entry["temperature"] = req.temperature ? nlohmann::json(*req.temperature) : nlohmann::json(nullptr);
    entry["max_tokens"] = req.max_tokens;
    auto& msgs = entry["messages"] = nlohmann::json::array();
    for (const auto& m : req.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    entry["response"] = response ? nlohmann::json(*response) : nlohmann::json(nullptr);
    if (error) entry["error"] = *error;
    entry["transport_attempts"] = transport_attempts;
    std::lock_guard lock(audit_mutex_);
    audit_ << entry.dump() << '\n';
    audit_.flush();
}

std::string Gateway::complete(const CompletionRequest& req) {
    const std::size_t seq = calls_.fetch_add(1);
    try {
        check_request(req);
    } catch (const InvalidRequest& e) {
        const std::string msg = e.what();
        audit(seq, req, nullptr, &msg, 0);
        throw;
    }
    int attempt = 0;
    while (true) {
        if (auto wait = limiter_.reserve(); wait.count() > 0) options_.sleep(wait);
        ++attempt;
        try {
            std::string out = provider_->complete(req);
            audit(seq, req, &out, nullptr, attempt);
            return out;
        } catch (const TransportError& e) {
            if (attempt > options_.retry.max_retries) {
                const std::string msg = std::string("transport: ") + e.what();
                audit(seq, req, nullptr, &msg, attempt);
                throw TransportError(std::string(e.what()) + " (after " + std::to_string(attempt) + " attempts)");
            }
            options_.sleep(options_.retry.delay_for(attempt - 1));
        } catch (const AuthError& e) {
            const std::string msg = std::string("auth: ") + e.what();
            audit(seq, req, nullptr, &msg, attempt);
            throw;
        } catch (const ProviderRefusal& e) {
            const std::string msg = std::string("refusal: ") + e.what();
            audit(seq, req, nullptr, &msg, attempt);
            throw;
        }
    }
}

ConstrainedValue Gateway::complete_constrained(CompletionRequest req, const OutputConstraint& c, int max_attempts) {
    if (max_attempts < 1) throw InvalidRequest("max_attempts must be at least 1");
    c.check();
    req.temperature = 0.0;
    const std::size_t base_messages = req.messages.size();
    std::string last_raw;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        last_raw = complete(req);
        if (auto v = parse_constrained(c, last_raw)) return *v;
        req.messages.resize(base_messages);
        req.messages.push_back({"assistant", last_raw});
        req.messages.push_back({"user", "That answer is not in the required format. Reply with " + c.describe() +
                                            " and nothing else."});
    }
    throw ConstraintExhausted("no emission matched " + c.describe() + " after " + std::to_string(max_attempts) +
                                  " attempts",
                              last_raw, max_attempts);
}

bool Gateway::complete_boolean(CompletionRequest req, int max_attempts) {
    return std::get<bool>(complete_constrained(std::move(req), OutputConstraint::boolean(), max_attempts));
}

std::vector<bool> Gateway::complete_boolean_array(CompletionRequest req, int n, int max_attempts) {
    return std::get<std::vector<bool>>(
        complete_constrained(std::move(req), OutputConstraint::boolean_array(n), max_attempts));
}

}  // namespace screener::llm
