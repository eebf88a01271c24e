#pragma once

#include "screener/llm/provider.hpp"

#include "json.hpp"

#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <vector>

namespace screener::llm {

struct MockResponse {
    enum class Kind { Text, TransportFailure, AuthFailure, Refusal };
    Kind kind = Kind::Text;
    std::string text;

    static MockResponse reply(std::string text) { return {Kind::Text, std::move(text)}; }
    static MockResponse fail(Kind kind) { return {kind, {}}; }
};

// One scripted behaviour. A rule applies when every set matcher holds:
// `purpose` equals the request purpose, `contains` occurs somewhere in the
// conversation, `pattern` matches somewhere in it.
struct MockRule {
    std::string purpose;
    std::string contains;
    std::optional<std::string> pattern;
    std::vector<MockResponse> responses;
    // sequence: step through, then repeat the last; cycle: wrap around;
    // random: seeded pick.
    enum class Order { Sequence, Cycle, Random } order = Order::Sequence;
};

// What to do when no rule matches.
enum class MockFallback {
    Template,  // canned answers keyed on the built-in prompt shapes
    Refuse,    // ProviderRefusal
};

struct MockScript {
    std::vector<MockRule> rules;
    std::uint64_t seed = 0;
    MockFallback fallback = MockFallback::Template;
};

// {"seed": 1, "fallback": "template", "rules": [{"purpose": "ready",
//  "contains": "...", "pattern": "...", "order": "sequence",
//  "responses": ["True", {"error": "transport"}]}]}
MockScript mock_script_from_json(const nlohmann::json& j);

// Deterministic provider. The same script and seed always yield the same
// replies for the same request sequence.
class MockProvider : public Provider {
public:
    explicit MockProvider(MockScript script = {});

    std::string name() const override { return "mock"; }
    std::string complete(const CompletionRequest& req) override;

    std::size_t calls() const;
    // Every request seen, in order.
    std::vector<CompletionRequest> requests() const;

    void add_rule(MockRule rule);

private:
    struct RuleState {
        MockRule rule;
        std::optional<std::regex> regex;
        std::size_t cursor = 0;
    };

    mutable std::mutex mutex_;
    std::vector<RuleState> rules_;
    MockFallback fallback_;
    std::mt19937_64 rng_;
    std::vector<CompletionRequest> seen_;
};

// Canned persona used by MockFallback::Template; nullopt when the prompt is
// not one it recognises. Exposed for tests.
std::optional<std::string> template_reply(const CompletionRequest& req);

}  // namespace screener::llm
