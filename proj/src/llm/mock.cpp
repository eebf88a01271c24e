#include "screener/llm/mock.hpp"

#include "screener/text.hpp"

namespace screener::llm {

namespace {

MockResponse response_from_json(const nlohmann::json& j) {
    if (j.is_string()) return MockResponse::reply(j.get<std::string>());
    const std::string err = j.at("error").get<std::string>();
    if (err == "transport") return MockResponse::fail(MockResponse::Kind::TransportFailure);
    if (err == "auth") return MockResponse::fail(MockResponse::Kind::AuthFailure);
    if (err == "refusal") return MockResponse::fail(MockResponse::Kind::Refusal);
    throw Error("unknown mock error kind: " + err);
}

std::string conversation_text(const CompletionRequest& req) {
    std::string all;
    for (const auto& m : req.messages) {
        all += m.content;
        all += '\n';
    }
    return all;
}

std::string spaced(std::string key) {
    return text::replace_all(std::move(key), "_", " ");
}

std::string between(const std::string& s, const std::string& open, const std::string& close) {
    auto b = s.find(open);
    if (b == std::string::npos) return {};
    b += open.size();
    auto e = s.find(close, b);
    return s.substr(b, e == std::string::npos ? std::string::npos : e - b);
}

// hh["size"] / hh[2]["age"] -> question text.
std::string question_for(const std::string& key_text) {
    static const std::regex member(R"re(hh\[(\d+)\]\["([^"]+)"\])re");
    static const std::regex household(R"re(hh\["([^"]+)"\])re");
    std::smatch m;
    if (std::regex_search(key_text, m, member)) {
        return "What is the " + spaced(m[2]) + " of person " + m[1].str() + "?";
    }
    if (std::regex_search(key_text, m, household)) {
        if (m[1] == "size") return "How many people live in your household?";
        return "What is your household's " + spaced(m[1]) + "?";
    }
    return "Could you tell me more about your household?";
}

std::optional<int> array_length(const std::string& prompt) {
    static const std::regex re(R"(boolean array of length (\d+))");
    std::smatch m;
    if (std::regex_search(prompt, m, re)) return std::stoi(m[1]);
    return std::nullopt;
}

std::optional<std::string> reply_for(const std::string& prompt) {
    if (prompt.find("We need to determine what value of") != std::string::npos) {
        std::string q = question_for(between(prompt, "what value of ", " should be stored"));
        if (prompt.find("could not be used") != std::string::npos) q = "Sorry, I did not follow. " + q;
        return q;
    }
    if (prompt.find("We need to extract the value of") != std::string::npos) {
        return text::trim(between(prompt, "\nAnswer: ", "\n\nWhat should we set"));
    }
    if (auto n = array_length(prompt)) {
        std::string out = "[";
        for (int i = 0; i < *n; ++i) out += i ? ", false" : "false";
        return out + "]";
    }
    if (prompt.find("the information sufficient") != std::string::npos) return std::string("True");
    if (prompt.find("Ask a clarifying question") != std::string::npos) {
        if (prompt.find("state your question after a colon") != std::string::npos) {
            return std::string("The household composition comes first. Question: How many people live in your household?");
        }
        return std::string("How many people live in your household?");
    }
    if (prompt.find("Return ONLY int, float, or choice") != std::string::npos) {
        const std::string key = text::lower(between(prompt, "Target key:", "\n\nQuestion"));
        for (const char* w : {"age", "count", "number", "size", "year", "hours"}) {
            if (key.find(w) != std::string::npos) return std::string("int");
        }
        for (const char* w : {"income", "amount", "rent", "wage", "salary", "cost"}) {
            if (key.find(w) != std::string::npos) return std::string("float");
        }
        return std::string("choice");
    }
    if (prompt.find("what are the possible values of") != std::string::npos) return std::string(R"(["yes", "no"])");
    if (prompt.find("You are role-playing a member of the household") != std::string::npos) {
        return std::string("I cannot answer that");
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> template_reply(const CompletionRequest& req) {
    // Earlier user messages may be dialog answers, later ones format
    // reminders; the newest recognisable prompt wins.
    for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it) {
        if (it->role != "user") continue;
        if (auto reply = reply_for(it->content)) return reply;
    }
    return std::nullopt;
}

MockScript mock_script_from_json(const nlohmann::json& j) {
    MockScript script;
    script.seed = j.value("seed", std::uint64_t{0});
    const std::string fb = j.value("fallback", std::string("template"));
    if (fb == "template") {
        script.fallback = MockFallback::Template;
    } else if (fb == "refuse") {
        script.fallback = MockFallback::Refuse;
    } else {
        throw Error("unknown mock fallback: " + fb);
    }
    for (const auto& r : j.value("rules", nlohmann::json::array())) {
        MockRule rule;
        rule.purpose = r.value("purpose", "");
        rule.contains = r.value("contains", "");
        if (r.contains("pattern")) rule.pattern = r.at("pattern").get<std::string>();
        const std::string order = r.value("order", "sequence");
        if (order == "sequence") {
            rule.order = MockRule::Order::Sequence;
        } else if (order == "cycle") {
            rule.order = MockRule::Order::Cycle;
        } else if (order == "random") {
            rule.order = MockRule::Order::Random;
        } else {
            throw Error("unknown mock rule order: " + order);
        }
        for (const auto& resp : r.at("responses")) rule.responses.push_back(response_from_json(resp));
        if (rule.responses.empty()) throw Error("mock rule without responses");
        script.rules.push_back(std::move(rule));
    }
    return script;
}

MockProvider::MockProvider(MockScript script) : fallback_(script.fallback), rng_(script.seed) {
    for (auto& r : script.rules) add_rule(std::move(r));
}

void MockProvider::add_rule(MockRule rule) {
    if (rule.responses.empty()) throw Error("mock rule without responses");
    std::lock_guard lock(mutex_);
    RuleState st{std::move(rule), std::nullopt, 0};
    if (st.rule.pattern) st.regex.emplace(*st.rule.pattern);
    rules_.push_back(std::move(st));
}

std::size_t MockProvider::calls() const {
    std::lock_guard lock(mutex_);
    return seen_.size();
}

std::vector<CompletionRequest> MockProvider::requests() const {
    std::lock_guard lock(mutex_);
    return seen_;
}

std::string MockProvider::complete(const CompletionRequest& req) {
    std::lock_guard lock(mutex_);
    seen_.push_back(req);
    const std::string convo = conversation_text(req);
    for (auto& st : rules_) {
        const MockRule& r = st.rule;
        if (!r.purpose.empty() && r.purpose != req.purpose) continue;
        if (!r.contains.empty() && convo.find(r.contains) == std::string::npos) continue;
        if (st.regex && !std::regex_search(convo, *st.regex)) continue;

        std::size_t idx = 0;
        switch (r.order) {
            case MockRule::Order::Sequence: idx = std::min(st.cursor, r.responses.size() - 1); break;
            case MockRule::Order::Cycle: idx = st.cursor % r.responses.size(); break;
            case MockRule::Order::Random: idx = static_cast<std::size_t>(rng_() % r.responses.size()); break;
        }
        ++st.cursor;
        const MockResponse& resp = r.responses[idx];
        switch (resp.kind) {
            case MockResponse::Kind::Text: return resp.text;
            case MockResponse::Kind::TransportFailure: throw TransportError("mock: scripted transport failure");
            case MockResponse::Kind::AuthFailure: throw AuthError("mock: scripted auth failure");
            case MockResponse::Kind::Refusal: throw ProviderRefusal("mock: scripted refusal");
        }
    }
    if (fallback_ == MockFallback::Template) {
        if (auto reply = template_reply(req)) return *reply;
    }
    throw ProviderRefusal("mock: no scripted response for purpose '" + req.purpose + "'");
}

}  // namespace screener::llm
