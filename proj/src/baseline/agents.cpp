#include "screener/baseline/agents.hpp"

#include "screener/synth/prompts.hpp"
#include "screener/text.hpp"

namespace screener::baseline {

namespace prompts = synth::prompts;

BaselineState initial_state(const std::vector<const RequirementDoc*>& docs, Mode mode) {
    BaselineState s;
    s.requirements = requirements_block(docs);
    s.mode = mode;
    return s;
}

std::string question_after_marker(const std::string& emission) {
    const std::string marker = "Question:";
    auto pos = emission.rfind(marker);
    if (pos == std::string::npos) return {};
    std::string q = text::trim(emission.substr(pos + marker.size()));
    auto nl = q.find('\n');
    if (nl != std::string::npos) q = text::trim(q.substr(0, nl));
    return q;
}

PromptAgent::PromptAgent(llm::Gateway& gateway, Mode mode) : gateway_(gateway), mode_(mode) {}

llm::CompletionRequest PromptAgent::request(const BaselineState& state, std::string prompt, std::string purpose,
                                            std::optional<double> temperature) const {
    llm::CompletionRequest req;
    for (const auto& [q, a] : state.history) {
        req.messages.push_back({"assistant", q});
        req.messages.push_back({"user", a});
    }
    req.messages.push_back({"user", std::move(prompt)});
    req.purpose = std::move(purpose);
    req.temperature = temperature;
    return req;
}

bool PromptAgent::ready(const BaselineState& state) const {
    if (mode_ == Mode::Direct) {
        return gateway_.complete_boolean(request(
            state, text::render(prompts::kReady, {{"eligibility_requirements", state.requirements}}), "ready", 0.0));
    }
    const std::string reasoning = gateway_.complete(request(
        state, text::render(prompts::kReadyCot, {{"eligibility_requirements", state.requirements}}), "ready-reason",
        std::nullopt));
    return gateway_.complete_boolean(
        request(state, text::render(prompts::kReadyConstrained, {{"reasoning", reasoning}}), "ready", 0.0));
}

std::string PromptAgent::ask(const BaselineState& state) const {
    if (mode_ == Mode::Direct) {
        std::string q = text::trim(gateway_.complete(request(
            state, text::render(prompts::kAsk, {{"eligibility_requirements", state.requirements}}), "ask",
            std::nullopt)));
        if (q.empty()) throw MalformedEmission("empty question");
        return q;
    }
    const std::string prompt = text::render(prompts::kAskReact, {{"eligibility_requirements", state.requirements}});
    for (int attempt = 0; attempt < kAskAttempts; ++attempt) {
        std::string q = question_after_marker(gateway_.complete(request(state, prompt, "ask", std::nullopt)));
        if (!q.empty()) return q;
    }
    throw MalformedEmission("no 'Question:' marker after " + std::to_string(kAskAttempts) + " attempts");
}

Prediction PromptAgent::predict(const BaselineState& state, int n) const {
    if (n < 1) throw Error("predict needs at least one program");
    const std::map<std::string, std::string> slots{{"eligibility_requirements", state.requirements},
                                                   {"num_programs", std::to_string(n)},
                                                   {"example_array", synth::example_array(n)}};
    try {
        if (mode_ == Mode::Direct) {
            return {gateway_.complete_boolean_array(request(state, text::render(prompts::kPredict, slots), "predict", 0.0), n),
                    false};
        }
        const std::string reasoning =
            gateway_.complete(request(state, text::render(prompts::kPredictReasoning, slots), "predict-reason",
                                      std::nullopt));
        auto constrained_slots = slots;
        constrained_slots["reasoning"] = reasoning;
        return {gateway_.complete_boolean_array(
                    request(state, text::render(prompts::kPredictConstrained, constrained_slots), "predict", 0.0), n),
                false};
    } catch (const llm::ConstraintExhausted&) {
        return {std::vector<bool>(static_cast<std::size_t>(n), false), true};
    }
}

BaselineRun run_baseline(const PromptAgent& agent, const std::vector<const RequirementDoc*>& docs, Mode mode,
                         const Responder& user, int max_turns) {
    if (docs.empty()) throw Error("baseline run needs at least one opportunity");
    BaselineState state = initial_state(docs, mode);
    BaselineRun run;
    while (true) {
        if (run.turns >= max_turns) {
            run.budget_exhausted = true;
            break;
        }
        ++run.ready_calls;
        if (agent.ready(state)) break;
        std::string q = agent.ask(state);
        std::string a = user(q);
        state.history.emplace_back(std::move(q), std::move(a));
        ++run.turns;
    }
    auto p = agent.predict(state, static_cast<int>(docs.size()));
    run.predictions = std::move(p.values);
    run.prediction_defaulted = p.defaulted;
    run.history = state.history;
    return run;
}

std::vector<bool> RandomAgent::predict(std::size_t n) {
    std::vector<bool> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back((rng_() >> 63) != 0);
    return out;
}

}  // namespace screener::baseline
