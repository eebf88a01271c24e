#pragma once

#include "screener/corpus.hpp"
#include "screener/llm/gateway.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace screener::baseline {

enum class Mode { Direct, React };

struct BaselineState {
    std::vector<std::pair<std::string, std::string>> history;  // (question, answer)
    std::string requirements;                                  // all opportunity texts, numbered
    Mode mode = Mode::Direct;
};

BaselineState initial_state(const std::vector<const RequirementDoc*>& docs, Mode mode);

class MalformedEmission : public Error {
public:
    using Error::Error;
};

struct Prediction {
    std::vector<bool> values;
    bool defaulted = false;  // constrained generation gave up; values are all false
};

// Attempts at a react question before MalformedEmission.
inline constexpr int kAskAttempts = 2;

// Prompt-only agent. React mode runs a free-form reasoning call before every
// constrained decision.
class PromptAgent {
public:
    PromptAgent(llm::Gateway& gateway, Mode mode);

    bool ready(const BaselineState& state) const;
    std::string ask(const BaselineState& state) const;
    Prediction predict(const BaselineState& state, int n) const;

private:
    llm::CompletionRequest request(const BaselineState& state, std::string prompt, std::string purpose,
                                   std::optional<double> temperature) const;

    llm::Gateway& gateway_;
    Mode mode_;
};

// Text after the last "Question:" marker, trimmed; empty when absent.
std::string question_after_marker(const std::string& emission);

using Responder = std::function<std::string(const std::string& question)>;

struct BaselineRun {
    std::vector<bool> predictions;
    int turns = 0;
    int ready_calls = 0;
    bool budget_exhausted = false;
    bool prediction_defaulted = false;
    std::vector<std::pair<std::string, std::string>> history;
};

// Ready before every question, ask until ready or out of budget, then one
// prediction over all opportunities in the given order.
BaselineRun run_baseline(const PromptAgent& agent, const std::vector<const RequirementDoc*>& docs, Mode mode,
                         const Responder& user, int max_turns);

// Coin-flip baseline: each prediction is the top bit of a 64-bit draw.
class RandomAgent {
public:
    explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}
    std::vector<bool> predict(std::size_t n);

private:
    std::mt19937_64 rng_;
};

}  // namespace screener::baseline
