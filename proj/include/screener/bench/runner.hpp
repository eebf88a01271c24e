#pragma once

#include "screener/bench/dataset.hpp"
#include "screener/bench/metrics.hpp"
#include "screener/llm/gateway.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace screener::bench {

enum class AgentKind { ProAda, Direct, React, Random };
enum class UserMode { Oracle, Llm };

std::string to_string(AgentKind agent);
std::string to_string(UserMode mode);
AgentKind parse_agent(const std::string& name);  // throws Error
UserMode parse_user_mode(const std::string& name);

inline constexpr const char* kClarityPolicy = "every clarification question counts as one turn";

struct BenchConfig {
    AgentKind agent = AgentKind::ProAda;
    UserMode user = UserMode::Oracle;
    std::uint64_t seed = 0;
    // One JSONL transcript per session when set.
    std::optional<std::filesystem::path> transcripts_dir;
    int parallelism = 1;
};

struct PairResult {
    std::string household;
    std::string opportunity_id;
    bool prediction = false;
    bool gold = false;
};

struct SessionResult {
    std::string household;
    int turns = 0;
    bool budget_exhausted = false;
    bool failed = false;  // an error ended the session; its predictions are false
    std::string error;
};

struct BenchmarkReport {
    std::vector<PairResult> pairs;
    std::vector<SessionResult> sessions;
    F1Scores scores;
    double turns_mean = 0;
    double turn_weighted_f1 = 0;
    std::string agent;
    std::string provider;
    std::string user_mode;
    std::uint64_t seed = 0;
    std::string clarity_policy = kClarityPolicy;

    std::size_t failed_sessions() const;
};

nlohmann::json to_json(const BenchmarkReport& report);

// One session per record over its opportunities, each capped at the turn
// budget. `agent_gw` serves the agent; `user_gw` the simulated user in LLM
// mode (may be null otherwise). Per-session errors are recorded and the run
// goes on. Throws Error when the dataset has no pairs or lacks gold, or when
// LLM user mode has no user gateway.
BenchmarkReport run_benchmark(const std::vector<DatasetRecord>& dataset, const std::vector<Checker>& corpus,
                              llm::Gateway& agent_gw, llm::Gateway* user_gw, const BenchConfig& config);

}  // namespace screener::bench
