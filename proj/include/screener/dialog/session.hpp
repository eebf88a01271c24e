#pragma once

#include "screener/corpus.hpp"
#include "screener/features/store.hpp"
#include "screener/rules/evaluator.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace screener::dialog {

inline constexpr int kMaxClarifications = 3;
inline constexpr int kTurnsPerOpportunity = 20;
inline constexpr int kTurnCap = 100;

struct TurnBudget {
    int max_turns = 0;
    int used = 0;

    // min(20 * k, 100).
    static TurnBudget for_opportunities(std::size_t k);
    bool exhausted() const { return used >= max_turns; }
};

enum class TurnOutcome { Stored, Clarified, Abandoned };
std::string to_string(TurnOutcome outcome);

struct Turn {
    std::string question;
    std::string answer;
    KeyPath key;
    std::optional<FeatureValue> extracted;  // present iff outcome is Stored
    TurnOutcome outcome = TurnOutcome::Stored;
};

struct PendingQuestion {
    KeyPath key;
    std::string question;
    int clarity_attempts_used = 0;
    rules::NodeId source_node = 0;
    std::string source_program;
};

struct Ask {
    std::string question;
    KeyPath key;
};

struct Conclude {
    std::map<std::string, bool> decisions;
};

using AgentAction = std::variant<Ask, Conclude>;

using CheckerRef = std::shared_ptr<const Checker>;

// Full state of one dialog. Mutated only through Engine.
struct Session {
    std::string session_id;
    std::vector<CheckerRef> checkers;  // sorted by opportunity id
    features::FeatureStore store;
    std::vector<Turn> transcript;
    std::optional<PendingQuestion> pending;
    TurnBudget budget;
    std::optional<std::map<std::string, bool>> decisions;

    // Checker results computed so far (cached: a decision never changes once
    // the store can only grow).
    std::map<std::string, rules::Decision> computed;
    std::set<KeyPath> abandoned;
    std::set<std::string> fallback_ids;  // opportunities decided by conclude_fallback
    bool fallback_failed = false;        // the fallback call failed; those ids defaulted to false
    bool budget_exhausted = false;

    // When set, every turn and the final decisions are appended here.
    std::optional<std::filesystem::path> log_path;

    std::vector<std::string> opportunity_ids() const;
    const Checker& checker(const std::string& id) const;
};

class SessionError : public Error {
public:
    using Error::Error;
};

class BudgetExhausted : public Error {
public:
    using Error::Error;
};

// Per-opportunity rationale: the executed statements of the deciding trace,
// in program order. Fallback decisions get a one-line note instead.
std::map<std::string, std::vector<std::string>> rationale(const Session& session);

nlohmann::json turn_to_json(const Turn& turn, std::size_t index);
Turn turn_from_json(const nlohmann::json& j);

// Replays a session log. Stored turns are re-applied to a fresh store, so the
// checkers must be the ones the session was opened with. Throws SessionError.
Session restore_session(const std::filesystem::path& log_path, const std::vector<CheckerRef>& corpus);

// Reads the raw JSONL records of a session log.
std::vector<nlohmann::json> read_log(const std::filesystem::path& log_path);

}  // namespace screener::dialog
