#pragma once

#include "screener/dialog/session.hpp"
#include "screener/llm/gateway.hpp"

namespace screener::dialog {

struct EngineConfig {
    int max_clarifications = kMaxClarifications;
    int extraction_attempts = llm::kDefaultMaxAttempts;
};

// The program-guided dialog loop. Stateless apart from the gateway; any
// number of sessions may share one engine.
class Engine {
public:
    explicit Engine(llm::Gateway& gateway, EngineConfig config = {});

    // Throws SessionError for an empty or duplicated checker list and
    // features::SchemaConflict when two checkers type one key differently.
    Session open_session(std::vector<CheckerRef> checkers, std::string session_id,
                         std::optional<std::filesystem::path> log_path = std::nullopt) const;

    // Runs every undecided checker in id order. Asks about the first missing
    // key, or concludes when nothing is left to ask (or the budget is spent).
    // Throws SessionError if a question is pending.
    AgentAction step(Session& session) const;

    // Extracts, validates and stores the answer to the pending question; on
    // failure issues a clarification or abandons the key. Throws SessionError
    // when nothing is pending.
    void ingest_answer(Session& session, const std::string& answer) const;

    // What the user sees next: the pending question, or step().
    AgentAction advance(Session& session) const;

    // Decides every undecided opportunity with one prediction call. On any
    // gateway failure those opportunities become false.
    std::map<std::string, bool> conclude_fallback(Session& session) const;

    // One question about `key`. Member keys always name the member.
    std::string formulate_question(const KeyPath& key, const std::string& line, const RequirementDoc& doc,
                                   const std::vector<Turn>& history) const;

private:
    AgentAction finish(Session& session) const;
    std::string clarification_question(const Session& session, const std::string& answer,
                                       const std::string& reason) const;

    llm::Gateway& gateway_;
    EngineConfig config_;
};

// Readability pass over a generated question: first line only, no wrapping
// quotes, underscores turned into spaces, and a "person i" reference added to
// member questions that lack one.
std::string polish_question(std::string question, const KeyPath& key);

// Deterministic question used when the model cannot produce one.
std::string default_question(const KeyPath& key);

// Dialog history as chat messages: each question from the assistant, each
// answer from the user.
std::vector<llm::Message> history_messages(const std::vector<Turn>& history);

}  // namespace screener::dialog
