#pragma once

#include "screener/error.hpp"
#include "screener/llm/gateway.hpp"
#include "screener/usersim/profile.hpp"

#include <optional>
#include <string>

namespace screener::usersim {

inline constexpr const char* kCannotAnswer = "I cannot answer that";

class OracleUnanswerable : public Error {
public:
    using Error::Error;
};

// What the oracle understood a question to ask.
struct OracleQuery {
    enum class Kind { HouseholdSize, Lookup, Count, Any } kind = Kind::Lookup;
    std::string key;        // feature key (Lookup/Count/Any)
    bool member = false;    // member-scope feature
    int person = -1;        // Lookup on a member feature
    std::string op;         // Count/Any with a threshold: < <= > >=
    double threshold = 0;
    std::string target;     // Any on a choice feature: value to look for
};

// Parses a question against the features present in `p`. Handles household
// size, direct lookups ("person i" is a 0-based member index; "you" means
// person 0), threshold counts over one numeric member feature and yes/no
// "does anyone" questions. Throws OracleUnanswerable for anything else,
// including questions naming more than one feature.
OracleQuery parse_question(const HouseholdProfile& p, const std::string& question);

// Answers the parsed query from the structured profile.
std::string answer(const HouseholdProfile& p, const OracleQuery& q);

// Deterministic user: answer(parse_question(..)), or kCannotAnswer.
std::string oracle_respond(const HouseholdProfile& p, const std::string& question);

std::string role_play_prompt(const std::string& profile_text, const std::string& question);

// LLM user: the rendered profile and the question go to the gateway.
std::string llm_respond(llm::Gateway& gw, const std::string& profile_text, const std::string& question);

}  // namespace screener::usersim
