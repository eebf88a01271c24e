#include "screener/dialog/session.hpp"

#include "screener/rules/printer.hpp"
#include "screener/corpus.hpp"

#include <algorithm>
#include <fstream>

namespace screener::dialog {

TurnBudget TurnBudget::for_opportunities(std::size_t k) {
    const std::size_t scaled = k * static_cast<std::size_t>(kTurnsPerOpportunity);
    return TurnBudget{static_cast<int>(std::min<std::size_t>(scaled, kTurnCap)), 0};
}

std::string to_string(TurnOutcome outcome) {
    switch (outcome) {
        case TurnOutcome::Stored: return "stored";
        case TurnOutcome::Clarified: return "clarified";
        case TurnOutcome::Abandoned: return "abandoned";
    }
    return "unknown";
}

namespace {

TurnOutcome outcome_from_string(const std::string& s) {
    if (s == "stored") return TurnOutcome::Stored;
    if (s == "clarified") return TurnOutcome::Clarified;
    if (s == "abandoned") return TurnOutcome::Abandoned;
    throw SessionError("unknown turn outcome: " + s);
}

}  // namespace

std::vector<std::string> Session::opportunity_ids() const {
    std::vector<std::string> ids;
    for (const auto& c : checkers) ids.push_back(c->id());
    return ids;
}

const Checker& Session::checker(const std::string& id) const {
    for (const auto& c : checkers) {
        if (c->id() == id) return *c;
    }
    throw SessionError("session has no opportunity " + id);
}

std::map<std::string, std::vector<std::string>> rationale(const Session& s) {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& c : s.checkers) {
        auto it = s.computed.find(c->id());
        if (it == s.computed.end()) {
            if (s.fallback_ids.count(c->id())) {
                out[c->id()] = {s.fallback_failed ? "undecided by the rules; defaulted to not eligible"
                                                  : "undecided by the rules; estimated from the conversation"};
            }
            continue;
        }
        auto& lines = out[c->id()];
        for (rules::NodeId id : it->second.trace.executed) lines.push_back(rules::node_line(c->program, id));
    }
    return out;
}

nlohmann::json turn_to_json(const Turn& t, std::size_t index) {
    return {{"type", "turn"},
            {"index", index},
            {"question", t.question},
            {"answer", t.answer},
            {"key", to_string(t.key)},
            {"extracted", t.extracted ? features::value_to_json(*t.extracted) : nlohmann::json(nullptr)},
            {"outcome", to_string(t.outcome)}};
}

Turn turn_from_json(const nlohmann::json& j) {
    Turn t;
    t.question = j.at("question").get<std::string>();
    t.answer = j.at("answer").get<std::string>();
    t.key = parse_key_path(j.at("key").get<std::string>());
    if (!j.at("extracted").is_null()) t.extracted = features::value_from_json(j.at("extracted"));
    t.outcome = outcome_from_string(j.at("outcome").get<std::string>());
    if (t.outcome == TurnOutcome::Stored && !t.extracted) throw SessionError("stored turn without a value");
    return t;
}

std::vector<nlohmann::json> read_log(const std::filesystem::path& log_path) {
    std::ifstream in(log_path);
    if (!in) throw SessionError("cannot read session log " + log_path.string());
    std::vector<nlohmann::json> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw SessionError(log_path.string() + ": " + e.what());
        }
    }
    return out;
}

Session restore_session(const std::filesystem::path& log_path, const std::vector<CheckerRef>& corpus) {
    const auto records = read_log(log_path);
    if (records.empty() || records.front().value("type", "") != "open") {
        throw SessionError(log_path.string() + ": log does not start with an open record");
    }
    const auto& open = records.front();
    Session s;
    s.session_id = open.at("session_id").get<std::string>();
    features::FeatureSchema merged;
    for (const auto& id : open.at("opportunities")) {
        auto it = std::find_if(corpus.begin(), corpus.end(), [&](const CheckerRef& c) { return c->id() == id; });
        if (it == corpus.end()) throw SessionError("session refers to unknown opportunity " + id.get<std::string>());
        s.checkers.push_back(*it);
        merged = features::merge(merged, (*it)->schema);
    }
    s.budget.max_turns = open.at("max_turns").get<int>();
    s.store = features::FeatureStore(std::move(merged));

    std::optional<PendingQuestion> last_ask;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& r = records[i];
        const std::string type = r.value("type", "");
        if (type == "ask") {
            last_ask = PendingQuestion{parse_key_path(r.at("key").get<std::string>()),
                                       r.at("question").get<std::string>(), r.at("clarity_attempts_used").get<int>(),
                                       r.at("source_node").get<rules::NodeId>(),
                                       r.at("source_program").get<std::string>()};
        } else if (type == "turn") {
            Turn t = turn_from_json(r);
            if (t.outcome == TurnOutcome::Stored) {
                if (auto err = s.store.put_value(t.key, *t.extracted)) {
                    throw SessionError("logged value no longer valid: " + err->message());
                }
            }
            if (t.outcome == TurnOutcome::Abandoned) s.abandoned.insert(t.key);
            s.transcript.push_back(std::move(t));
            s.budget.used += 1;
            last_ask.reset();
        } else if (type == "decisions") {
            s.decisions = r.at("decisions").get<std::map<std::string, bool>>();
            for (const auto& id : r.at("fallback")) s.fallback_ids.insert(id.get<std::string>());
            s.fallback_failed = r.at("fallback_failed").get<bool>();
            s.budget_exhausted = r.at("budget_exhausted").get<bool>();
        } else {
            throw SessionError("unknown session record type '" + type + "'");
        }
    }
    // Rebuild the decided traces so rationales survive a restart.
    for (const auto& c : s.checkers) {
        if (s.fallback_ids.count(c->id())) continue;
        auto outcome = rules::evaluate(c->program, s.store);
        if (auto* d = std::get_if<rules::Decision>(&outcome)) s.computed.emplace(c->id(), std::move(*d));
    }
    if (!s.decisions) {
        s.pending = last_ask;
        // Evaluation is monotone, so recomputed decisions match the originals;
        // any undecided ones are simply asked about again.
    }
    return s;
}

}  // namespace screener::dialog
