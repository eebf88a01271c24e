#include "screener/dialog/engine.hpp"

#include "screener/rules/printer.hpp"
#include "screener/synth/prompts.hpp"
#include "screener/text.hpp"

#include <fstream>
#include <regex>

namespace screener::dialog {

namespace {

void append_log(const Session& s, const nlohmann::json& record) {
    if (!s.log_path) return;
    std::ofstream out(*s.log_path, std::ios::app);
    if (!out) throw SessionError("cannot write session log " + s.log_path->string());
    out << record.dump() << '\n';
}

std::string spaced(const std::string& key) {
    return text::replace_all(key, "_", " ");
}

llm::OutputConstraint output_constraint_for(const features::SlotConstraint& c) {
    switch (c.kind) {
        case features::SlotKind::Integer: return llm::OutputConstraint::integer();
        case features::SlotKind::Real: return llm::OutputConstraint::real();
        case features::SlotKind::Choice: return llm::OutputConstraint::choice_set(c.choices);
    }
    throw Error("unknown slot kind");
}

FeatureValue to_feature_value(const llm::ConstrainedValue& v, const features::SlotConstraint& c) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
        if (c.kind == features::SlotKind::Real) return static_cast<double>(*i);
        return *i;
    }
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw Error("extraction produced a value of the wrong shape");
}

std::string source_line(const Session& s, const PendingQuestion& p) {
    return rules::node_line(s.checker(p.source_program).program, p.source_node);
}

}  // namespace

std::string default_question(const KeyPath& key) {
    if (key.is_member()) return "What is the " + spaced(key.key) + " of person " + std::to_string(key.member_index) + "?";
    if (key.key == kHouseholdSizeKey) return "How many people live in your household?";
    return "What is your household's " + spaced(key.key) + "?";
}

std::string polish_question(std::string question, const KeyPath& key) {
    question = llm::strip_code_fence(question);
    for (const auto& line : text::split_lines(question)) {
        if (!text::trim(line).empty()) {
            question = text::trim(line);
            break;
        }
    }
    if (question.rfind("Question:", 0) == 0) question = text::trim(question.substr(9));
    if (question.size() >= 2 && question.front() == '"' && question.back() == '"') {
        question = text::trim(question.substr(1, question.size() - 2));
    }
    question = spaced(question);
    if (text::trim(question).empty()) return default_question(key);
    if (key.is_member()) {
        const std::regex ref("\\bperson " + std::to_string(key.member_index) + "\\b", std::regex::icase);
        if (!std::regex_search(question, ref)) {
            question += " (This question is about person " + std::to_string(key.member_index) + ".)";
        }
    }
    return question;
}

std::vector<llm::Message> history_messages(const std::vector<Turn>& history) {
    std::vector<llm::Message> out;
    for (const auto& t : history) {
        out.push_back({"assistant", t.question});
        out.push_back({"user", t.answer});
    }
    return out;
}

Engine::Engine(llm::Gateway& gateway, EngineConfig config) : gateway_(gateway), config_(config) {
    if (config_.max_clarifications < 0) throw Error("max_clarifications must be non-negative");
    if (config_.extraction_attempts < 1) throw Error("extraction_attempts must be at least 1");
}

Session Engine::open_session(std::vector<CheckerRef> checkers, std::string session_id,
                             std::optional<std::filesystem::path> log_path) const {
    if (checkers.empty()) throw SessionError("a session needs at least one opportunity");
    std::sort(checkers.begin(), checkers.end(), [](const CheckerRef& a, const CheckerRef& b) { return a->id() < b->id(); });
    features::FeatureSchema merged;
    for (std::size_t i = 0; i < checkers.size(); ++i) {
        if (i && checkers[i]->id() == checkers[i - 1]->id()) {
            throw SessionError("opportunity listed twice: " + checkers[i]->id());
        }
        merged = features::merge(merged, checkers[i]->schema);
    }
    Session s;
    s.session_id = std::move(session_id);
    s.budget = TurnBudget::for_opportunities(checkers.size());
    s.checkers = std::move(checkers);
    s.store = features::FeatureStore(std::move(merged));
    s.log_path = std::move(log_path);
    if (s.log_path) {
        if (s.log_path->has_parent_path()) std::filesystem::create_directories(s.log_path->parent_path());
        std::ofstream truncate(*s.log_path, std::ios::trunc);
        append_log(s, {{"type", "open"},
                       {"session_id", s.session_id},
                       {"opportunities", s.opportunity_ids()},
                       {"max_turns", s.budget.max_turns}});
    }
    return s;
}

std::string Engine::formulate_question(const KeyPath& key, const std::string& line, const RequirementDoc& doc,
                                       const std::vector<Turn>& history) const {
    llm::CompletionRequest req;
    req.messages = history_messages(history);
    req.messages.push_back({"user", text::render(synth::prompts::kKeyError, {{"eligibility_requirements", doc.body},
                                                                             {"line", line},
                                                                             {"key", to_prompt_key(key)}})});
    req.purpose = "key-error";
    return polish_question(gateway_.complete(req), key);
}

std::string Engine::clarification_question(const Session& s, const std::string& answer,
                                           const std::string& reason) const {
    const PendingQuestion& p = *s.pending;
    const Checker& c = s.checker(p.source_program);
    const auto& constraint = s.store.schema().at(SlotKey::of(p.key));
    llm::CompletionRequest req;
    req.messages = history_messages(s.transcript);
    std::string prompt = text::render(synth::prompts::kKeyError, {{"eligibility_requirements", c.doc.body},
                                                                  {"line", source_line(s, p)},
                                                                  {"key", to_prompt_key(p.key)}});
    prompt += "\n\nWe asked \"" + p.question + "\" and the user answered \"" + answer +
              "\", which could not be used (" + reason + "). Ask again so that the answer is " +
              constraint.describe() + ".";
    req.messages.push_back({"user", prompt});
    req.purpose = "clarify";
    try {
        return polish_question(gateway_.complete(req), p.key);
    } catch (const Error&) {
        return polish_question("Sorry, I could not use that answer. " + default_question(p.key), p.key);
    }
}

AgentAction Engine::step(Session& s) const {
    if (s.pending) throw SessionError("step called while a question is pending");
    if (s.decisions) return Conclude{*s.decisions};

    const Checker* asking = nullptr;
    std::optional<rules::Missing> first;
    for (const auto& c : s.checkers) {
        if (s.computed.count(c->id())) continue;
        auto outcome = rules::evaluate(c->program, s.store);
        if (auto* d = std::get_if<rules::Decision>(&outcome)) {
            s.computed.emplace(c->id(), std::move(*d));
            continue;
        }
        const auto& miss = std::get<rules::Missing>(outcome);
        if (s.abandoned.count(miss.key)) continue;
        if (!first) {
            first = miss;
            asking = c.get();
        }
    }
    if (!first) return finish(s);
    if (s.budget.exhausted()) {
        s.budget_exhausted = true;
        return finish(s);
    }

    const std::string line = rules::node_line(asking->program, first->node);
    PendingQuestion p{first->key, formulate_question(first->key, line, asking->doc, s.transcript), 0, first->node,
                      asking->id()};
    append_log(s, {{"type", "ask"},
                   {"question", p.question},
                   {"key", to_string(p.key)},
                   {"clarity_attempts_used", p.clarity_attempts_used},
                   {"source_node", p.source_node},
                   {"source_program", p.source_program}});
    s.pending = p;
    return Ask{p.question, p.key};
}

void Engine::ingest_answer(Session& s, const std::string& answer) const {
    if (!s.pending) throw SessionError("no question is waiting for an answer");
    if (s.decisions) throw SessionError("session already concluded");
    PendingQuestion& p = *s.pending;
    const auto& constraint = s.store.schema().at(SlotKey::of(p.key));
    const Checker& c = s.checker(p.source_program);

    Turn turn{p.question, answer, p.key, std::nullopt, TurnOutcome::Stored};
    std::string failure;
    try {
        llm::CompletionRequest req;
        req.messages.push_back({"user", text::render(synth::prompts::kExtractValues,
                                                     {{"eligibility_requirements", c.doc.body},
                                                      {"line", source_line(s, p)},
                                                      {"key", to_prompt_key(p.key)},
                                                      {"cq", p.question},
                                                      {"answer", answer}}) +
                                             "\n\nThe value must be " + constraint.describe() + "."});
        req.purpose = "extract";
        auto value = to_feature_value(
            gateway_.complete_constrained(req, output_constraint_for(constraint), config_.extraction_attempts),
            constraint);
        if (auto err = s.store.put_value(p.key, value)) {
            failure = err->reason;
        } else {
            turn.extracted = value;
        }
    } catch (const llm::ConstraintExhausted&) {
        failure = "no valid value could be extracted";
    } catch (const features::OverwriteFault&) {
        throw;
    } catch (const Error& e) {
        failure = std::string("extraction failed: ") + e.what();
    }

    s.budget.used += 1;
    std::optional<PendingQuestion> next;
    if (!failure.empty()) {
        if (p.clarity_attempts_used < config_.max_clarifications) {
            turn.outcome = TurnOutcome::Clarified;
            next = p;
            next->clarity_attempts_used += 1;
            next->question = clarification_question(s, answer, failure);
        } else {
            turn.outcome = TurnOutcome::Abandoned;
            s.abandoned.insert(p.key);
        }
    }
    append_log(s, turn_to_json(turn, s.transcript.size()));
    s.transcript.push_back(std::move(turn));
    s.pending = next;
    if (next) {
        append_log(s, {{"type", "ask"},
                       {"question", next->question},
                       {"key", to_string(next->key)},
                       {"clarity_attempts_used", next->clarity_attempts_used},
                       {"source_node", next->source_node},
                       {"source_program", next->source_program}});
    }
}

AgentAction Engine::advance(Session& s) const {
    if (s.decisions) return Conclude{*s.decisions};
    if (s.pending) {
        if (s.budget.exhausted()) {
            s.pending.reset();
            s.budget_exhausted = true;
            return finish(s);
        }
        return Ask{s.pending->question, s.pending->key};
    }
    return step(s);
}

std::map<std::string, bool> Engine::conclude_fallback(Session& s) const {
    std::map<std::string, bool> out;
    std::vector<const RequirementDoc*> undecided_docs;
    std::vector<std::string> undecided;
    for (const auto& c : s.checkers) {
        auto it = s.computed.find(c->id());
        if (it != s.computed.end()) {
            out[c->id()] = it->second.eligible;
        } else {
            undecided.push_back(c->id());
            undecided_docs.push_back(&c->doc);
        }
    }
    if (undecided.empty()) return out;

    const int n = static_cast<int>(undecided.size());
    std::vector<bool> predicted(undecided.size(), false);
    try {
        llm::CompletionRequest req;
        req.messages = history_messages(s.transcript);
        req.messages.push_back({"user", text::render(synth::prompts::kPredict,
                                                     {{"eligibility_requirements", requirements_block(undecided_docs)},
                                                      {"num_programs", std::to_string(n)},
                                                      {"example_array", synth::example_array(n)}})});
        req.purpose = "fallback-predict";
        predicted = gateway_.complete_boolean_array(req, n);
    } catch (const Error&) {
        s.fallback_failed = true;
    }
    for (std::size_t i = 0; i < undecided.size(); ++i) {
        out[undecided[i]] = predicted[i];
        s.fallback_ids.insert(undecided[i]);
    }
    return out;
}

AgentAction Engine::finish(Session& s) const {
    auto decisions = conclude_fallback(s);
    s.decisions = decisions;
    nlohmann::json why = nlohmann::json::object();
    for (const auto& [id, lines] : rationale(s)) why[id] = lines;
    append_log(s, {{"type", "decisions"},
                   {"decisions", decisions},
                   {"fallback", std::vector<std::string>(s.fallback_ids.begin(), s.fallback_ids.end())},
                   {"fallback_failed", s.fallback_failed},
                   {"budget_exhausted", s.budget_exhausted},
                   {"turns_used", s.budget.used},
                   {"rationale", why}});
    return Conclude{decisions};
}

}  // namespace screener::dialog
