#include "screener/synth/synthesis.hpp"

#include "screener/rules/parser.hpp"
#include "screener/rules/printer.hpp"
#include "screener/synth/prompts.hpp"
#include "screener/text.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

namespace screener::synth {

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
    std::string out;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        out += "\n  attempt " + std::to_string(i + 1) + ": " + errors[i];
    }
    return out;
}

// Code inside the first fenced block, or the whole text when there is none.
std::string extract_code(const std::string& raw) {
    auto open = raw.find("```");
    if (open == std::string::npos) return raw;
    auto line_end = raw.find('\n', open);
    if (line_end == std::string::npos) return raw;
    auto close = raw.find("```", line_end);
    return raw.substr(line_end + 1, close == std::string::npos ? std::string::npos : close - line_end - 1);
}

std::string slot_label(const SlotKey& slot) {
    return slot.key;
}

// A key may live in one scope only, across the program and the slots it
// inherits.
void check_scopes(const rules::RuleProgram& program, const features::FeatureSchema& preexisting) {
    const auto read = rules::slots_read(program);
    for (const auto& slot : read) {
        const SlotKey other{slot.scope == Scope::Household ? Scope::Member : Scope::Household, slot.key};
        const bool clash = std::find(read.begin(), read.end(), other) != read.end() || preexisting.contains(other);
        if (clash) {
            throw rules::SyntaxError("key \"" + slot.key + "\" is used both for the whole household and for "
                                         "individual members; use a different key for one of them",
                                     0, 0);
        }
    }
}

std::map<std::string, std::string> slot_prompt_values(const SlotKey& key, const rules::RuleProgram& program,
                                                      const RequirementDoc& doc) {
    return {{"eligibility_requirements", doc.body}, {"code", text::trim(program.source_text)}, {"key", slot_label(key)}};
}

}  // namespace

SynthesisExhausted::SynthesisExhausted(const std::string& id, std::vector<std::string> errs)
    : Error("could not synthesize a checker for " + id + ":" + join_errors(errs)), errors(std::move(errs)) {}

ChoicesIncomplete::ChoicesIncomplete(const SlotKey& s, std::vector<std::string> miss)
    : Error("possible values for " + to_string(s) + " never included: " + text::join(miss, ", ")),
      slot(s),
      missing(std::move(miss)) {}

std::string render_preexisting_keys(const features::FeatureSchema& schema) {
    if (schema.empty()) return "None";
    std::string out;
    for (const auto& [slot, constraint] : schema.slots()) {
        if (!out.empty()) out += '\n';
        out += slot.scope == Scope::Household ? "hh[\"" + slot.key + "\"]" : "hh[i][\"" + slot.key + "\"]";
        out += ": " + constraint.describe();
    }
    return out;
}

std::string checker_prompt(const RequirementDoc& doc, const features::FeatureSchema& preexisting, int attempt,
                           int max_attempts, const std::string& previous_error) {
    std::string prompt = text::render(
        prompts::kGenerateChecker,
        {{"attempt_no", "Attempt " + std::to_string(attempt) + " of " + std::to_string(max_attempts) + "."},
         {"eligibility_requirement", doc.body},
         {"preexisting_keys", render_preexisting_keys(preexisting)}});
    prompt += prompts::kGrammarNote;
    if (!previous_error.empty()) {
        prompt += "\n\nYour previous attempt was rejected: " + previous_error + ". Write the function again.";
    }
    return prompt;
}

std::optional<std::vector<std::string>> parse_string_list(std::string_view raw_in) {
    const std::string raw = llm::strip_code_fence(raw_in);
    auto open = raw.find('[');
    auto close = raw.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
    const std::string body = raw.substr(open, close - open + 1);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception&) {
        try {
            j = nlohmann::json::parse(text::replace_all(body, "'", "\""));
        } catch (const nlohmann::json::exception&) {
            return std::nullopt;
        }
    }
    if (!j.is_array() || j.empty()) return std::nullopt;
    std::vector<std::string> out;
    std::vector<std::string> folded;
    for (const auto& item : j) {
        std::string s = item.is_string() ? text::trim(item.get<std::string>()) : item.dump();
        if (s.empty()) continue;
        const std::string f = text::fold(s);
        if (std::find(folded.begin(), folded.end(), f) != folded.end()) continue;
        folded.push_back(f);
        out.push_back(std::move(s));
    }
    if (out.empty()) return std::nullopt;
    return out;
}

std::vector<std::string> enumerate_choices(llm::Gateway& gateway, const SlotKey& key,
                                           const rules::RuleProgram& program, const RequirementDoc& doc,
                                           int max_attempts) {
    if (max_attempts < 1) throw Error("max_attempts must be at least 1");
    const auto literals = rules::compared_literals(program, key);
    const std::string base = text::render(prompts::kGetValues, slot_prompt_values(key, program, doc));
    std::vector<std::string> missing;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        std::string prompt = base;
        if (!missing.empty()) {
            std::vector<std::string> quoted;
            for (const auto& m : missing) quoted.push_back("\"" + m + "\"");
            prompt += "\n\nThe code compares " + slot_label(key) + " against " + text::join(quoted, ", ") +
                      ", so those must be in the list too.";
        }
        auto list = parse_string_list(gateway.complete(llm::user_prompt(prompt, "get-values")));
        if (!list) {
            missing = literals;
            continue;
        }
        missing.clear();
        for (const auto& lit : literals) {
            auto it = std::find_if(list->begin(), list->end(),
                                   [&](const std::string& c) { return text::fold(c) == text::fold(lit); });
            if (it == list->end()) {
                missing.push_back(lit);
            } else {
                *it = lit;  // the store must hand back exactly what the program compares
            }
        }
        if (missing.empty()) return *list;
    }
    throw ChoicesIncomplete(key, missing);
}

features::SlotConstraint infer_constraint(llm::Gateway& gateway, const SlotKey& key,
                                          const rules::RuleProgram& program, const RequirementDoc& doc,
                                          int max_attempts) {
    const std::string prompt = text::render(prompts::kGetType, slot_prompt_values(key, program, doc));
    const auto answer = std::get<std::string>(gateway.complete_constrained(
        llm::user_prompt(prompt, "get-type"), llm::OutputConstraint::choice_set({"int", "float", "choice"}),
        max_attempts));
    const bool has_literals = !rules::compared_literals(program, key).empty();
    const bool has_thresholds = !rules::compared_thresholds(program, key).empty();

    std::string kind = answer;
    if (kind != "choice" && has_literals) kind = "choice";
    if (kind == "choice" && !has_literals && has_thresholds) kind = "float";

    if (kind == "int") return features::SlotConstraint::integer();
    if (kind == "float") return features::SlotConstraint::real();
    return features::SlotConstraint::choice(enumerate_choices(gateway, key, program, doc, max_attempts));
}

SynthesisResult generate_checker(llm::Gateway& gateway, const RequirementDoc& doc,
                                 const features::FeatureSchema& preexisting, int max_attempts) {
    if (max_attempts < 1) throw Error("max_attempts must be at least 1");
    if (text::trim(doc.body).empty()) throw Error("requirement text for " + doc.opportunity_id + " is empty");
    SynthesisResult result;
    std::string previous_error;
    std::optional<rules::RuleProgram> program;
    for (int attempt = 1; attempt <= max_attempts && !program; ++attempt) {
        const std::string prompt = checker_prompt(doc, preexisting, attempt, max_attempts, previous_error);
        std::string raw = gateway.complete(llm::user_prompt(prompt, "generate-checker"));
        result.raw_generations.push_back(raw);
        result.attempts = attempt;
        try {
            auto parsed = rules::parse_program(extract_code(raw), doc.opportunity_id);
            check_scopes(parsed, preexisting);
            program = std::move(parsed);
        } catch (const rules::ParseError& e) {
            previous_error = e.what();
            result.errors.push_back(previous_error);
        }
    }
    if (!program) throw SynthesisExhausted(doc.opportunity_id, result.errors);

    for (const auto& slot : rules::slots_read(*program)) {
        features::SlotConstraint c;
        if (slot == SlotKey{Scope::Household, kHouseholdSizeKey}) {
            c = features::household_size_constraint();
        } else if (const auto* existing = preexisting.find(slot)) {
            c = *existing;
        } else {
            c = infer_constraint(gateway, slot, *program, doc, max_attempts);
        }
        result.schema = features::define_slot(result.schema, slot, c);
    }
    result.program = std::move(*program);
    return result;
}

rules::RuleProgram replay(const SynthesisResult& result) {
    if (result.raw_generations.empty()) throw Error("nothing to replay");
    return rules::parse_program(extract_code(result.raw_generations.back()), result.program.opportunity_id);
}

void write_result(const std::filesystem::path& out_dir, const SynthesisResult& result) {
    const std::string& id = result.program.opportunity_id;
    write_file(out_dir / (id + ".rules"), checker_file_text(result.program));
    write_file(out_dir / (id + ".schema.json"), features::to_json(result.schema).dump(2) + "\n");
    nlohmann::json raw{{"opportunity_id", id},
                       {"attempts", result.attempts},
                       {"raw_generations", result.raw_generations},
                       {"errors", result.errors}};
    write_file(out_dir / (id + ".raw.json"), raw.dump(2) + "\n");
}

std::vector<SynthesisResult> synthesize_all(llm::Gateway& gateway, const std::vector<RequirementDoc>& docs,
                                            features::FeatureSchema preexisting, int jobs, int max_attempts) {
    std::vector<SynthesisResult> results;
    if (jobs <= 1) {
        for (const auto& doc : docs) {
            results.push_back(generate_checker(gateway, doc, preexisting, max_attempts));
            preexisting = features::merge(preexisting, results.back().schema);
        }
        return results;
    }

    std::vector<std::optional<SynthesisResult>> slots(docs.size());
    std::vector<std::exception_ptr> failures(docs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < docs.size(); i = next++) {
            try {
                slots[i] = generate_checker(gateway, docs[i], preexisting, max_attempts);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs && t < static_cast<int>(docs.size()); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (failures[i]) std::rethrow_exception(failures[i]);
        results.push_back(std::move(*slots[i]));
    }
    features::FeatureSchema merged = preexisting;
    for (const auto& r : results) merged = features::merge(merged, r.schema);
    return results;
}

}  // namespace screener::synth
