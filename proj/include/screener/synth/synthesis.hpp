#pragma once

#include "screener/corpus.hpp"
#include "screener/llm/gateway.hpp"
#include "screener/rules/ast.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace screener::synth {

struct SynthesisResult {
    rules::RuleProgram program;
    features::FeatureSchema schema;  // slots this program reads, nothing else
    int attempts = 0;
    std::vector<std::string> raw_generations;  // one per code-model call
    std::vector<std::string> errors;           // why each rejected attempt failed
};

class SynthesisExhausted : public Error {
public:
    SynthesisExhausted(const std::string& id, std::vector<std::string> errors);
    std::vector<std::string> errors;
};

class ChoicesIncomplete : public Error {
public:
    ChoicesIncomplete(const SlotKey& slot, std::vector<std::string> missing);
    SlotKey slot;
    std::vector<std::string> missing;
};

// Generates, parses and types one checker. Slots already in `preexisting` are
// reused as they are; new slots get their type from infer_constraint.
// household.size always uses the shared size constraint. At most
// max_attempts code-model calls. Throws SynthesisExhausted, and propagates
// gateway errors and ChoicesIncomplete.
SynthesisResult generate_checker(llm::Gateway& gateway, const RequirementDoc& doc,
                                 const features::FeatureSchema& preexisting,
                                 int max_attempts = llm::kDefaultMaxAttempts);

// Asks for int / float / choice and completes the constraint. When the
// program's own comparisons contradict the answer (string literals against
// a numeric slot, numeric thresholds against a choice) the program wins.
features::SlotConstraint infer_constraint(llm::Gateway& gateway, const SlotKey& key, const rules::RuleProgram& program,
                                          const RequirementDoc& doc, int max_attempts = llm::kDefaultMaxAttempts);

// Possible values of a choice slot, deduplicated in order. Every literal the
// program compares against the slot must be present (case-insensitively);
// matching entries take the program's spelling. Throws ChoicesIncomplete.
std::vector<std::string> enumerate_choices(llm::Gateway& gateway, const SlotKey& key,
                                           const rules::RuleProgram& program, const RequirementDoc& doc,
                                           int max_attempts = llm::kDefaultMaxAttempts);

// Parses a list-of-strings emission (JSON or Python quoting); nullopt if it
// is not one.
std::optional<std::vector<std::string>> parse_string_list(std::string_view raw);

// The {preexisting_keys} block of the generation prompt.
std::string render_preexisting_keys(const features::FeatureSchema& schema);

// Filled generation prompt for one attempt (1-based). `previous_error` is
// appended on retries.
std::string checker_prompt(const RequirementDoc& doc, const features::FeatureSchema& preexisting, int attempt,
                           int max_attempts, const std::string& previous_error);

// Writes <id>.rules, <id>.schema.json and <id>.raw.json into `out_dir`.
void write_result(const std::filesystem::path& out_dir, const SynthesisResult& result);

// Re-parses the last raw generation (the one that was accepted).
rules::RuleProgram replay(const SynthesisResult& result);

// Synthesizes every document. With jobs <= 1 documents run in order and each
// sees the slots of those before it; with more jobs they run concurrently
// against `preexisting` only and the schemas are merged afterwards (throws
// features::SchemaConflict on disagreement).
std::vector<SynthesisResult> synthesize_all(llm::Gateway& gateway, const std::vector<RequirementDoc>& docs,
                                            features::FeatureSchema preexisting, int jobs = 1,
                                            int max_attempts = llm::kDefaultMaxAttempts);

}  // namespace screener::synth
