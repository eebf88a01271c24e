#pragma once

#include "screener/error.hpp"
#include "screener/features/schema.hpp"
#include "screener/rules/ast.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace screener {

// Plain-language eligibility text for one opportunity.
struct RequirementDoc {
    std::string opportunity_id;
    std::string title;
    std::string body;
};

// `<id>.txt`; a first line starting with "# " becomes the title, otherwise
// the id is used. Throws Error on an empty body.
RequirementDoc load_requirement(const std::filesystem::path& path);
// Requirement texts joined for the baseline prompts, numbered from 0 so the
// index matches the prediction array.
std::string requirements_block(const std::vector<const RequirementDoc*>& docs);

// Every *.txt in the directory, sorted by id.
std::vector<RequirementDoc> load_requirements(const std::filesystem::path& dir);

// One opportunity ready for a dialog: program, its slots, its text.
struct Checker {
    rules::RuleProgram program;
    features::FeatureSchema schema;
    RequirementDoc doc;

    const std::string& id() const { return program.opportunity_id; }
};

class CorpusError : public Error {
public:
    using Error::Error;
};

// Reads a checker file: first line `#opportunity: <id>`, the rest is source.
rules::RuleProgram load_rules_file(const std::filesystem::path& path);

// Text of a checker file for `program` (header line plus pretty print).
std::string checker_file_text(const rules::RuleProgram& program);

// Loads every `<id>.rules` with its `<id>.schema.json`. Requirement text is
// looked up as `<id>.txt` in `requirements_dir`, then next to the rules, then
// in a sibling `requirements` directory; missing text leaves the body empty.
// Throws CorpusError when a schema is missing or does not cover a key the
// program reads. Result is sorted by opportunity id.
std::vector<Checker> load_corpus(const std::filesystem::path& rules_dir,
                                 const std::filesystem::path& requirements_dir = {});

// Throws CorpusError unless `schema` defines every slot `program` reads and
// uses the shared constraint for household.size.
void check_schema_covers(const rules::RuleProgram& program, const features::FeatureSchema& schema);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace screener
