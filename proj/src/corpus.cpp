#include "screener/corpus.hpp"

#include "screener/rules/parser.hpp"
#include "screener/rules/printer.hpp"
#include "screener/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace screener {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << contents;
}

RequirementDoc load_requirement(const fs::path& path) {
    RequirementDoc doc;
    doc.opportunity_id = path.stem().string();
    doc.title = doc.opportunity_id;
    std::string body = read_file(path);
    if (body.rfind("# ", 0) == 0) {
        auto nl = body.find('\n');
        doc.title = text::trim(body.substr(2, nl == std::string::npos ? std::string::npos : nl - 2));
        body = nl == std::string::npos ? "" : body.substr(nl + 1);
    }
    doc.body = text::trim(body);
    if (doc.body.empty()) throw Error("requirement text is empty: " + path.string());
    return doc;
}

std::string requirements_block(const std::vector<const RequirementDoc*>& docs) {
    std::string out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i) out += "\n\n";
        out += "Program " + std::to_string(i) + " (" + docs[i]->title + "):\n" + docs[i]->body;
    }
    return out;
}

std::vector<RequirementDoc> load_requirements(const fs::path& dir) {
    std::vector<RequirementDoc> docs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".txt") docs.push_back(load_requirement(entry.path()));
    }
    std::sort(docs.begin(), docs.end(),
              [](const auto& a, const auto& b) { return a.opportunity_id < b.opportunity_id; });
    return docs;
}

rules::RuleProgram load_rules_file(const fs::path& path) {
    const std::string contents = read_file(path);
    const std::string header = "#opportunity:";
    if (contents.rfind(header, 0) != 0) {
        throw CorpusError(path.string() + ": first line must be '#opportunity: <id>'");
    }
    auto nl = contents.find('\n');
    const std::string id = text::trim(contents.substr(header.size(), nl == std::string::npos ? std::string::npos
                                                                                             : nl - header.size()));
    if (id.empty()) throw CorpusError(path.string() + ": empty opportunity id");
    // Keep the header line as a blank line so parse errors report file lines.
    std::string source = contents;
    source.replace(0, nl == std::string::npos ? source.size() : nl, "");
    return rules::parse_program(source, id);
}

std::string checker_file_text(const rules::RuleProgram& program) {
    return "#opportunity: " + program.opportunity_id + "\n" + rules::pretty_print(program) + "\n";
}

void check_schema_covers(const rules::RuleProgram& program, const features::FeatureSchema& schema) {
    for (const auto& slot : rules::slots_read(program)) {
        const auto* c = schema.find(slot);
        if (!c) throw CorpusError(program.opportunity_id + ": schema has no slot for " + to_string(slot));
        if (slot == SlotKey{Scope::Household, kHouseholdSizeKey} && !(*c == features::household_size_constraint())) {
            throw CorpusError(program.opportunity_id + ": household.size must be " +
                              features::household_size_constraint().describe());
        }
    }
}

std::vector<Checker> load_corpus(const fs::path& rules_dir, const fs::path& requirements_dir) {
    if (!fs::is_directory(rules_dir)) throw CorpusError("rules directory not found: " + rules_dir.string());
    std::vector<Checker> out;
    for (const auto& entry : fs::directory_iterator(rules_dir)) {
        if (entry.path().extension() != ".rules") continue;
        Checker c;
        c.program = load_rules_file(entry.path());
        const fs::path schema_path = rules_dir / (c.program.opportunity_id + ".schema.json");
        if (!fs::exists(schema_path)) throw CorpusError("missing schema " + schema_path.string());
        try {
            c.schema = features::schema_from_json(nlohmann::json::parse(read_file(schema_path)));
        } catch (const nlohmann::json::exception& e) {
            throw CorpusError(schema_path.string() + ": " + e.what());
        }
        check_schema_covers(c.program, c.schema);

        c.doc.opportunity_id = c.program.opportunity_id;
        c.doc.title = c.program.opportunity_id;
        std::vector<fs::path> candidates;
        if (!requirements_dir.empty()) candidates.push_back(requirements_dir / (c.id() + ".txt"));
        candidates.push_back(rules_dir / (c.id() + ".txt"));
        fs::path base = rules_dir;
        if (!base.has_filename()) base = base.parent_path();
        candidates.push_back(base.parent_path() / "requirements" / (c.id() + ".txt"));
        for (const auto& p : candidates) {
            if (fs::exists(p)) {
                c.doc = load_requirement(p);
                c.doc.opportunity_id = c.id();
                break;
            }
        }
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const Checker& a, const Checker& b) { return a.id() < b.id(); });
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].id() == out[i - 1].id()) throw CorpusError("duplicate opportunity id " + out[i].id());
    }
    return out;
}

}  // namespace screener
