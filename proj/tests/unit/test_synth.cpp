#include "doctest.h"

#include "screener/rules/printer.hpp"
#include "screener/synth/prompts.hpp"
#include "screener/synth/synthesis.hpp"
#include "support/support.hpp"

#include "json.hpp"

#include <fstream>

using namespace screener;
using namespace screener::synth;
using support::MockRig;

namespace {

RequirementDoc youth_doc() {
    return {"YouthProgram", "Youth Program",
            "Applicants aged 16 through 24 who are homeless qualify. Income does not matter."};
}

const char* kValidPython = R"(```python
def check_eligibility(hh):
    for member in hh:
        if float(member["age"]) >= 16:
            if float(member["age"]) <= 24:
                if member["homeless"] == "yes":
                    return True
    return False
```)";

const char* kOrPython = R"(def check_eligibility(hh):
    if hh[0]["age"] >= 16 and hh[0]["age"] <= 24:
        return True
    return False)";

}  // namespace

TEST_CASE("valid program on the first attempt") {
    MockRig rig;
    rig.script("generate-checker", {kValidPython});
    rig.script("get-type", {"int"}, "member[\"age\"]");
    rig.script("get-type", {"choice"}, "homeless");
    rig.script("get-values", {R"(["yes", "no"])"});
    auto r = generate_checker(rig.gw(), youth_doc(), {});
    CHECK(r.attempts == 1);
    CHECK(r.errors.empty());
    CHECK(r.raw_generations.size() == 1);
    CHECK(r.schema.size() == 3);
    CHECK(r.schema.find(SlotKey{Scope::Household, "size"})->kind == features::SlotKind::Integer);
    CHECK(r.schema.find(SlotKey{Scope::Member, "age"})->kind == features::SlotKind::Integer);
    const auto* homeless = r.schema.find(SlotKey{Scope::Member, "homeless"});
    REQUIRE(homeless);
    CHECK(homeless->choices == std::vector<std::string>{"yes", "no"});
}

TEST_CASE("rejected code is regenerated with the error") {
    MockRig rig;
    rig.script("generate-checker", {kOrPython, kValidPython});
    rig.script("get-type", {"int"}, "member[\"age\"]");
    rig.script("get-type", {"choice"}, "homeless");
    rig.script("get-values", {R"(["yes", "no"])"});
    auto r = generate_checker(rig.gw(), youth_doc(), {});
    CHECK(r.attempts == 2);
    REQUIRE(r.errors.size() == 1);
    auto reqs = rig.provider->requests();
    CHECK(reqs[0].messages[0].content.find("Attempt 1 of 3.") != std::string::npos);
    CHECK(reqs[1].messages[0].content.find("Attempt 2 of 3.") != std::string::npos);
    CHECK(reqs[1].messages[0].content.find("previous attempt was rejected") != std::string::npos);
}

TEST_CASE("synthesis gives up after max_attempts") {
    MockRig rig;
    rig.script("generate-checker", {kOrPython});
    try {
        generate_checker(rig.gw(), youth_doc(), {}, 2);
        FAIL("expected SynthesisExhausted");
    } catch (const SynthesisExhausted& e) {
        CHECK(e.errors.size() == 2);
    }
    CHECK(rig.provider->calls() == 2);
}

TEST_CASE("preexisting keys are reused and listed in the prompt") {
    auto pre = support::schema_of({{"member.age", features::SlotConstraint::integer(0, 120)},
                                   {"member.homeless", support::yes_no()}});
    MockRig rig;
    rig.script("generate-checker", {kValidPython});
    auto r = generate_checker(rig.gw(), youth_doc(), pre);
    // no typing calls for known slots
    CHECK(rig.provider->calls() == 1);
    CHECK(*r.schema.find(SlotKey{Scope::Member, "age"}) == features::SlotConstraint::integer(0, 120));
    const auto prompt = rig.provider->requests()[0].messages[0].content;
    CHECK(prompt.find(R"(hh[i]["age"])") != std::string::npos);
    CHECK(render_preexisting_keys({}) == "None");
}

TEST_CASE("a key used at both scopes is rejected") {
    auto pre = support::schema_of({{"household.age", features::SlotConstraint::integer()}});
    MockRig rig;
    rig.script("generate-checker", {kValidPython});
    CHECK_THROWS_AS(generate_checker(rig.gw(), youth_doc(), pre, 1), SynthesisExhausted);
}

TEST_CASE("infer_constraint maps answers to constraints") {
    const auto doc = youth_doc();
    auto prog = rules::parse_program(R"(
if members[0]["age"] >= 16 {
    if members[0]["homeless"] == "yes" {
        if household["annual_income"] < 30000.5 { return true }
    }
}
return false)",
                                     "Y");
    MockRig rig;
    rig.script("get-type", {"int"}, "Target key:  \nage");
    rig.script("get-type", {"choice"}, "homeless");
    rig.script("get-type", {"float"}, "annual_income");
    rig.script("get-values", {R"(['yes', 'no'])"});
    CHECK(infer_constraint(rig.gw(), {Scope::Member, "age"}, prog, doc).kind == features::SlotKind::Integer);
    auto h = infer_constraint(rig.gw(), {Scope::Member, "homeless"}, prog, doc);
    CHECK(h == features::SlotConstraint::choice({"yes", "no"}));
    CHECK(infer_constraint(rig.gw(), {Scope::Household, "annual_income"}, prog, doc).kind ==
          features::SlotKind::Real);
}

TEST_CASE("program evidence overrides a contradicting type answer") {
    const auto doc = youth_doc();
    auto prog = rules::parse_program(R"(
if household["housing"] == "rent" {
    if household["rent"] > 900 { return true }
}
return false)",
                                     "H");
    MockRig rig;
    rig.script("get-type", {"int"}, "Target key:  \nhousing");
    rig.script("get-type", {"choice"}, "Target key:  \nrent");
    rig.script("get-values", {R"(["rent", "own"])"});
    CHECK(infer_constraint(rig.gw(), {Scope::Household, "housing"}, prog, doc).kind == features::SlotKind::Choice);
    CHECK(infer_constraint(rig.gw(), {Scope::Household, "rent"}, prog, doc).kind == features::SlotKind::Real);
}

TEST_CASE("enumerate_choices dedups and demands compared literals") {
    const auto doc = youth_doc();
    auto prog = rules::parse_program(R"(
if household["tenure"] == "Rent" { return true }
return false)",
                                     "E");
    const SlotKey k{Scope::Household, "tenure"};
    {
        MockRig rig;
        rig.script("get-values", {R"(["a", "rent", "b", "a"])"});
        CHECK(enumerate_choices(rig.gw(), k, prog, doc) == std::vector<std::string>{"a", "Rent", "b"});
    }
    {
        MockRig rig;
        rig.script("get-values", {R"(["own", "other"])", R"(["own", "other", "rent"])"});
        auto v = enumerate_choices(rig.gw(), k, prog, doc);
        CHECK(v == std::vector<std::string>{"own", "other", "Rent"});
        CHECK(rig.provider->calls() == 2);
        CHECK(rig.provider->requests()[1].messages[0].content.find("\"Rent\"") != std::string::npos);
    }
    {
        MockRig rig;
        rig.script("get-values", {R"(["own"])"});
        CHECK_THROWS_AS(enumerate_choices(rig.gw(), k, prog, doc, 2), ChoicesIncomplete);
        CHECK(rig.provider->calls() == 2);
    }
}

TEST_CASE("parse_string_list") {
    CHECK(*parse_string_list(R"(["a", "b"])") == std::vector<std::string>{"a", "b"});
    CHECK(*parse_string_list("['yes', 'no']") == std::vector<std::string>{"yes", "no"});
    CHECK(*parse_string_list("```json\n[\"x\"]\n```") == std::vector<std::string>{"x"});
    CHECK_FALSE(parse_string_list("yes or no"));
    CHECK_FALSE(parse_string_list("[]"));
    // numeric items come back as their text
    CHECK(*parse_string_list("[1, 2]") == std::vector<std::string>{"1", "2"});
}

TEST_CASE("replay reproduces the accepted program and files are written") {
    MockRig rig;
    rig.script("generate-checker", {kOrPython, kValidPython});
    rig.script("get-type", {"int"}, "member[\"age\"]");
    rig.script("get-type", {"choice"}, "homeless");
    rig.script("get-values", {R"(["yes", "no"])"});
    auto r = generate_checker(rig.gw(), youth_doc(), {});
    CHECK(rules::structurally_equal(replay(r), r.program));

    auto dir = support::temp_dir("synth");
    write_result(dir, r);
    auto loaded = load_rules_file(dir / "YouthProgram.rules");
    CHECK(rules::structurally_equal(loaded, r.program));
    std::ifstream raw(dir / "YouthProgram.raw.json");
    auto j = nlohmann::json::parse(raw);
    CHECK(j["attempts"] == 2);
    CHECK(j["raw_generations"].size() == 2);
    CHECK(std::filesystem::exists(dir / "YouthProgram.schema.json"));
}

TEST_CASE("synthesize_all shares slots between documents") {
    MockRig rig;
    rig.script("generate-checker", {kValidPython}, "16 through 24");
    rig.script("generate-checker", {R"(if hh[0]["age"] >= 65:
    return True
return False)"},
               "seniors");
    rig.script("get-type", {"int"}, "member[\"age\"]");
    rig.script("get-type", {"choice"}, "homeless");
    rig.script("get-values", {R"(["yes", "no"])"});
    std::vector<RequirementDoc> docs = {youth_doc(), {"Senior", "Senior", "Open to seniors 65 and older."}};
    auto results = synthesize_all(rig.gw(), docs, {});
    REQUIRE(results.size() == 2);
    // age typed once, reused for the second document
    std::size_t type_calls = 0;
    for (const auto& req : rig.provider->requests()) type_calls += req.purpose == "get-type";
    CHECK(type_calls == 2);
    CHECK(results[1].schema.size() == 1);
}

TEST_CASE("prompt helpers") {
    CHECK(example_array(3) == "[true, false, true]");
    CHECK(example_array(5) == "[true, false, true, false, true]");
    auto p = checker_prompt(youth_doc(), {}, 3, 3, "");
    CHECK(p.rfind("Attempt 3 of 3.", 0) == 0);
    CHECK(p.find("check_eligibility") != std::string::npos);
    CHECK(p.find("{eligibility_requirement}") == std::string::npos);
    CHECK(p.find("previous attempt") == std::string::npos);
}
