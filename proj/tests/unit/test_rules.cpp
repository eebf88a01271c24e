#include "doctest.h"

#include "screener/rules/evaluator.hpp"
#include "screener/rules/parser.hpp"
#include "screener/rules/printer.hpp"
#include "screener/usersim/sampler.hpp"
#include "support/corpus_oracle.hpp"
#include "support/support.hpp"

#include <random>

using namespace screener;
using namespace screener::rules;
using support::schema_of;
using support::yes_no;

namespace {

// Extra programs so the round-trip corpus covers both surface forms.
const std::vector<std::pair<std::string, std::string>> kExtraSources = {
    {"PyIncome", R"(def check_eligibility(hh):
    if hh["annual_income"] < 30000.0:
        return True
    elif hh["annual_income"] < 45000.0:
        if hh[0]["age"] >= 65:
            return True
        return False
    else:
        return False
)"},
    {"PyLoop", R"(def check_eligibility(hh):
    count = 0
    for member in hh:
        if member["student"] == "yes":
            count = count + 1
    if count >= 2:
        return True
    return False
)"},
    {"Negatives", "if household[\"balance\"] < -250.5 {\n    return true\n}\nreturn false"},
    {"Arithmetic", "let ratio = household[\"rent\"] * 12 / household[\"income\"]\nreturn ratio > 0.3"},
    {"ElseChain", R"(if household["tier"] == "a" {
    return true
} else if household["tier"] == "b" {
    return false
} else if household["tier"] == "c" {
    return true
} else {
    return false
})"},
    {"Grouping", "return (household[\"a\"] - household[\"b\"]) * 2 >= household[\"c\"] - (household[\"d\"] - 1)"},
    {"Falsy", "return false"},
    {"Indexed", "if members[1][\"age\"] == 40 {\n    return true\n}\nreturn members[0][\"age\"] != 40"},
};

std::vector<RuleProgram> round_trip_corpus() {
    std::vector<RuleProgram> out;
    for (const auto& c : support::corpus()) out.push_back(c.program);
    for (const auto& [id, src] : kExtraSources) out.push_back(parse_program(src, id));
    const auto rules = usersim::consistency_from_json(
        nlohmann::json::parse(read_file(support::data_dir() / "consistency.json")));
    for (const auto& r : rules) out.push_back(r.program);
    return out;
}

features::FeatureStore store_with(const features::FeatureSchema& schema,
                                  std::vector<std::pair<KeyPath, std::string>> values) {
    features::FeatureStore s(schema);
    for (const auto& [k, v] : values) REQUIRE_FALSE(s.put(k, v).has_value());
    return s;
}

}  // namespace

TEST_CASE("smallest program is one return node") {
    auto p = parse_program("return false", "X");
    CHECK(p.size() == 1);
    CHECK(p.entry == 0);
    CHECK(p.node(0).kind() == NodeKind::Return);
    CHECK(pretty_print(p) == "return false");
}

TEST_CASE("node ids are dense and in source order") {
    auto p = load_rules_file(support::data_dir() / "rules" / "TrainEarn.rules");
    for (std::size_t i = 0; i < p.nodes.size(); ++i) CHECK(p.nodes[i].id == static_cast<NodeId>(i));
    CHECK(p.node(0).kind() == NodeKind::MemberLoop);
    CHECK(p.node(1).kind() == NodeKind::Conditional);
    CHECK(p.nodes.back().kind() == NodeKind::Return);
    auto again = parse_program(p.source_text, "TrainEarn");
    CHECK(structurally_equal(p, again));
}

TEST_CASE("boolean connectives and other forbidden constructs") {
    CHECK_THROWS_AS(parse_program("if household[\"a\"] == 1 or household[\"b\"] == 2 {\n return true\n}\nreturn false", "X"),
                    ForbiddenConstruct);
    CHECK_THROWS_AS(parse_program("return household[\"a\"] == 1 and household[\"b\"] == 2", "X"), ForbiddenConstruct);
    CHECK_THROWS_AS(parse_program("return not household[\"a\"] == 1", "X"), ForbiddenConstruct);
    CHECK_THROWS_AS(parse_program("def f(hh):\n    return hh.get(\"age\", 0) > 3\n", "X"), ForbiddenConstruct);
    CHECK_THROWS_AS(parse_program("def f(hh):\n    try:\n        return True\n    except KeyError:\n        return False\n", "X"),
                    ForbiddenConstruct);
    CHECK_THROWS_AS(parse_program("return 1 < household[\"a\"] < 3", "X"), ParseError);
}

TEST_CASE("syntax errors carry a position") {
    try {
        parse_program("if household[\"a\"] == {\n return true\n}\nreturn false", "X");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 1);
        CHECK(e.column > 1);
    }
    CHECK_THROWS_AS(parse_program("", "X"), ParseError);
    CHECK_THROWS_AS(parse_program("return true\nreturn", "X"), ParseError);
}

TEST_CASE("every path must return") {
    CHECK_THROWS_AS(parse_program("if household[\"a\"] == 1 {\n return true\n}", "X"), MissingReturn);
    CHECK_THROWS_AS(parse_program("for member in household {\n return true\n}", "X"), MissingReturn);
    CHECK_NOTHROW(parse_program("if household[\"a\"] == 1 {\n return true\n} else {\n return false\n}", "X"));
}

TEST_CASE("both surface forms give the same tree") {
    auto brace = parse_program(R"(for member in household {
    if member["age"] < 18 {
        return true
    }
}
return false)", "Kids");
    auto py = parse_program(R"(def check_eligibility(hh):
    for member in hh:
        if member["age"] < 18:
            return True
    return False
)", "Kids");
    CHECK(structurally_equal(brace, py));
}

TEST_CASE("pretty print round trip and injectivity over the program corpus") {
    const auto programs = round_trip_corpus();
    REQUIRE(programs.size() >= 20);
    std::vector<std::string> texts;
    for (const auto& p : programs) {
        const std::string text = pretty_print(p);
        INFO(p.opportunity_id << "\n" << text);
        auto back = parse_program(text, p.opportunity_id);
        CHECK(structurally_equal(p, back));
        CHECK(pretty_print(back) == text);
        texts.push_back(text);
    }
    for (std::size_t i = 0; i < programs.size(); ++i) {
        for (std::size_t j = i + 1; j < programs.size(); ++j) {
            const bool same_tree = structurally_equal(programs[i], parse_program(texts[j], programs[i].opportunity_id));
            CHECK((texts[i] == texts[j]) == same_tree);
        }
    }
}

TEST_CASE("constant program decides on an empty store") {
    auto p = parse_program("return true", "X");
    features::FeatureStore empty;
    auto out = evaluate(p, empty);
    REQUIRE(std::holds_alternative<Decision>(out));
    const auto& d = std::get<Decision>(out);
    CHECK(d.eligible);
    CHECK(d.trace.executed == std::set<NodeId>{0});
}

TEST_CASE("first lookup on an empty store misses") {
    auto p = parse_program("return members[0][\"age\"] >= 18", "X");
    features::FeatureStore s(schema_of({{"member.age", features::SlotConstraint::integer(0, 130)}}));
    auto out = evaluate(p, s);
    REQUIRE(std::holds_alternative<Missing>(out));
    CHECK(std::get<Missing>(out).key == KeyPath::member(0, "age"));
}

TEST_CASE("member loops miss on household size first") {
    const auto& c = support::checker("SeniorFare");
    features::FeatureStore s(c.schema);
    auto out = evaluate(c.program, s);
    REQUIRE(std::holds_alternative<Missing>(out));
    CHECK(std::get<Missing>(out).key == KeyPath::household("size"));
    CHECK(std::get<Missing>(out).node == 0);
    REQUIRE_FALSE(s.put(KeyPath::household("size"), "2"));
    out = evaluate(c.program, s);
    CHECK(std::get<Missing>(out).key == KeyPath::member(0, "age"));
}

TEST_CASE("three-condition checker matches a hand truth table") {
    const auto schema = schema_of({{"household.income", features::SlotConstraint::real(0, {})},
                                   {"household.housing", features::SlotConstraint::choice({"rent", "own"})},
                                   {"household.disabled", yes_no()}});
    auto p = parse_program(R"(if household["income"] < 2000 {
    if household["housing"] == "rent" {
        return true
    }
    return false
} else {
    if household["disabled"] == "yes" {
        return true
    } else {
        return false
    }
})", "Three");
    struct Row {
        const char* income;
        const char* housing;
        const char* disabled;
        bool eligible;
        const char* outcomes;  // condition results along the path
    };
    const Row table[] = {
        {"1000", "rent", "yes", true, "TT"},  {"1000", "rent", "no", true, "TT"},
        {"1000", "own", "yes", false, "TF"},  {"1000", "own", "no", false, "TF"},
        {"3000", "rent", "yes", true, "FT"},  {"3000", "rent", "no", false, "FF"},
        {"3000", "own", "yes", true, "FT"},   {"3000", "own", "no", false, "FF"},
    };
    std::vector<Trace> traces;
    for (const auto& row : table) {
        auto s = store_with(schema, {{KeyPath::household("income"), row.income},
                                     {KeyPath::household("housing"), row.housing},
                                     {KeyPath::household("disabled"), row.disabled}});
        auto out = evaluate(p, s);
        REQUIRE(std::holds_alternative<Decision>(out));
        CHECK(std::get<Decision>(out).eligible == row.eligible);
        traces.push_back(std::get<Decision>(out).trace);
    }
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            CHECK((traces[i] == traces[j]) == (std::string(table[i].outcomes) == table[j].outcomes));
        }
    }
}

TEST_CASE("evaluation faults are loud") {
    const auto schema = schema_of({{"household.tier", features::SlotConstraint::choice({"a", "b"})},
                                   {"household.n", features::SlotConstraint::integer()}});
    auto s = store_with(schema, {{KeyPath::household("tier"), "a"}, {KeyPath::household("n"), "0"}});
    CHECK_THROWS_AS(evaluate(parse_program("return household[\"tier\"] + 1 > 2", "X"), s), TypeFault);
    CHECK_THROWS_AS(evaluate(parse_program("return 4 / household[\"n\"] > 2", "X"), s), TypeFault);
    CHECK_THROWS_AS(evaluate(parse_program("if household[\"n\"] {\n return true\n}\nreturn false", "X"), s), TypeFault);
    CHECK_THROWS_AS(evaluate(parse_program("return household[\"n\"] + 1", "X"), s), TypeFault);
    CHECK_THROWS_AS(evaluate(parse_program("return household[\"missing\"] == 1", "X"), s), features::UndefinedSlot);
}

TEST_CASE("corpus checkers agree with their reference oracles on grids") {
    const auto oracles = support::corpus_oracles();
    const auto grids = support::corpus_grids();
    for (const auto& c : support::corpus()) {
        INFO(c.id());
        const auto households = support::grid_households(grids.at(c.id()));
        REQUIRE(households.size() <= 512);
        for (const auto& h : households) {
            auto out = evaluate(c.program, usersim::to_store(h, c.schema));
            REQUIRE(std::holds_alternative<Decision>(out));
            CHECK(std::get<Decision>(out).eligible == oracles.at(c.id())(h).eligible);
        }
    }
}

TEST_CASE("evaluation is deterministic, pure and monotone in the store") {
    const auto& corpus = support::corpus();
    const auto schema = usersim::schema_union(corpus);
    const auto households =
        usersim::sample_diverse(schema, usersim::collect_thresholds(corpus), {}, 7, 60);
    for (const auto& h : households) {
        for (const auto& c : corpus) {
            const auto full = usersim::to_store(h, c.schema);
            const auto before = full;
            auto a = evaluate(c.program, full);
            auto b = evaluate(c.program, full);
            CHECK(full == before);
            REQUIRE(std::holds_alternative<Decision>(a));
            const auto& da = std::get<Decision>(a);
            CHECK(da.trace == std::get<Decision>(b).trace);
            CHECK(da.trace.executed.count(c.program.entry) == 1);

            // Only the keys the evaluation read: same decision, same trace.
            features::FeatureStore partial(c.schema);
            for (const auto& k : da.reads) REQUIRE_FALSE(partial.put_value(k, *full.get(k)));
            auto p = evaluate(c.program, partial);
            REQUIRE(std::holds_alternative<Decision>(p));
            CHECK(std::get<Decision>(p).eligible == da.eligible);
            CHECK(std::get<Decision>(p).trace == da.trace);
        }
    }
}

TEST_CASE("filling the first miss never moves the miss earlier") {
    // Feed keys one by one in the order the checker asks for them; every
    // later miss is a key not read so far.
    std::mt19937_64 rng(3);
    const auto& corpus = support::corpus();
    const auto households = usersim::sample_diverse(usersim::schema_union(corpus),
                                                    usersim::collect_thresholds(corpus), {}, 11, 40);
    for (const auto& h : households) {
        for (const auto& c : corpus) {
            const auto full = usersim::to_store(h, c.schema);
            features::FeatureStore s(c.schema);
            std::vector<KeyPath> asked;
            while (true) {
                auto out = evaluate(c.program, s);
                if (std::holds_alternative<Decision>(out)) break;
                const auto key = std::get<Missing>(out).key;
                CHECK(std::find(asked.begin(), asked.end(), key) == asked.end());
                asked.push_back(key);
                REQUIRE_FALSE(s.put_value(key, *full.get(key)));
            }
            auto done = evaluate(c.program, s);
            CHECK(std::get<Decision>(done).eligible == std::get<Decision>(evaluate(c.program, full)).eligible);
            CHECK(std::get<Decision>(done).reads == asked);
        }
    }
}

TEST_CASE("loop traces keep the member index") {
    const auto& c = support::checker("SeniorFare");
    auto first = support::household({}, {{{"age", std::int64_t{70}}}, {{"age", std::int64_t{30}}}});
    auto second = support::household({}, {{{"age", std::int64_t{30}}}, {{"age", std::int64_t{70}}}});
    auto a = std::get<Decision>(evaluate(c.program, usersim::to_store(first, c.schema)));
    auto b = std::get<Decision>(evaluate(c.program, usersim::to_store(second, c.schema)));
    CHECK(a.eligible);
    CHECK(b.eligible);
    CHECK(a.trace.executed == b.trace.executed);  // coverage unit is the node set
    CHECK_FALSE(a.trace == b.trace);              // branch outcomes differ
}

TEST_CASE("static queries over a program") {
    const auto& c = support::checker("WorkforceBronx");
    auto slots = slots_read(c.program);
    CHECK(std::find(slots.begin(), slots.end(), SlotKey{Scope::Household, "size"}) != slots.end());
    CHECK(compared_literals(c.program, SlotKey{Scope::Household, "borough"}) == std::vector<std::string>{"bronx"});
    CHECK(compared_thresholds(c.program, SlotKey{Scope::Member, "age"}) == std::vector<double>{18});
    CHECK(node_line(c.program, 0) == "if household[\"borough\"] != \"bronx\"");
}
