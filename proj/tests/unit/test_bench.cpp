#include "doctest.h"

#include "screener/bench/dataset.hpp"
#include "screener/bench/metrics.hpp"
#include "screener/bench/runner.hpp"
#include "screener/usersim/sampler.hpp"
#include "support/corpus_oracle.hpp"
#include "support/support.hpp"

#include <fstream>
#include <random>

using namespace screener;
using namespace screener::bench;
using support::MockRig;

namespace {

PoolEntry entry(std::size_t hh, std::string opp, std::set<rules::NodeId> nodes, bool decision = false) {
    PoolEntry e;
    e.household = hh;
    e.opportunity_id = std::move(opp);
    e.trace.executed = std::move(nodes);
    for (auto n : e.trace.executed) e.trace.visits.insert({n, -1});
    e.decision = decision;
    return e;
}

std::vector<DatasetRecord> sampled_records(std::uint64_t seed, std::size_t n) {
    const auto schema = usersim::schema_union(support::corpus());
    const auto thresholds = usersim::collect_thresholds(support::corpus());
    std::vector<DatasetRecord> out;
    auto profiles = usersim::sample_diverse(schema, thresholds, {}, seed, n);
    for (std::size_t i = 0; i < profiles.size(); ++i) out.push_back({household_id(i), profiles[i], {}, {}});
    return out;
}

// Random pool over synthetic units: each of `households` pairs with a few of
// three opportunities, each trace a random subset of 8 nodes.
CoveragePool random_pool(std::mt19937_64& rng, std::size_t households) {
    CoveragePool pool;
    for (std::size_t h = 0; h < households; ++h) {
        for (const char* opp : {"A", "B", "C"}) {
            if (rng() % 3 == 0) continue;
            std::set<rules::NodeId> nodes{0};
            for (rules::NodeId n = 1; n < 8; ++n) {
                if (rng() % 3 == 0) nodes.insert(n);
            }
            pool.add(entry(h, opp, nodes));
        }
    }
    return pool;
}

}  // namespace

TEST_CASE("micro F1") {
    auto s = micro_f1({{true, true}, {true, false}, {false, true}, {false, false}});
    CHECK(s.precision == doctest::Approx(50));
    CHECK(s.recall == doctest::Approx(50));
    CHECK(s.f1 == doctest::Approx(50));
    CHECK(s.counts.tp == 1);
    CHECK(s.counts.fp == 1);
    CHECK(s.counts.fn == 1);
    CHECK(s.counts.tn == 1);
    CHECK_FALSE(s.degenerate);

    auto perfect = micro_f1({{true, true}, {false, false}, {true, true}});
    CHECK(perfect.f1 == doctest::Approx(100));

    auto none = micro_f1({{false, true}, {false, false}});
    CHECK(none.degenerate);
    CHECK(none.f1 == 0);
    CHECK(none.precision == 0);
    CHECK(none.recall == 0);

    // precision 2/3, recall 2/4: F1 = 2PR/(P+R) = 4/7
    auto uneven = micro_f1({{true, true}, {true, true}, {true, false}, {false, true}, {false, true}});
    CHECK(uneven.precision == doctest::Approx(200.0 / 3));
    CHECK(uneven.recall == doctest::Approx(50));
    CHECK(uneven.f1 == doctest::Approx(400.0 / 7));

    CHECK_THROWS_AS(micro_f1({}), Error);
}

TEST_CASE("turn-weighted F1") {
    // published (F1, turns) -> turn-weighted F1
    const std::vector<std::array<double, 3>> rows = {
        {56.2, 20.4, 46.7}, {40.8, 61.7, 25.2}, {33.6, 6.0, 31.7}, {36.3, 0, 36.3}, {57.5, 22.0, 47.1}};
    for (const auto& r : rows) CHECK(std::abs(turn_weighted_f1(r[0], r[1]) - r[2]) <= 0.05);
    CHECK(turn_weighted_f1(80, 0) == 80);
    CHECK(turn_weighted_f1(80, 100) == 40);
    CHECK(turn_weighted_f1(0, 50) == 0);
    CHECK(turn_weighted_f1(60, 10) > turn_weighted_f1(50, 10));
    CHECK(turn_weighted_f1(60, 10) > turn_weighted_f1(60, 11));
    CHECK_THROWS_AS(turn_weighted_f1(101, 0), Error);
    CHECK_THROWS_AS(turn_weighted_f1(-1, 0), Error);
    CHECK_THROWS_AS(turn_weighted_f1(50, 100.5), Error);
    CHECK_THROWS_AS(turn_weighted_f1(50, -0.1), Error);
}

TEST_CASE("dataset records round trip") {
    auto dir = support::temp_dir("dataset");
    auto recs = sampled_records(1, 5);
    recs[0].opportunities = {"SeniorFare"};
    recs[0].gold = {{"SeniorFare", true}};
    write_dataset(dir / "d.jsonl", recs);
    CHECK(read_dataset(dir / "d.jsonl") == recs);

    // profile-only lines get generated ids
    std::ofstream(dir / "p.jsonl") << usersim::to_json(recs[1].household).dump() << "\n\n"
                                   << usersim::to_json(recs[2].household).dump() << "\n";
    auto plain = read_dataset(dir / "p.jsonl");
    REQUIRE(plain.size() == 2);
    CHECK(plain[0].id == "hh-0000");
    CHECK(plain[1].id == "hh-0001");
    CHECK(plain[1].household == recs[2].household);
    CHECK(plain[0].opportunities.empty());
    CHECK_THROWS(read_dataset(dir / "missing.jsonl"));
}

TEST_CASE("gold labels") {
    using usersim::HouseholdProfile;
    std::vector<DatasetRecord> recs(1);
    recs[0].id = "h";
    // a 19 year old former foster youth living alone, renting in the Bronx
    recs[0].household = support::household(
        {{"monthly_income", 900.0}, {"housing", std::string("rent")}, {"borough", std::string("bronx")}},
        {{{"age", std::int64_t{19}}, {"former_foster_youth", std::string("yes")},
          {"homeless_or_runaway", std::string("no")}, {"pregnant", std::string("no")},
          {"student", std::string("no")}, {"disabled", std::string("no")}, {"veteran", std::string("no")},
          {"in_foster_care", std::string("no")}, {"relation", std::string("self")},
          {"employed", std::string("no")}}});
    label_gold(recs, support::corpus());
    const auto& g = recs[0].gold;
    CHECK(g.size() == support::corpus().size());
    CHECK(g.at("TrainEarn"));
    CHECK(g.at("LibraryCard"));
    CHECK(g.at("SummerYouthJobs"));
    CHECK(g.at("WorkforceBronx"));
    CHECK(g.at("EmergencyFood"));  // 900 < 800 * 1 + 400
    CHECK_FALSE(g.at("SeniorFare"));
    CHECK_FALSE(g.at("VeteranHousing"));
    CHECK_FALSE(g.at("DisabilityRentFreeze"));
    CHECK_FALSE(g.at("ChildCareAssist"));

    // a checker that always says no
    auto never = support::make_checker("Never", "return false", {});
    std::vector<DatasetRecord> one = {{"x", recs[0].household, {"Never"}, {}}};
    label_gold(one, {never});
    CHECK(one[0].gold == std::map<std::string, bool>{{"Never", false}});

    std::vector<DatasetRecord> unknown = {{"x", recs[0].household, {"Nope"}, {}}};
    CHECK_THROWS_AS(label_gold(unknown, support::corpus()), CorpusError);

    auto partial = recs;
    partial[0].household.members[0].erase("age");
    partial[0].gold.clear();
    try {
        label_gold(partial, support::corpus());
        FAIL("expected IncompleteProfile");
    } catch (const IncompleteProfile& e) {
        CHECK(e.household == "h");
        CHECK(e.key == KeyPath::member(0, "age"));
    }
}

TEST_CASE("gold labels agree with hand-written oracles") {
    const auto oracles = support::corpus_oracles();
    auto recs = sampled_records(4, 80);
    label_gold(recs, support::corpus());
    for (const auto& r : recs) {
        for (const auto& [id, eligible] : r.gold) CHECK(oracles.at(id)(r.household).eligible == eligible);
    }
}

TEST_CASE("minimizer on a hand-built pool") {
    // A covers {0,1,2} of X; B covers {0,1}; C covers {3} of Y.
    CoveragePool pool;
    pool.add(entry(0, "X", {0, 1, 2}));
    pool.add(entry(1, "X", {0, 1}));
    pool.add(entry(2, "Y", {3}));
    CHECK_THROWS(pool.add(entry(0, "X", {0})));
    CHECK(pool.household_count() == 3);
    auto sel = minimize_dataset(pool);
    CHECK(sel.households == std::vector<std::size_t>{0, 2});
    CHECK(sel.entries == std::vector<std::size_t>{0, 2});
    CHECK(covered(pool, sel.entries) == covered(pool));
    CHECK(removable_entries(pool, sel.entries).empty());
    // units are per opportunity: node 0 of X and of Y differ
    CHECK(units_of(entry(0, "X", {0})) != units_of(entry(0, "Y", {0})));

    CoveragePool single;
    single.add(entry(0, "X", {0}));
    single.add(entry(0, "Y", {0, 1}));
    auto s1 = minimize_dataset(single);
    CHECK(s1.households.size() == 1);
    CHECK(s1.entries.size() == 2);

    CHECK_THROWS(minimize_dataset(CoveragePool{}));
}

TEST_CASE("pruning drops pairs whose units are covered elsewhere") {
    // Household 0 brings {0,1} of X and {0} of Y; household 1 brings {0,1,2}
    // of X and {0} of Y. Greedy picks 1 first, then 0 adds nothing, so 0 is
    // never selected.
    CoveragePool pool;
    pool.add(entry(0, "X", {0, 1}));
    pool.add(entry(0, "Y", {0, 5}));
    pool.add(entry(1, "X", {0, 1, 2}));
    pool.add(entry(1, "Y", {0}));
    auto sel = minimize_dataset(pool);
    CHECK(sel.households == std::vector<std::size_t>{0, 1});
    // (1, Y) only repeats Y:0, which (0, Y) also covers; (0, X) is subsumed by (1, X)
    CHECK(sel.entries == std::vector<std::size_t>{1, 2});
    CHECK(covered(pool, sel.entries) == covered(pool));
}

TEST_CASE("minimizer preserves coverage on random pools") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        auto pool = random_pool(rng, 50);
        if (pool.empty()) continue;
        auto sel = minimize_dataset(pool);
        CHECK(covered(pool, sel.entries) == covered(pool));
        CHECK(removable_entries(pool, sel.entries).empty());
        std::set<std::size_t> picked(sel.households.begin(), sel.households.end());
        CHECK(picked.size() == sel.households.size());
        for (auto i : sel.entries) CHECK(picked.count(pool.entries()[i].household));
        CHECK(std::is_sorted(sel.entries.begin(), sel.entries.end()));
    }
}

TEST_CASE("pool from the corpus and selected records") {
    auto recs = sampled_records(7, 30);
    auto pool = build_pool(recs, support::corpus());
    CHECK(pool.entries().size() == 30 * support::corpus().size());
    auto sel = minimize_dataset(pool);
    auto out = selected_records(pool, sel, recs);
    CHECK(out.size() <= sel.households.size());
    std::size_t pairs = 0;
    for (const auto& r : out) {
        pairs += r.opportunities.size();
        CHECK(r.gold.size() == r.opportunities.size());
        auto relabeled = std::vector<DatasetRecord>{r};
        relabeled[0].gold.clear();
        label_gold(relabeled, support::corpus());
        CHECK(relabeled[0].gold == r.gold);
    }
    CHECK(pairs == sel.entries.size());
}

TEST_CASE("agent and mode names") {
    for (auto a : {AgentKind::ProAda, AgentKind::Direct, AgentKind::React, AgentKind::Random}) {
        CHECK(parse_agent(to_string(a)) == a);
    }
    CHECK(parse_user_mode("oracle") == UserMode::Oracle);
    CHECK(parse_user_mode("llm") == UserMode::Llm);
    CHECK_THROWS(parse_agent("gpt"));
    CHECK_THROWS(parse_user_mode("human"));
}

TEST_CASE("benchmark run with the program-guided agent") {
    auto recs = sampled_records(12, 8);
    for (auto& r : recs) r.opportunities = {"TrainEarn", "SeniorFare", "EmergencyFood"};
    label_gold(recs, support::corpus());
    auto dir = support::temp_dir("bench");
    MockRig rig;
    BenchConfig cfg;
    cfg.transcripts_dir = dir;
    auto report = run_benchmark(recs, support::corpus(), rig.gw(), nullptr, cfg);
    CHECK(report.pairs.size() == 24);
    CHECK(report.sessions.size() == 8);
    CHECK(report.failed_sessions() == 0);
    CHECK(report.scores.f1 == doctest::Approx(100).epsilon(1e-12));
    CHECK(report.agent == "proada");
    CHECK(report.provider == "mock");
    // self-consistency
    CHECK(report.turn_weighted_f1 == turn_weighted_f1(report.scores.f1, report.turns_mean));
    double sum = 0;
    for (const auto& s : report.sessions) sum += s.turns;
    CHECK(report.turns_mean == doctest::Approx(sum / 8));
    for (const auto& r : recs) CHECK(std::filesystem::exists(dir / (r.id + ".jsonl")));

    auto j = to_json(report);
    CHECK(j["metadata"]["clarity_policy"] == kClarityPolicy);
    CHECK(j["metrics"]["tp"] == report.scores.counts.tp);
    CHECK(j["pairs"].size() == 24);
}

TEST_CASE("benchmark input validation") {
    MockRig rig;
    CHECK_THROWS_AS(run_benchmark({}, support::corpus(), rig.gw(), nullptr, {}), Error);
    auto recs = sampled_records(2, 1);
    recs[0].opportunities = {"SeniorFare"};
    CHECK_THROWS_AS(run_benchmark(recs, support::corpus(), rig.gw(), nullptr, {}), Error);
    BenchConfig llm_user;
    llm_user.user = UserMode::Llm;
    label_gold(recs, support::corpus());
    CHECK_THROWS_AS(run_benchmark(recs, support::corpus(), rig.gw(), nullptr, llm_user), Error);
}

TEST_CASE("random agent scores near 50 on balanced gold") {
    std::vector<DatasetRecord> recs;
    auto base = sampled_records(3, 1)[0].household;
    const std::vector<std::string> opps = {"TrainEarn", "SeniorFare", "PrenatalCare", "LibraryCard"};
    for (int i = 0; i < 100; ++i) {
        DatasetRecord r{household_id(i), base, opps, {}};
        for (std::size_t k = 0; k < opps.size(); ++k) r.gold[opps[k]] = (i + k) % 2 == 0;
        recs.push_back(r);
    }
    MockRig rig;
    BenchConfig cfg;
    cfg.agent = AgentKind::Random;
    cfg.seed = 2024;
    auto report = run_benchmark(recs, support::corpus(), rig.gw(), nullptr, cfg);
    CHECK(report.pairs.size() == 400);
    CHECK(std::abs(report.scores.f1 - 50) <= 5);
    CHECK(report.turns_mean == 0);
    CHECK(rig.provider->calls() == 0);
    auto again = run_benchmark(recs, support::corpus(), rig.gw(), nullptr, cfg);
    CHECK(to_json(again) == to_json(report));
}

TEST_CASE("failed sessions count as false predictions") {
    auto recs = sampled_records(5, 2);
    for (auto& r : recs) r.opportunities = {"SeniorFare"};
    label_gold(recs, support::corpus());
    MockRig rig;
    rig.fail("ready", llm::MockResponse::Kind::AuthFailure);
    BenchConfig cfg;
    cfg.agent = AgentKind::Direct;
    auto report = run_benchmark(recs, support::corpus(), rig.gw(), nullptr, cfg);
    CHECK(report.failed_sessions() == 2);
    for (const auto& p : report.pairs) CHECK_FALSE(p.prediction);
    for (const auto& s : report.sessions) CHECK_FALSE(s.error.empty());
}
