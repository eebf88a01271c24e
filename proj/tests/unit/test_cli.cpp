#include "doctest.h"

#include "screener/bench/dataset.hpp"
#include "support/support.hpp"

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

using namespace screener;

namespace {

// Runs the CLI with stdout/stderr captured into `log`; returns the exit code.
int cli(const std::string& args, const std::filesystem::path& log, const std::string& env = "") {
    const std::string cmd = env + " \"" + std::string(SCREENER_CLI) + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string q(const std::filesystem::path& p) {
    return "\"" + p.string() + "\"";
}

}  // namespace

TEST_CASE("minimize on the three-household fixture keeps two") {
    auto dir = support::temp_dir("cli-min");
    const auto fx = support::fixture("abc");
    REQUIRE(cli("minimize --pool " + q(fx / "pool.jsonl") + " --rules " + q(fx / "rules") + " --out " +
                    q(dir / "out.jsonl"),
                dir / "log") == 0);
    auto recs = bench::read_dataset(dir / "out.jsonl");
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].id == "hh-0000");
    CHECK(recs[1].id == "hh-0002");
    CHECK(recs[0].gold.at("Senior"));
    CHECK_FALSE(recs[1].gold.at("Senior"));
}

TEST_CASE("bench run is reproducible with the mock provider") {
    auto dir = support::temp_dir("cli-bench");
    const auto data = support::fixture("e2e") / "households.jsonl";
    const auto rules = support::data_dir() / "rules";
    for (const char* run : {"a", "b"}) {
        REQUIRE(cli("bench run --agent proada --provider mock --dataset " + q(data) + " --rules " + q(rules) +
                        " --seed 3 --out " + q(dir / run / "report.json"),
                    dir / (std::string(run) + ".log")) == 0);
    }
    CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
    auto report = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
    CHECK(report["metrics"]["f1"] == 100.0);
    CHECK(report["metadata"]["agent"] == "proada");
    CHECK(report["metadata"]["seed"] == 3);
    for (const auto& entry : std::filesystem::directory_iterator(dir / "a" / "transcripts")) {
        CHECK(slurp(entry.path()) == slurp(dir / "b" / "transcripts" / entry.path().filename()));
    }
    CHECK(std::filesystem::exists(dir / "a" / "transcripts" / "foster-youth.jsonl"));
}

TEST_CASE("sample, label and bench baselines run end to end") {
    auto dir = support::temp_dir("cli-pipeline");
    const auto rules = support::data_dir() / "rules";
    REQUIRE(cli("sample --rules " + q(rules) + " --consistency " + q(support::data_dir() / "consistency.json") +
                    " --seed 5 -n 12 --out " + q(dir / "pool.jsonl"),
                dir / "log") == 0);
    REQUIRE(cli("sample --rules " + q(rules) + " --seed 5 -n 12 --out " + q(dir / "pool2.jsonl"), dir / "log") == 0);
    CHECK(bench::read_dataset(dir / "pool.jsonl").size() == 12);

    REQUIRE(cli("minimize --pool " + q(dir / "pool.jsonl") + " --rules " + q(rules) + " --out " + q(dir / "d.jsonl"),
                dir / "log") == 0);
    auto recs = bench::read_dataset(dir / "d.jsonl");
    for (auto& r : recs) r.gold.clear();
    bench::write_dataset(dir / "unlabelled.jsonl", recs);
    REQUIRE(cli("label --dataset " + q(dir / "unlabelled.jsonl") + " --rules " + q(rules) + " --out " +
                    q(dir / "labelled.jsonl"),
                dir / "log") == 0);
    CHECK(bench::read_dataset(dir / "labelled.jsonl") == bench::read_dataset(dir / "d.jsonl"));

    for (const char* agent : {"direct", "react", "random"}) {
        CHECK(cli(std::string("bench run --agent ") + agent + " --dataset " + q(dir / "d.jsonl") + " --rules " +
                      q(rules) + " --out " + q(dir / agent / "r.json"),
                  dir / "log") == 0);
        auto report = nlohmann::json::parse(slurp(dir / agent / "r.json"));
        CHECK(report["metadata"]["agent"] == agent);
        CHECK(report["metadata"]["failed_sessions"] == 0);
    }
}

TEST_CASE("synth with a scripted mock") {
    auto dir = support::temp_dir("cli-synth");
    std::filesystem::create_directories(dir / "req");
    std::ofstream(dir / "req" / "Elder.txt") << "# Elder Meals\nAnyone aged 60 or older qualifies.\n";
    nlohmann::json script = {
        {"rules",
         {{{"purpose", "generate-checker"},
           {"responses", {"def check_eligibility(hh):\n    for member in hh:\n        if member[\"age\"] >= 60:\n"
                          "            return True\n    return False\n"}}},
          {{"purpose", "get-type"}, {"responses", {"int"}}}}}};
    std::ofstream(dir / "script.json") << script.dump();
    REQUIRE(cli("synth --requirements " + q(dir / "req") + " --out " + q(dir / "out") + " --mock-script " +
                    q(dir / "script.json"),
                dir / "log") == 0);
    auto c = load_corpus(dir / "out", dir / "req");
    REQUIRE(c.size() == 1);
    CHECK(c[0].id() == "Elder");
    CHECK(c[0].doc.title == "Elder Meals");
    CHECK(std::filesystem::exists(dir / "out" / "Elder.raw.json"));
}

TEST_CASE("usage errors exit non-zero") {
    auto dir = support::temp_dir("cli-err");
    CHECK(cli("sample --out " + q(dir / "x.jsonl"), dir / "log") != 0);
    CHECK(cli("minimize --pool /nonexistent --rules /nonexistent --out x", dir / "log") != 0);
    CHECK(cli("bench run --agent genius --dataset x --out y", dir / "log") != 0);
    CHECK(cli("", dir / "log") != 0);
}

TEST_CASE("http provider without credentials fails cleanly") {
    auto dir = support::temp_dir("cli-http");
    const auto data = support::fixture("e2e") / "households.jsonl";
    const int code = cli("bench run --provider http --dataset " + q(data) + " --rules " +
                             q(support::data_dir() / "rules") + " --out " + q(dir / "r.json"),
                         dir / "log", "env -u PROVIDER_API_KEY -u PROVIDER_BASE_URL");
    CHECK(code != 0);
    CHECK(slurp(dir / "log").find("PROVIDER_BASE_URL") != std::string::npos);

    // with a key but an unreachable endpoint the key never reaches the output
    const std::string secret = "sk-cli-secret-777";
    cli("bench run --provider http --agent direct --dataset " + q(data) + " --rules " +
            q(support::data_dir() / "rules") + " --out " + q(dir / "r2.json") + " --audit " + q(dir / "audit.jsonl"),
        dir / "log2", "PROVIDER_API_KEY=" + secret + " PROVIDER_BASE_URL=http://127.0.0.1:9");
    CHECK(slurp(dir / "log2").find(secret) == std::string::npos);
    if (std::filesystem::exists(dir / "r2.json")) CHECK(slurp(dir / "r2.json").find(secret) == std::string::npos);
    if (std::filesystem::exists(dir / "audit.jsonl")) {
        CHECK(slurp(dir / "audit.jsonl").find(secret) == std::string::npos);
    }
}
