#include "screener/bench/dataset.hpp"
#include "screener/bench/runner.hpp"
#include "screener/corpus.hpp"
#include "screener/llm/gateway.hpp"
#include "screener/llm/http_provider.hpp"
#include "screener/llm/mock.hpp"
#include "screener/service/service.hpp"
#include "screener/synth/synthesis.hpp"
#include "screener/usersim/sampler.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

using namespace screener;

namespace {

struct ProviderOptions {
    std::string provider = "mock";
    std::string mock_script;
    std::string audit;
    double rps = 0;
};

void add_provider_options(CLI::App* cmd, ProviderOptions& o) {
    cmd->add_option("--provider", o.provider, "Model provider")->check(CLI::IsMember({"mock", "http"}));
    cmd->add_option("--mock-script", o.mock_script, "JSON script for the mock provider")->check(CLI::ExistingFile);
    cmd->add_option("--audit", o.audit, "Append one JSONL record per model call here");
    cmd->add_option("--rps", o.rps, "Provider requests per second (0: unlimited)");
}

std::shared_ptr<llm::Provider> make_provider(const ProviderOptions& o) {
    if (o.provider == "http") return std::make_shared<llm::HttpProvider>(llm::HttpProviderConfig::from_environment());
    llm::MockScript script;
    if (!o.mock_script.empty()) script = llm::mock_script_from_json(nlohmann::json::parse(read_file(o.mock_script)));
    return std::make_shared<llm::MockProvider>(std::move(script));
}

std::unique_ptr<llm::Gateway> make_gateway(const ProviderOptions& o, const std::string& audit_suffix = "") {
    llm::GatewayOptions go;
    go.requests_per_second = o.rps;
    if (!o.audit.empty()) go.audit_path = o.audit + audit_suffix;
    return std::make_unique<llm::Gateway>(make_provider(o), go);
}

std::string default_rules() {
    return std::string(SCREENER_DATA_DIR) + "/rules";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Program-guided eligibility screening: synthesis, datasets, benchmarks and a dialog service"};
    app.require_subcommand(1);

    // synth
    ProviderOptions synth_p;
    std::string synth_req, synth_out, synth_schema;
    int synth_jobs = 1, synth_attempts = llm::kDefaultMaxAttempts;
    auto* synth = app.add_subcommand("synth", "Generate checkers from requirement texts");
    synth->add_option("--requirements", synth_req, "Directory of <id>.txt requirement texts")
        ->required()
        ->check(CLI::ExistingDirectory);
    synth->add_option("--out", synth_out, "Output directory for .rules/.schema.json/.raw.json")->required();
    synth->add_option("--preexisting", synth_schema, "Schema JSON of slots to reuse")->check(CLI::ExistingFile);
    synth->add_option("--jobs", synth_jobs, "Concurrent syntheses");
    synth->add_option("--max-attempts", synth_attempts, "Generation attempts per document");
    add_provider_options(synth, synth_p);

    // sample
    std::string sample_rules, sample_consistency, sample_dist, sample_out;
    std::uint64_t sample_seed = 0;
    std::size_t sample_n = 100;
    auto* sample = app.add_subcommand("sample", "Sample simulated households into a pool file");
    sample->add_option("--rules", sample_rules, "Checker directory")->required()->check(CLI::ExistingDirectory);
    sample->add_option("--consistency", sample_consistency, "Consistency rules JSON")->check(CLI::ExistingFile);
    sample->add_option("--distribution", sample_dist, "Feature distributions JSON (representative sampling)")
        ->check(CLI::ExistingFile);
    sample->add_option("--seed", sample_seed, "Random seed");
    sample->add_option("-n,--count", sample_n, "Households to draw");
    sample->add_option("--out", sample_out, "Output JSONL")->required();

    // minimize
    std::string min_pool, min_rules, min_out;
    auto* minimize = app.add_subcommand("minimize", "Select a minimal trace-covering dataset from a pool");
    minimize->add_option("--pool", min_pool, "Household pool JSONL")->required()->check(CLI::ExistingFile);
    minimize->add_option("--rules", min_rules, "Checker directory")->required()->check(CLI::ExistingDirectory);
    minimize->add_option("--out", min_out, "Dataset JSONL")->required();

    // label
    std::string label_dataset, label_rules, label_out;
    auto* label = app.add_subcommand("label", "Fill gold decisions of a dataset");
    label->add_option("--dataset", label_dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    label->add_option("--rules", label_rules, "Checker directory")->required()->check(CLI::ExistingDirectory);
    label->add_option("--out", label_out, "Output JSONL (default: rewrite the dataset)");

    // bench run
    ProviderOptions bench_p;
    std::string bench_agent = "proada", bench_dataset, bench_user = "oracle", bench_out, bench_rules = default_rules(),
                bench_transcripts;
    std::uint64_t bench_seed = 0;
    int bench_parallel = 1;
    auto* bench = app.add_subcommand("bench", "Benchmark commands");
    bench->require_subcommand(1);
    auto* run = bench->add_subcommand("run", "Run an agent over a labelled dataset");
    run->add_option("--agent", bench_agent, "Agent")->check(CLI::IsMember({"proada", "direct", "react", "random"}));
    run->add_option("--dataset", bench_dataset, "Labelled dataset JSONL")->required()->check(CLI::ExistingFile);
    run->add_option("--user", bench_user, "Simulated user")->check(CLI::IsMember({"oracle", "llm"}));
    run->add_option("--seed", bench_seed, "Seed");
    run->add_option("--out", bench_out, "Report JSON")->required();
    run->add_option("--rules", bench_rules, "Checker directory")->check(CLI::ExistingDirectory);
    run->add_option("--transcripts", bench_transcripts, "Transcript directory (default: <out dir>/transcripts)");
    run->add_option("--parallel", bench_parallel, "Concurrent sessions");
    add_provider_options(run, bench_p);

    // serve
    ProviderOptions serve_p;
    std::string serve_rules, serve_state = "sessions", serve_host = "0.0.0.0";
    int serve_port = 0;
    auto* serve = app.add_subcommand("serve", "HTTP dialog service");
    serve->add_option("--rules", serve_rules, "Checker directory")->required()->check(CLI::ExistingDirectory);
    serve->add_option("--port", serve_port, "Port (default: $PORT, else 8080)");
    serve->add_option("--host", serve_host, "Bind address");
    serve->add_option("--state", serve_state, "Session log directory");
    add_provider_options(serve, serve_p);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            auto gw = make_gateway(synth_p);
            features::FeatureSchema pre;
            if (!synth_schema.empty()) pre = features::schema_from_json(nlohmann::json::parse(read_file(synth_schema)));
            const auto docs = load_requirements(synth_req);
            if (docs.empty()) throw Error("no requirement texts in " + synth_req);
            auto results = synth::synthesize_all(*gw, docs, pre, synth_jobs, synth_attempts);
            for (const auto& r : results) {
                synth::write_result(synth_out, r);
                std::cout << r.program.opportunity_id << ": " << r.attempts << " attempt(s), "
                          << r.schema.size() << " slot(s)\n";
            }
        } else if (*sample) {
            const auto corpus = load_corpus(sample_rules);
            const auto schema = usersim::schema_union(corpus);
            std::vector<usersim::ConsistencyRule> rules;
            if (!sample_consistency.empty()) {
                rules = usersim::consistency_from_json(nlohmann::json::parse(read_file(sample_consistency)));
            }
            std::vector<usersim::HouseholdProfile> profiles;
            if (sample_dist.empty()) {
                profiles = usersim::sample_diverse(schema, usersim::collect_thresholds(corpus), rules, sample_seed,
                                                   sample_n);
            } else {
                auto dist = usersim::distributions_from_json(nlohmann::json::parse(read_file(sample_dist)));
                profiles = usersim::sample_representative(schema, dist, rules, sample_seed, sample_n);
            }
            std::vector<bench::DatasetRecord> records;
            for (std::size_t i = 0; i < profiles.size(); ++i) {
                records.push_back({bench::household_id(i), std::move(profiles[i]), {}, {}});
            }
            bench::write_dataset(sample_out, records);
            std::cout << records.size() << " households written to " << sample_out << "\n";
        } else if (*minimize) {
            const auto corpus = load_corpus(min_rules);
            const auto households = bench::read_dataset(min_pool);
            const auto pool = bench::build_pool(households, corpus);
            const auto selection = bench::minimize_dataset(pool);
            const auto records = bench::selected_records(pool, selection, households);
            bench::write_dataset(min_out, records);
            std::cout << records.size() << " of " << households.size() << " households, " << selection.entries.size()
                      << " pairs, " << bench::covered(pool).size() << " coverage units\n";
        } else if (*label) {
            const auto corpus = load_corpus(label_rules);
            auto records = bench::read_dataset(label_dataset);
            bench::label_gold(records, corpus);
            bench::write_dataset(label_out.empty() ? label_dataset : label_out, records);
            std::cout << records.size() << " records labelled\n";
        } else if (*run) {
            const auto corpus = load_corpus(bench_rules);
            const auto dataset = bench::read_dataset(bench_dataset);
            bench::BenchConfig cfg;
            cfg.agent = bench::parse_agent(bench_agent);
            cfg.user = bench::parse_user_mode(bench_user);
            cfg.seed = bench_seed;
            cfg.parallelism = bench_parallel;
            const std::filesystem::path out(bench_out);
            cfg.transcripts_dir = bench_transcripts.empty() ? out.parent_path() / "transcripts"
                                                            : std::filesystem::path(bench_transcripts);
            auto agent_gw = make_gateway(bench_p);
            std::unique_ptr<llm::Gateway> user_gw;
            if (cfg.user == bench::UserMode::Llm) user_gw = make_gateway(bench_p, ".user");
            const auto report = bench::run_benchmark(dataset, corpus, *agent_gw, user_gw.get(), cfg);
            write_file(out, bench::to_json(report).dump(2) + "\n");
            std::cout << "F1 " << report.scores.f1 << "  turns " << report.turns_mean << "  TW-F1 "
                      << report.turn_weighted_f1 << "  failed sessions " << report.failed_sessions() << "\n";
        } else if (*serve) {
            if (serve_port == 0) {
                const char* env = std::getenv("PORT");
                serve_port = env ? std::atoi(env) : 8080;
            }
            auto gw = make_gateway(serve_p);
            service::SessionService svc(load_corpus(serve_rules), *gw, serve_state);
            std::cout << "listening on " << serve_host << ":" << serve_port << std::endl;
            service::serve(svc, serve_host, serve_port);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
