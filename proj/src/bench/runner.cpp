#include "screener/bench/runner.hpp"

#include "screener/baseline/agents.hpp"
#include "screener/dialog/engine.hpp"
#include "screener/usersim/responder.hpp"

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

namespace screener::bench {

std::string to_string(AgentKind agent) {
    switch (agent) {
        case AgentKind::ProAda: return "proada";
        case AgentKind::Direct: return "direct";
        case AgentKind::React:  return "react";
        case AgentKind::Random: return "random";
    }
    return "unknown";
}

std::string to_string(UserMode mode) {
    return mode == UserMode::Oracle ? "oracle" : "llm";
}

AgentKind parse_agent(const std::string& name) {
    for (auto a : {AgentKind::ProAda, AgentKind::Direct, AgentKind::React, AgentKind::Random}) {
        if (to_string(a) == name) return a;
    }
    throw Error("unknown agent '" + name + "' (expected proada, direct, react or random)");
}

UserMode parse_user_mode(const std::string& name) {
    if (name == "oracle") return UserMode::Oracle;
    if (name == "llm") return UserMode::Llm;
    throw Error("unknown user mode '" + name + "' (expected oracle or llm)");
}

std::size_t BenchmarkReport::failed_sessions() const {
    std::size_t n = 0;
    for (const auto& s : sessions) n += s.failed ? 1 : 0;
    return n;
}

nlohmann::json to_json(const BenchmarkReport& r) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : r.pairs) {
        pairs.push_back({{"household", p.household},
                         {"opportunity_id", p.opportunity_id},
                         {"prediction", p.prediction},
                         {"gold", p.gold}});
    }
    nlohmann::json sessions = nlohmann::json::array();
    for (const auto& s : r.sessions) {
        nlohmann::json j = {{"household", s.household},
                            {"turns", s.turns},
                            {"budget_exhausted", s.budget_exhausted},
                            {"failed", s.failed}};
        if (s.failed) j["error"] = s.error;
        sessions.push_back(std::move(j));
    }
    return {{"metadata",
             {{"agent", r.agent},
              {"provider", r.provider},
              {"user_mode", r.user_mode},
              {"seed", r.seed},
              {"clarity_policy", r.clarity_policy},
              {"failed_sessions", r.failed_sessions()},
              {"degenerate_f1", r.scores.degenerate}}},
            {"metrics",
             {{"precision", r.scores.precision},
              {"recall", r.scores.recall},
              {"f1", r.scores.f1},
              {"turns_mean", r.turns_mean},
              {"turn_weighted_f1", r.turn_weighted_f1},
              {"tp", r.scores.counts.tp},
              {"fp", r.scores.counts.fp},
              {"fn", r.scores.counts.fn},
              {"tn", r.scores.counts.tn}}},
            {"pairs", pairs},
            {"sessions", sessions}};
}

namespace {

struct Outcome {
    std::map<std::string, bool> predictions;
    SessionResult session;
};

class SessionRunner {
public:
    SessionRunner(const std::vector<Checker>& corpus, llm::Gateway& agent_gw, llm::Gateway* user_gw,
                  const BenchConfig& config)
        : agent_gw_(agent_gw), user_gw_(user_gw), config_(config), engine_(agent_gw) {
        for (const auto& c : corpus) by_id_[c.id()] = std::make_shared<const Checker>(c);
    }

    Outcome run(const DatasetRecord& r, std::uint64_t seed) const {
        Outcome out;
        out.session.household = r.id;
        try {
            switch (config_.agent) {
                case AgentKind::ProAda: run_proada(r, out); break;
                case AgentKind::Direct: run_prompt(r, baseline::Mode::Direct, out); break;
                case AgentKind::React:  run_prompt(r, baseline::Mode::React, out); break;
                case AgentKind::Random: {
                    baseline::RandomAgent agent(seed);
                    auto preds = agent.predict(r.opportunities.size());
                    for (std::size_t i = 0; i < preds.size(); ++i) out.predictions[r.opportunities[i]] = preds[i];
                    write_transcript(r, {}, out.predictions);
                    break;
                }
            }
        } catch (const Error& e) {
            out.session.failed = true;
            out.session.error = e.what();
            out.predictions.clear();
        }
        return out;
    }

private:
    std::vector<dialog::CheckerRef> checkers(const DatasetRecord& r) const {
        std::vector<dialog::CheckerRef> out;
        for (const auto& id : r.opportunities) {
            auto it = by_id_.find(id);
            if (it == by_id_.end()) throw CorpusError("unknown opportunity '" + id + "'");
            out.push_back(it->second);
        }
        return out;
    }

    std::string respond(const DatasetRecord& r, const std::string& question) const {
        if (config_.user == UserMode::Oracle) return usersim::oracle_respond(r.household, question);
        if (!user_gw_) throw Error("LLM user mode needs a user gateway");
        return usersim::llm_respond(*user_gw_, usersim::render_profile(r.household), question);
    }

    std::optional<std::filesystem::path> transcript_path(const DatasetRecord& r) const {
        if (!config_.transcripts_dir) return std::nullopt;
        return *config_.transcripts_dir / (r.id + ".jsonl");
    }

    void run_proada(const DatasetRecord& r, Outcome& out) const {
        dialog::Session s = engine_.open_session(checkers(r), r.id, transcript_path(r));
        // Each pass either asks (spending budget on the answer) or concludes.
        while (true) {
            auto action = engine_.advance(s);
            if (auto* done = std::get_if<dialog::Conclude>(&action)) {
                out.predictions = done->decisions;
                break;
            }
            const auto& ask = std::get<dialog::Ask>(action);
            engine_.ingest_answer(s, respond(r, ask.question));
        }
        out.session.turns = s.budget.used;
        out.session.budget_exhausted = s.budget_exhausted;
    }

    void run_prompt(const DatasetRecord& r, baseline::Mode mode, Outcome& out) const {
        const auto refs = checkers(r);
        std::vector<const RequirementDoc*> docs;
        for (const auto& c : refs) docs.push_back(&c->doc);
        baseline::PromptAgent agent(agent_gw_, mode);
        const int max_turns = dialog::TurnBudget::for_opportunities(docs.size()).max_turns;
        auto run = baseline::run_baseline(
            agent, docs, mode, [&](const std::string& q) { return respond(r, q); }, max_turns);
        for (std::size_t i = 0; i < r.opportunities.size(); ++i) {
            out.predictions[r.opportunities[i]] = run.predictions.at(i);
        }
        out.session.turns = run.turns;
        out.session.budget_exhausted = run.budget_exhausted;
        write_transcript(r, run.history, out.predictions);
    }

    void write_transcript(const DatasetRecord& r, const std::vector<std::pair<std::string, std::string>>& history,
                          const std::map<std::string, bool>& predictions) const {
        auto path = transcript_path(r);
        if (!path) return;
        std::string text = nlohmann::json{{"type", "open"},
                                          {"session_id", r.id},
                                          {"agent", to_string(config_.agent)},
                                          {"opportunities", r.opportunities}}
                               .dump() +
                           "\n";
        for (std::size_t i = 0; i < history.size(); ++i) {
            text += nlohmann::json{{"type", "turn"},
                                   {"index", i},
                                   {"question", history[i].first},
                                   {"answer", history[i].second}}
                        .dump() +
                    "\n";
        }
        text += nlohmann::json{{"type", "decisions"}, {"decisions", predictions}, {"turns_used", history.size()}}
                    .dump() +
                "\n";
        write_file(*path, text);
    }

    llm::Gateway& agent_gw_;
    llm::Gateway* user_gw_;
    const BenchConfig& config_;
    dialog::Engine engine_;
    std::map<std::string, dialog::CheckerRef> by_id_;
};

}  // namespace

BenchmarkReport run_benchmark(const std::vector<DatasetRecord>& dataset, const std::vector<Checker>& corpus,
                              llm::Gateway& agent_gw, llm::Gateway* user_gw, const BenchConfig& config) {
    std::size_t pair_count = 0;
    for (const auto& r : dataset) {
        for (const auto& id : r.opportunities) {
            if (!r.gold.count(id)) throw Error("record " + r.id + " has no gold label for " + id);
        }
        pair_count += r.opportunities.size();
    }
    if (pair_count == 0) throw Error("dataset has no (household, opportunity) pairs to score");
    if (config.user == UserMode::Llm && !user_gw && config.agent != AgentKind::Random) {
        throw Error("LLM user mode needs a user gateway");
    }
    if (config.transcripts_dir) std::filesystem::create_directories(*config.transcripts_dir);

    SessionRunner runner(corpus, agent_gw, user_gw, config);
    std::vector<Outcome> outcomes(dataset.size());
    // Random-agent seeds are per record so results do not depend on scheduling.
    auto seed_for = [&](std::size_t i) { return config.seed + i; };

    const int workers = std::max(1, std::min<int>(config.parallelism, static_cast<int>(dataset.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < dataset.size(); ++i) outcomes[i] = runner.run(dataset[i], seed_for(i));
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < dataset.size(); i = next++) {
                    outcomes[i] = runner.run(dataset[i], seed_for(i));
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    BenchmarkReport report;
    report.agent = to_string(config.agent);
    report.provider = agent_gw.provider_name();
    report.user_mode = to_string(config.user);
    report.seed = config.seed;

    std::vector<std::pair<bool, bool>> scored;
    double turns_total = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& r = dataset[i];
        auto& o = outcomes[i];
        for (const auto& id : r.opportunities) {
            auto it = o.predictions.find(id);
            const bool pred = it != o.predictions.end() && it->second;
            report.pairs.push_back({r.id, id, pred, r.gold.at(id)});
            scored.emplace_back(pred, r.gold.at(id));
        }
        turns_total += o.session.turns;
        report.sessions.push_back(std::move(o.session));
    }
    report.scores = micro_f1(scored);
    report.turns_mean = dataset.empty() ? 0 : turns_total / static_cast<double>(dataset.size());
    report.turn_weighted_f1 = turn_weighted_f1(report.scores.f1, report.turns_mean);
    return report;
}

}  // namespace screener::bench
