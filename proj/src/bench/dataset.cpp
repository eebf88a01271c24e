#include "screener/bench/dataset.hpp"

#include "screener/text.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

namespace screener::bench {

std::string household_id(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "hh-%04zu", index);
    return buf;
}

nlohmann::json to_json(const DatasetRecord& r) {
    nlohmann::json gold = nlohmann::json::object();
    for (const auto& [id, g] : r.gold) gold[id] = g;
    return {{"id", r.id}, {"household", usersim::to_json(r.household)}, {"opportunities", r.opportunities},
            {"gold", gold}};
}

DatasetRecord record_from_json(const nlohmann::json& j, std::size_t index) {
    DatasetRecord r;
    r.id = j.contains("id") ? j.at("id").get<std::string>() : household_id(index);
    const bool wrapped = j.contains("household") && j.at("household").is_object() &&
                         (j.at("household").contains("members") || j.at("household").contains("household"));
    r.household = usersim::profile_from_json(wrapped ? j.at("household") : j);
    if (j.contains("opportunities")) r.opportunities = j.at("opportunities").get<std::vector<std::string>>();
    if (j.contains("gold")) {
        for (const auto& [id, g] : j.at("gold").items()) r.gold[id] = g.get<bool>();
    }
    return r;
}

std::vector<DatasetRecord> read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read dataset " + path.string());
    std::vector<DatasetRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(record_from_json(nlohmann::json::parse(line), out.size()));
        } catch (const nlohmann::json::exception& e) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_dataset(const std::filesystem::path& path, const std::vector<DatasetRecord>& records) {
    std::string text;
    for (const auto& r : records) text += to_json(r).dump() + "\n";
    write_file(path, text);
}

rules::Decision evaluate_household(const usersim::HouseholdProfile& p, const Checker& checker,
                                   const std::string& household_name) {
    const auto store = usersim::to_store(p, checker.schema);
    auto outcome = rules::evaluate(checker.program, store);
    if (auto* miss = std::get_if<rules::Missing>(&outcome)) throw IncompleteProfile(household_name, miss->key);
    return std::move(std::get<rules::Decision>(outcome));
}

namespace {

std::map<std::string, const Checker*> index_corpus(const std::vector<Checker>& corpus) {
    std::map<std::string, const Checker*> out;
    for (const auto& c : corpus) out[c.id()] = &c;
    return out;
}

}  // namespace

void label_gold(std::vector<DatasetRecord>& records, const std::vector<Checker>& corpus) {
    const auto by_id = index_corpus(corpus);
    for (auto& r : records) {
        if (r.opportunities.empty()) {
            for (const auto& c : corpus) r.opportunities.push_back(c.id());
        }
        r.gold.clear();
        for (const auto& id : r.opportunities) {
            auto it = by_id.find(id);
            if (it == by_id.end()) throw CorpusError("unknown opportunity '" + id + "' in " + r.id);
            r.gold[id] = evaluate_household(r.household, *it->second, r.id).eligible;
        }
    }
}

void CoveragePool::add(PoolEntry entry) {
    if (!seen_.insert({entry.household, entry.opportunity_id}).second) {
        throw Error("pool already holds household " + std::to_string(entry.household) + " / " +
                    entry.opportunity_id);
    }
    entries_.push_back(std::move(entry));
}

std::size_t CoveragePool::household_count() const {
    std::set<std::size_t> hs;
    for (const auto& e : entries_) hs.insert(e.household);
    return hs.size();
}

CoveragePool build_pool(const std::vector<DatasetRecord>& households, const std::vector<Checker>& corpus) {
    CoveragePool pool;
    for (std::size_t h = 0; h < households.size(); ++h) {
        for (const auto& c : corpus) {
            auto d = evaluate_household(households[h].household, c, households[h].id);
            pool.add(PoolEntry{h, c.id(), std::move(d.trace), d.eligible});
        }
    }
    return pool;
}

Coverage units_of(const PoolEntry& e) {
    Coverage out;
    for (auto node : e.trace.executed) out.insert({e.opportunity_id, node});
    return out;
}

Coverage covered(const CoveragePool& pool, const std::vector<std::size_t>& entry_indices) {
    Coverage out;
    for (auto i : entry_indices) {
        for (auto node : pool.entries()[i].trace.executed) out.insert({pool.entries()[i].opportunity_id, node});
    }
    return out;
}

Coverage covered(const CoveragePool& pool) {
    std::vector<std::size_t> all(pool.entries().size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return covered(pool, all);
}

namespace {

bool pair_order(const CoveragePool& pool, std::size_t a, std::size_t b) {
    const auto& x = pool.entries()[a];
    const auto& y = pool.entries()[b];
    return std::tie(x.household, x.opportunity_id) < std::tie(y.household, y.opportunity_id);
}

std::map<CoverageUnit, int> unit_counts(const CoveragePool& pool, const std::vector<std::size_t>& selection) {
    std::map<CoverageUnit, int> counts;
    for (auto i : selection) {
        for (const auto& u : units_of(pool.entries()[i])) ++counts[u];
    }
    return counts;
}

bool redundant(const Coverage& units, const std::map<CoverageUnit, int>& counts) {
    return std::all_of(units.begin(), units.end(), [&](const CoverageUnit& u) { return counts.at(u) >= 2; });
}

}  // namespace

std::vector<std::size_t> removable_entries(const CoveragePool& pool, const std::vector<std::size_t>& selection) {
    const auto counts = unit_counts(pool, selection);
    std::vector<std::size_t> out;
    for (auto i : selection) {
        if (redundant(units_of(pool.entries()[i]), counts)) out.push_back(i);
    }
    return out;
}

Selection minimize_dataset(const CoveragePool& pool) {
    if (pool.empty()) throw Error("cannot minimize an empty pool");

    std::map<std::size_t, Coverage> by_household;
    std::map<std::size_t, std::vector<std::size_t>> entries_of;
    for (std::size_t i = 0; i < pool.entries().size(); ++i) {
        const auto& e = pool.entries()[i];
        auto units = units_of(e);
        by_household[e.household].insert(units.begin(), units.end());
        entries_of[e.household].push_back(i);
    }

    Selection sel;
    Coverage have;
    std::set<std::size_t> taken;
    while (true) {
        std::size_t best = 0;
        std::size_t best_gain = 0;
        for (const auto& [h, units] : by_household) {  // ascending index: first max wins ties
            if (taken.count(h)) continue;
            std::size_t gain = 0;
            for (const auto& u : units) gain += have.count(u) ? 0 : 1;
            if (gain > best_gain) {
                best = h;
                best_gain = gain;
            }
        }
        if (best_gain == 0) break;
        taken.insert(best);
        sel.households.push_back(best);
        have.insert(by_household[best].begin(), by_household[best].end());
    }

    std::vector<std::size_t> kept;
    for (auto h : taken) kept.insert(kept.end(), entries_of[h].begin(), entries_of[h].end());
    std::sort(kept.begin(), kept.end(), [&](auto a, auto b) { return pair_order(pool, a, b); });

    auto counts = unit_counts(pool, kept);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t k = 0; k < kept.size();) {
            const auto units = units_of(pool.entries()[kept[k]]);
            if (redundant(units, counts)) {
                for (const auto& u : units) --counts[u];
                kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(k));
                changed = true;
            } else {
                ++k;
            }
        }
    }
    sel.entries = std::move(kept);
    return sel;
}

std::vector<DatasetRecord> selected_records(const CoveragePool& pool, const Selection& selection,
                                            const std::vector<DatasetRecord>& households) {
    std::map<std::size_t, DatasetRecord> by_household;
    for (auto i : selection.entries) {
        const auto& e = pool.entries()[i];
        auto [it, fresh] = by_household.try_emplace(e.household);
        if (fresh) {
            it->second.id = households.at(e.household).id;
            it->second.household = households.at(e.household).household;
        }
        it->second.opportunities.push_back(e.opportunity_id);
        it->second.gold[e.opportunity_id] = e.decision;
    }
    std::vector<DatasetRecord> out;
    for (auto& [h, r] : by_household) out.push_back(std::move(r));
    return out;
}

}  // namespace screener::bench
