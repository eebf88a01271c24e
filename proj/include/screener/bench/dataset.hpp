#pragma once

#include "screener/corpus.hpp"
#include "screener/rules/evaluator.hpp"
#include "screener/usersim/profile.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace screener::bench {

// One benchmark user: a household, the opportunities it is screened for and
// the gold decision for each.
struct DatasetRecord {
    std::string id;
    usersim::HouseholdProfile household;
    std::vector<std::string> opportunities;
    std::map<std::string, bool> gold;

    bool operator==(const DatasetRecord&) const = default;
};

// {"id": "...", "household": {"household": {...}, "members": [...]},
//  "opportunities": [...], "gold": {...}}. A line holding only a profile
// ({"household": {...}, "members": [...]}) is read as a record with no
// opportunities; missing ids become "hh-<line index>".
nlohmann::json to_json(const DatasetRecord& r);
DatasetRecord record_from_json(const nlohmann::json& j, std::size_t index);
std::vector<DatasetRecord> read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const std::vector<DatasetRecord>& records);
std::string household_id(std::size_t index);

class IncompleteProfile : public Error {
public:
    IncompleteProfile(std::string household, KeyPath key)
        : Error("household " + household + " lacks " + to_string(key)), household(std::move(household)),
          key(std::move(key)) {}
    std::string household;
    KeyPath key;
};

// Full evaluation of one checker on one household. Throws IncompleteProfile.
rules::Decision evaluate_household(const usersim::HouseholdProfile& p, const Checker& checker,
                                   const std::string& household_name);

// Fills gold for every listed opportunity (all corpus ids when the list is
// empty). Throws IncompleteProfile, or CorpusError for an unknown id.
void label_gold(std::vector<DatasetRecord>& records, const std::vector<Checker>& corpus);

// Coverage is counted in (opportunity id, node id) units: node ids restart at
// 0 in every checker.
using CoverageUnit = std::pair<std::string, rules::NodeId>;
using Coverage = std::set<CoverageUnit>;

struct PoolEntry {
    std::size_t household = 0;
    std::string opportunity_id;
    rules::Trace trace;
    bool decision = false;
};

// Evaluated (household, opportunity) pairs; each pair at most once.
class CoveragePool {
public:
    void add(PoolEntry entry);  // throws Error on a duplicate pair
    const std::vector<PoolEntry>& entries() const { return entries_; }
    std::size_t household_count() const;
    bool empty() const { return entries_.empty(); }

private:
    std::vector<PoolEntry> entries_;
    std::set<std::pair<std::size_t, std::string>> seen_;
};

CoveragePool build_pool(const std::vector<DatasetRecord>& households, const std::vector<Checker>& corpus);

Coverage units_of(const PoolEntry& e);
Coverage covered(const CoveragePool& pool, const std::vector<std::size_t>& entry_indices);
Coverage covered(const CoveragePool& pool);

struct Selection {
    std::vector<std::size_t> households;  // phase 1, in pick order
    std::vector<std::size_t> entries;     // surviving pool entries, (household, opportunity) order
};

// Phase 1: repeatedly take the household adding the most uncovered units
// (lowest index on ties) until none adds any. Phase 2: drop pairs whose
// units the rest of the selection still covers, scanning in (household,
// opportunity) order until a full pass removes nothing. Throws on an empty
// pool.
Selection minimize_dataset(const CoveragePool& pool);

// Entries in `selection` none of whose units are unique to it.
std::vector<std::size_t> removable_entries(const CoveragePool& pool, const std::vector<std::size_t>& selection);

// Records for the surviving pairs, gold taken from the pool decisions.
std::vector<DatasetRecord> selected_records(const CoveragePool& pool, const Selection& selection,
                                            const std::vector<DatasetRecord>& households);

}  // namespace screener::bench
