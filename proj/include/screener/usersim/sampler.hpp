#pragma once

#include "screener/corpus.hpp"
#include "screener/rules/ast.hpp"
#include "screener/usersim/profile.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace screener::usersim {

// A household-level sanity rule written in the rule language: the program
// returns true when the household is consistent.
struct ConsistencyRule {
    std::string message;
    rules::RuleProgram program;
};

// [{"message": "...", "rule": "<rule source>"}, ...]
std::vector<ConsistencyRule> consistency_from_json(const nlohmann::json& j);

// Messages of the rules `p` breaks. Rules reading a slot `schema` lacks do
// not apply and are skipped.
std::vector<std::string> violations(const HouseholdProfile& p, const features::FeatureSchema& schema,
                                    const std::vector<ConsistencyRule>& rules);

class ConstraintUnsatisfiable : public Error {
public:
    using Error::Error;
};

class MissingDistribution : public Error {
public:
    explicit MissingDistribution(const SlotKey& slot)
        : Error("no distribution for " + to_string(slot)), slot(slot) {}
    SlotKey slot;
};

// Numeric literals each slot is compared against, across all checkers.
using ThresholdMap = std::map<SlotKey, std::vector<double>>;
ThresholdMap collect_thresholds(const std::vector<Checker>& checkers);

// Union of the checkers' schemas (throws SchemaConflict).
features::FeatureSchema schema_union(const std::vector<Checker>& checkers);

struct SamplerLimits {
    int max_rejections = 2000;  // per profile
};

// Fuzzing sampler: 1..6 members, choices uniform, numerics drawn from a
// uniformly chosen threshold bucket (below, at, between, above each
// threshold) so every branch outcome is reachable. Rejection-samples against
// the consistency rules.
std::vector<HouseholdProfile> sample_diverse(const features::FeatureSchema& schema, const ThresholdMap& thresholds,
                                             const std::vector<ConsistencyRule>& rules, std::uint64_t seed,
                                             std::size_t n, SamplerLimits limits = {});

struct Segment {
    double weight = 0;
    double low = 0;
    double high = 0;
};

// One feature's distribution: categorical over printed values, uniform over a
// range, or a weighted mixture of uniform segments.
struct Distribution {
    enum class Kind { Categorical, Uniform, Mixture } kind = Kind::Categorical;
    std::vector<std::pair<std::string, double>> probabilities;
    double low = 0;
    double high = 0;
    std::vector<Segment> segments;
};

using FeatureDistribution = std::map<SlotKey, Distribution>;

// {"household.size": {"type": "categorical", "p": {"1": 0.3, "2": 0.7}},
//  "member.age": {"type": "uniform", "low": 0, "high": 90},
//  "household.income": {"type": "mixture", "segments": [{"weight": 0.6, "low": 0, "high": 40000}, ...]}}
// Throws Error when categorical probabilities do not sum to 1 (1e-9) or a
// mixture has no positive weight.
FeatureDistribution distributions_from_json(const nlohmann::json& j);

// Independent per-feature draws. Needs a distribution for household.size and
// for every slot of the schema (throws MissingDistribution).
std::vector<HouseholdProfile> sample_representative(const features::FeatureSchema& schema,
                                                    const FeatureDistribution& dist,
                                                    const std::vector<ConsistencyRule>& rules, std::uint64_t seed,
                                                    std::size_t n, SamplerLimits limits = {});

}  // namespace screener::usersim
