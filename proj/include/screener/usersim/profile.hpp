#pragma once

#include "screener/features/store.hpp"

#include "json.hpp"

#include <map>
#include <string>
#include <vector>

namespace screener::usersim {

inline constexpr int kMaxMembers = 6;

// Structured truth about one simulated household. `household` always holds
// "size" equal to the member count.
struct HouseholdProfile {
    features::FeatureMap household;
    std::vector<features::FeatureMap> members;

    std::size_t size() const { return members.size(); }
    bool operator==(const HouseholdProfile&) const = default;
};

// Same layout as a feature store: {"household": {...}, "members": [...]}.
nlohmann::json to_json(const HouseholdProfile& p);
HouseholdProfile profile_from_json(const nlohmann::json& j);

// Loads the profile into a store over `schema`. Features the schema does not
// define are skipped. Throws Error when a value violates its slot.
features::FeatureStore to_store(const HouseholdProfile& p, const features::FeatureSchema& schema);

// Readable label of a feature key: underscores become spaces.
std::string label(const std::string& key);

// Deterministic natural-language rendering: one household paragraph and one
// paragraph per member; every feature appears exactly once.
std::string render_profile(const HouseholdProfile& p);

// Inverse of render_profile for the values it prints (used by tests as an
// extraction oracle). Values come back as their printed text.
struct RenderedFacts {
    std::map<std::string, std::string> household;
    std::vector<std::map<std::string, std::string>> members;
};
RenderedFacts parse_rendered(const std::string& text);

}  // namespace screener::usersim
