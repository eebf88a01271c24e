#include "screener/usersim/profile.hpp"

#include "screener/text.hpp"

#include <regex>

namespace screener::usersim {

nlohmann::json to_json(const HouseholdProfile& p) {
    nlohmann::json hh = nlohmann::json::object();
    for (const auto& [k, v] : p.household) hh[k] = features::value_to_json(v);
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : p.members) {
        nlohmann::json row = nlohmann::json::object();
        for (const auto& [k, v] : m) row[k] = features::value_to_json(v);
        members.push_back(std::move(row));
    }
    return {{"household", std::move(hh)}, {"members", std::move(members)}};
}

HouseholdProfile profile_from_json(const nlohmann::json& j) {
    HouseholdProfile p;
    for (const auto& [k, v] : j.at("household").items()) p.household[k] = features::value_from_json(v);
    for (const auto& row : j.at("members")) {
        features::FeatureMap m;
        for (const auto& [k, v] : row.items()) m[k] = features::value_from_json(v);
        p.members.push_back(std::move(m));
    }
    return p;
}

features::FeatureStore to_store(const HouseholdProfile& p, const features::FeatureSchema& schema) {
    features::FeatureStore store(schema);
    auto put = [&](const KeyPath& key, const FeatureValue& v) {
        if (!schema.contains(SlotKey::of(key))) return;
        if (auto err = store.put_value(key, v)) throw Error("profile value rejected: " + err->message());
    };
    // Size first so member writes are in range.
    if (auto it = p.household.find(kHouseholdSizeKey); it != p.household.end()) {
        put(KeyPath::household(kHouseholdSizeKey), it->second);
    }
    for (const auto& [k, v] : p.household) {
        if (k != kHouseholdSizeKey) put(KeyPath::household(k), v);
    }
    for (std::size_t i = 0; i < p.members.size(); ++i) {
        for (const auto& [k, v] : p.members[i]) put(KeyPath::member(static_cast<int>(i), k), v);
    }
    return store;
}

std::string label(const std::string& key) {
    return text::replace_all(key, "_", " ");
}

std::string render_profile(const HouseholdProfile& p) {
    std::string out = "The household has " + std::to_string(p.members.size()) +
                      (p.members.size() == 1 ? " person." : " people.");
    std::vector<std::string> facts;
    for (const auto& [k, v] : p.household) {
        if (k == kHouseholdSizeKey) continue;
        facts.push_back("household " + label(k) + " is " + format_value(v));
    }
    if (!facts.empty()) out += " " + text::join(facts, "; ") + ".";
    for (std::size_t i = 0; i < p.members.size(); ++i) {
        out += "\n\nPerson " + std::to_string(i) + (i == 0 ? " (head of household)" : "") + ": ";
        std::vector<std::string> parts;
        for (const auto& [k, v] : p.members[i]) parts.push_back(label(k) + " is " + format_value(v));
        out += parts.empty() ? "nothing else is known" : text::join(parts, "; ");
        out += ".";
    }
    return out;
}

namespace {

void parse_facts(std::string body, std::map<std::string, std::string>& into, const std::string& prefix) {
    if (!body.empty() && body.back() == '.') body.pop_back();
    std::size_t start = 0;
    while (start <= body.size()) {
        auto sep = body.find("; ", start);
        std::string part = body.substr(start, sep == std::string::npos ? std::string::npos : sep - start);
        auto is = part.find(" is ");
        if (is != std::string::npos) {
            std::string name = part.substr(0, is);
            if (!prefix.empty() && name.rfind(prefix, 0) == 0) name = name.substr(prefix.size());
            into[text::replace_all(name, " ", "_")] = part.substr(is + 4);
        }
        if (sep == std::string::npos) break;
        start = sep + 2;
    }
}

}  // namespace

RenderedFacts parse_rendered(const std::string& rendered) {
    RenderedFacts facts;
    static const std::regex head(R"(^The household has (\d+) (?:person|people)\.(?: (.*))?$)");
    static const std::regex member(R"(^Person (\d+)(?: \(head of household\))?: (.*)$)");
    for (const auto& line : text::split_lines(rendered)) {
        std::smatch m;
        if (std::regex_match(line, m, head)) {
            facts.household[kHouseholdSizeKey] = m[1];
            if (m[2].matched) parse_facts(m[2], facts.household, "household ");
        } else if (std::regex_match(line, m, member)) {
            facts.members.emplace_back();
            if (m[2] != "nothing else is known.") parse_facts(m[2], facts.members.back(), "");
        }
    }
    return facts;
}

}  // namespace screener::usersim
