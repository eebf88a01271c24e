#pragma once

#include "screener/corpus.hpp"
#include "screener/features/store.hpp"
#include "screener/llm/gateway.hpp"
#include "screener/llm/mock.hpp"
#include "screener/rules/parser.hpp"
#include "screener/usersim/profile.hpp"

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

namespace support {

using namespace screener;

inline std::filesystem::path data_dir() {
    return SCREENER_DATA_DIR;
}

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(SCREENER_TEST_DIR) / "fixtures" / name;
}

// Fresh, empty directory per call.
inline std::filesystem::path temp_dir(const std::string& name) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("screener-" + name + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline const std::vector<Checker>& corpus() {
    static const std::vector<Checker> c = load_corpus(data_dir() / "rules");
    return c;
}

inline const Checker& checker(const std::string& id) {
    for (const auto& c : corpus()) {
        if (c.id() == id) return c;
    }
    throw Error("no corpus checker " + id);
}

// Schema from "household.size" / "member.age" style names.
inline features::FeatureSchema schema_of(std::vector<std::pair<std::string, features::SlotConstraint>> slots) {
    features::FeatureSchema s;
    for (auto& [name, c] : slots) s = features::define_slot(s, parse_slot_key(name), c);
    return s;
}

inline features::SlotConstraint yes_no() {
    return features::SlotConstraint::choice({"yes", "no"});
}

// Mock provider plus a gateway that never sleeps.
struct MockRig {
    std::shared_ptr<llm::MockProvider> provider;
    std::unique_ptr<llm::Gateway> gateway;

    explicit MockRig(llm::MockScript script = {}, std::optional<std::filesystem::path> audit = std::nullopt) {
        provider = std::make_shared<llm::MockProvider>(std::move(script));
        llm::GatewayOptions o;
        o.sleep = [](std::chrono::milliseconds) {};
        o.audit_path = std::move(audit);
        gateway = std::make_unique<llm::Gateway>(provider, o);
    }

    void script(std::string purpose, std::vector<std::string> replies, std::string contains = {}) {
        llm::MockRule r;
        r.purpose = std::move(purpose);
        r.contains = std::move(contains);
        for (auto& t : replies) r.responses.push_back(llm::MockResponse::reply(std::move(t)));
        provider->add_rule(std::move(r));
    }

    void fail(std::string purpose, llm::MockResponse::Kind kind, std::string contains = {}) {
        llm::MockRule r;
        r.purpose = std::move(purpose);
        r.contains = std::move(contains);
        r.responses.push_back(llm::MockResponse::fail(kind));
        provider->add_rule(std::move(r));
    }

    llm::Gateway& gw() { return *gateway; }
};

inline Checker make_checker(const std::string& id, const std::string& source, features::FeatureSchema schema,
                            std::string body = "Requirements text.") {
    Checker c{rules::parse_program(source, id), std::move(schema), RequirementDoc{id, id, std::move(body)}};
    check_schema_covers(c.program, c.schema);
    return c;
}

inline usersim::HouseholdProfile household(features::FeatureMap hh, std::vector<features::FeatureMap> members) {
    usersim::HouseholdProfile p;
    p.household = std::move(hh);
    p.household[kHouseholdSizeKey] = static_cast<std::int64_t>(members.size());
    p.members = std::move(members);
    return p;
}

}  // namespace support
