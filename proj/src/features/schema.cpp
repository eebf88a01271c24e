#include "screener/features/schema.hpp"

#include "screener/text.hpp"

#include <set>

namespace screener::features {

std::string to_string(SlotKind kind) {
    switch (kind) {
        case SlotKind::Integer: return "integer";
        case SlotKind::Real:    return "real";
        case SlotKind::Choice:  return "choice";
    }
    return "unknown";
}

SlotConstraint SlotConstraint::integer(std::optional<double> low, std::optional<double> high) {
    SlotConstraint c{SlotKind::Integer, {}, low, high};
    check_constraint(c);
    return c;
}

SlotConstraint SlotConstraint::real(std::optional<double> low, std::optional<double> high) {
    SlotConstraint c{SlotKind::Real, {}, low, high};
    check_constraint(c);
    return c;
}

SlotConstraint SlotConstraint::choice(std::vector<std::string> choices) {
    SlotConstraint c{SlotKind::Choice, std::move(choices), std::nullopt, std::nullopt};
    check_constraint(c);
    return c;
}

std::string SlotConstraint::describe() const {
    if (kind == SlotKind::Choice) {
        return "one of: " + text::join(choices, ", ");
    }
    std::string out = kind == SlotKind::Integer ? "a whole number" : "a number";
    if (low && high) {
        out += " between " + format_real(*low) + " and " + format_real(*high);
    } else if (low) {
        out += " of at least " + format_real(*low);
    } else if (high) {
        out += " of at most " + format_real(*high);
    }
    return out;
}

void check_constraint(const SlotConstraint& c) {
    if (c.kind == SlotKind::Choice) {
        if (c.choices.empty()) {
            throw InvalidConstraint("choice slot needs at least one choice");
        }
        std::set<std::string> seen;
        for (const auto& choice : c.choices) {
            if (!seen.insert(text::fold(choice)).second) {
                throw InvalidConstraint("duplicate choice '" + choice + "'");
            }
        }
        if (c.low || c.high) {
            throw InvalidConstraint("choice slot cannot carry numeric bounds");
        }
        return;
    }
    if (!c.choices.empty()) {
        throw InvalidConstraint("numeric slot cannot carry choices");
    }
    if (c.low && c.high && *c.low > *c.high) {
        throw InvalidConstraint("lower bound exceeds upper bound");
    }
}

const SlotConstraint* FeatureSchema::find(const SlotKey& slot) const {
    auto it = slots_.find(slot);
    return it == slots_.end() ? nullptr : &it->second;
}

const SlotConstraint& FeatureSchema::at(const SlotKey& slot) const {
    if (const auto* c = find(slot)) {
        return *c;
    }
    throw UndefinedSlot(slot);
}

FeatureSchema define_slot(const FeatureSchema& schema, const SlotKey& slot, const SlotConstraint& constraint) {
    check_constraint(constraint);
    const Scope other = slot.scope == Scope::Household ? Scope::Member : Scope::Household;
    if (schema.contains(slot) || schema.contains(SlotKey{other, slot.key})) {
        throw DuplicateSlot(slot);
    }
    FeatureSchema out = schema;
    out.slots_.emplace(slot, constraint);
    return out;
}

FeatureSchema merge(const FeatureSchema& a, const FeatureSchema& b) {
    FeatureSchema out = a;
    for (const auto& [slot, constraint] : b.slots()) {
        if (const auto* existing = out.find(slot)) {
            if (!(*existing == constraint)) {
                throw SchemaConflict(slot);
            }
            continue;
        }
        const Scope other = slot.scope == Scope::Household ? Scope::Member : Scope::Household;
        if (out.contains(SlotKey{other, slot.key})) {
            throw SchemaConflict(slot);
        }
        out = define_slot(out, slot, constraint);
    }
    return out;
}

SlotConstraint household_size_constraint() {
    return SlotConstraint::integer(1, 20);
}

nlohmann::json to_json(const SlotConstraint& c) {
    nlohmann::json j;
    j["kind"] = to_string(c.kind);
    if (c.kind == SlotKind::Choice) {
        j["choices"] = c.choices;
    }
    if (c.low) j["low"] = *c.low;
    if (c.high) j["high"] = *c.high;
    return j;
}

SlotConstraint constraint_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    std::optional<double> low, high;
    if (j.contains("low")) low = j.at("low").get<double>();
    if (j.contains("high")) high = j.at("high").get<double>();
    if (kind == "integer") return SlotConstraint::integer(low, high);
    if (kind == "real") return SlotConstraint::real(low, high);
    if (kind == "choice") return SlotConstraint::choice(j.at("choices").get<std::vector<std::string>>());
    throw InvalidConstraint("unknown slot kind '" + kind + "'");
}

nlohmann::json to_json(const FeatureSchema& schema) {
    nlohmann::json slots = nlohmann::json::array();
    for (const auto& [slot, constraint] : schema.slots()) {
        nlohmann::json entry = to_json(constraint);
        entry["scope"] = slot.scope == Scope::Household ? "household" : "member";
        entry["key"] = slot.key;
        slots.push_back(std::move(entry));
    }
    return nlohmann::json{{"slots", std::move(slots)}};
}

FeatureSchema schema_from_json(const nlohmann::json& j) {
    FeatureSchema schema;
    for (const auto& entry : j.at("slots")) {
        const std::string scope = entry.at("scope").get<std::string>();
        if (scope != "household" && scope != "member") {
            throw InvalidConstraint("unknown scope '" + scope + "'");
        }
        SlotKey slot{scope == "household" ? Scope::Household : Scope::Member, entry.at("key").get<std::string>()};
        schema = define_slot(schema, slot, constraint_from_json(entry));
    }
    return schema;
}

}  // namespace screener::features
