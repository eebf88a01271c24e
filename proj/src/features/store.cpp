#include "screener/features/store.hpp"

#include "screener/text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace screener::features {

std::string ValidationError::message() const {
    return "invalid value '" + raw + "' for " + to_string(key) + ": " + reason + " (expected " +
           constraint.describe() + ")";
}

namespace {

std::optional<std::int64_t> parse_integer(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<double> parse_decimal(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    // from_chars also takes "inf"/"nan" and exponents; canonical form is a plain numeral.
    for (char c : s) {
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-')) return std::nullopt;
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<std::string> bounds_violation(const SlotConstraint& c, double v) {
    if (c.low && v < *c.low) return "below minimum " + format_real(*c.low);
    if (c.high && v > *c.high) return "above maximum " + format_real(*c.high);
    return std::nullopt;
}

}  // namespace

std::variant<FeatureValue, ValidationError> parse_raw(const KeyPath& key, const SlotConstraint& c,
                                                      std::string_view raw) {
    const std::string cleaned = text::trim(raw);
    auto fail = [&](std::string reason) -> std::variant<FeatureValue, ValidationError> {
        return ValidationError{key, std::string(raw), c, std::move(reason)};
    };
    switch (c.kind) {
        case SlotKind::Integer: {
            auto v = parse_integer(cleaned);
            if (!v) return fail("not an integer");
            if (auto why = bounds_violation(c, static_cast<double>(*v))) return fail(*why);
            return FeatureValue{*v};
        }
        case SlotKind::Real: {
            auto v = parse_decimal(cleaned);
            if (!v) return fail("not a number");
            if (auto why = bounds_violation(c, *v)) return fail(*why);
            return FeatureValue{*v};
        }
        case SlotKind::Choice: {
            const std::string folded = text::fold(cleaned);
            for (const auto& choice : c.choices) {
                if (text::fold(choice) == folded) return FeatureValue{choice};
            }
            return fail("not one of the allowed choices");
        }
    }
    return fail("unknown slot kind");
}

FeatureStore::FeatureStore() : schema_(std::make_shared<FeatureSchema>()) {}

FeatureStore::FeatureStore(FeatureSchema schema)
    : schema_(std::make_shared<const FeatureSchema>(std::move(schema))) {}

std::optional<std::int64_t> FeatureStore::household_size() const {
    auto it = household_.find(kHouseholdSizeKey);
    if (it == household_.end()) return std::nullopt;
    if (const auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
    return std::nullopt;
}

std::optional<FeatureValue> FeatureStore::get(const KeyPath& key) const {
    schema_->at(SlotKey::of(key));
    if (key.scope == Scope::Household) {
        auto it = household_.find(key.key);
        if (it == household_.end()) return std::nullopt;
        return it->second;
    }
    if (key.member_index < 0) return std::nullopt;
    const auto index = static_cast<std::size_t>(key.member_index);
    if (auto size = household_size(); size && key.member_index >= *size) return std::nullopt;
    if (index >= members_.size()) return std::nullopt;
    auto it = members_[index].find(key.key);
    if (it == members_[index].end()) return std::nullopt;
    return it->second;
}

std::optional<ValidationError> FeatureStore::check_member_index(const KeyPath& key, std::string_view raw,
                                                                const SlotConstraint& constraint) const {
    if (key.scope != Scope::Member) return std::nullopt;
    if (key.member_index < 0) {
        return ValidationError{key, std::string(raw), constraint, "negative member index"};
    }
    if (auto size = household_size(); size && key.member_index >= *size) {
        return ValidationError{key, std::string(raw), constraint,
                               "household has only " + std::to_string(*size) + " members"};
    }
    return std::nullopt;
}

std::optional<ValidationError> FeatureStore::store(const KeyPath& key, FeatureValue value, std::string_view raw,
                                                   const SlotConstraint& constraint) {
    if (key.scope == Scope::Household) {
        if (household_.count(key.key)) throw OverwriteFault(key);
        if (key.key == kHouseholdSizeKey) {
            const auto* n = std::get_if<std::int64_t>(&value);
            if (!n || *n < 0) {
                return ValidationError{key, std::string(raw), constraint, "household size must be a count"};
            }
            // Members already described must fit inside the declared size.
            for (std::size_t i = static_cast<std::size_t>(*n); i < members_.size(); ++i) {
                if (!members_[i].empty()) {
                    return ValidationError{key, std::string(raw), constraint,
                                           "facts already recorded for member " + std::to_string(i)};
                }
            }
        }
        household_.emplace(key.key, std::move(value));
        return std::nullopt;
    }
    const auto index = static_cast<std::size_t>(key.member_index);
    if (index < members_.size() && members_[index].count(key.key)) throw OverwriteFault(key);
    if (members_.size() <= index) members_.resize(index + 1);
    members_[index].emplace(key.key, std::move(value));
    return std::nullopt;
}

void FeatureStore::check_unset(const KeyPath& key) const {
    if (key.scope == Scope::Household) {
        if (household_.count(key.key)) throw OverwriteFault(key);
        return;
    }
    const auto index = static_cast<std::size_t>(key.member_index);
    if (key.member_index >= 0 && index < members_.size() && members_[index].count(key.key)) {
        throw OverwriteFault(key);
    }
}

std::optional<ValidationError> FeatureStore::put(const KeyPath& key, std::string_view raw) {
    const SlotConstraint& constraint = schema_->at(SlotKey::of(key));
    check_unset(key);
    if (auto bad = check_member_index(key, raw, constraint)) return bad;
    auto parsed = parse_raw(key, constraint, raw);
    if (auto* err = std::get_if<ValidationError>(&parsed)) return *err;
    return store(key, std::get<FeatureValue>(std::move(parsed)), raw, constraint);
}

std::optional<ValidationError> FeatureStore::put_value(const KeyPath& key, const FeatureValue& value) {
    const SlotConstraint& constraint = schema_->at(SlotKey::of(key));
    check_unset(key);
    const std::string raw = format_value(value);
    if (auto bad = check_member_index(key, raw, constraint)) return bad;
    auto mismatch = [&](std::string reason) {
        return ValidationError{key, raw, constraint, std::move(reason)};
    };
    FeatureValue normalized = value;
    switch (constraint.kind) {
        case SlotKind::Integer:
            if (const auto* d = std::get_if<double>(&value)) {
                if (*d != std::floor(*d)) return mismatch("not an integer");
                normalized = static_cast<std::int64_t>(*d);
            } else if (!std::holds_alternative<std::int64_t>(value)) {
                return mismatch("not an integer");
            }
            if (auto why = bounds_violation(constraint, static_cast<double>(std::get<std::int64_t>(normalized)))) {
                return mismatch(*why);
            }
            break;
        case SlotKind::Real:
            if (const auto* i = std::get_if<std::int64_t>(&value)) {
                normalized = static_cast<double>(*i);
            } else if (!std::holds_alternative<double>(value)) {
                return mismatch("not a number");
            }
            if (auto why = bounds_violation(constraint, std::get<double>(normalized))) return mismatch(*why);
            break;
        case SlotKind::Choice: {
            const auto* s = std::get_if<std::string>(&value);
            if (!s) return mismatch("not one of the allowed choices");
            auto parsed = parse_raw(key, constraint, *s);
            if (auto* err = std::get_if<ValidationError>(&parsed)) return *err;
            normalized = std::get<FeatureValue>(parsed);
            break;
        }
    }
    return store(key, std::move(normalized), raw, constraint);
}

std::size_t FeatureStore::value_count() const {
    std::size_t n = household_.size();
    for (const auto& m : members_) n += m.size();
    return n;
}

bool FeatureStore::operator==(const FeatureStore& other) const {
    return *schema_ == *other.schema_ && household_ == other.household_ && members_ == other.members_;
}

std::variant<FeatureStore, ValidationError> put(const FeatureStore& store, const KeyPath& key, std::string_view raw) {
    FeatureStore copy = store;
    if (auto err = copy.put(key, raw)) return *err;
    return copy;
}

nlohmann::json value_to_json(const FeatureValue& value) {
    return std::visit([](const auto& v) { return nlohmann::json(v); }, value);
}

FeatureValue value_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return FeatureValue{j.get<std::int64_t>()};
    if (j.is_number()) return FeatureValue{j.get<double>()};
    if (j.is_string()) return FeatureValue{j.get<std::string>()};
    throw Error("feature values must be numbers or strings, got " + j.dump());
}

nlohmann::json to_json(const FeatureStore& store) {
    nlohmann::json household = nlohmann::json::object();
    for (const auto& [k, v] : store.household()) household[k] = value_to_json(v);
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : store.members()) {
        nlohmann::json member = nlohmann::json::object();
        for (const auto& [k, v] : m) member[k] = value_to_json(v);
        members.push_back(std::move(member));
    }
    return nlohmann::json{{"household", std::move(household)}, {"members", std::move(members)}};
}

FeatureStore store_from_json(const nlohmann::json& j, const FeatureSchema& schema) {
    FeatureStore store(schema);
    auto apply = [&](const KeyPath& key, const nlohmann::json& raw) {
        if (auto err = store.put_value(key, value_from_json(raw))) throw Error(err->message());
    };
    // Size first so member writes are checked against it.
    const auto& household = j.at("household");
    if (household.contains(kHouseholdSizeKey)) {
        apply(KeyPath::household(kHouseholdSizeKey), household.at(kHouseholdSizeKey));
    }
    for (const auto& [k, v] : household.items()) {
        if (k != kHouseholdSizeKey) apply(KeyPath::household(k), v);
    }
    if (j.contains("members")) {
        int index = 0;
        for (const auto& member : j.at("members")) {
            for (const auto& [k, v] : member.items()) apply(KeyPath::member(index, k), v);
            ++index;
        }
    }
    return store;
}

}  // namespace screener::features
