#include "screener/usersim/sampler.hpp"

#include "screener/rules/evaluator.hpp"
#include "screener/rules/parser.hpp"

#include <algorithm>
#include <cmath>

namespace screener::usersim {

namespace {

using Rng = std::mt19937_64;

// Portable draws; std distributions differ between standard libraries.
double unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(rng() % span);
}

double cents(double v) {
    return std::round(v * 100.0) / 100.0;
}

struct Range {
    double lo;
    double hi;
};

Range numeric_range(const features::SlotConstraint& c, const std::vector<double>& ts) {
    double lo = 0;
    double hi = 100;
    if (!ts.empty()) {
        lo = std::min(0.0, ts.front() - std::fabs(ts.front()));
        hi = std::max(100.0, 2 * ts.back());
    }
    if (c.low) lo = *c.low;
    if (c.high) hi = *c.high;
    return {lo, hi};
}

// Buckets: [lo, t1), {t1}, (t1, t2), ..., {tk}, (tk, hi].
FeatureValue sample_numeric(Rng& rng, const features::SlotConstraint& c, std::vector<double> ts) {
    const bool integral = c.kind == features::SlotKind::Integer;
    const Range r = numeric_range(c, ts);
    ts.erase(std::remove_if(ts.begin(), ts.end(), [&](double t) { return t < r.lo || t > r.hi; }), ts.end());

    struct Bucket {
        double a, b;
        bool point;
    };
    std::vector<Bucket> buckets;
    double prev = r.lo;
    bool prev_inclusive = true;
    auto add_open = [&](double a, bool a_incl, double b, bool b_incl) {
        if (integral) {
            const double first = a_incl ? std::ceil(a) : std::floor(a) + 1;
            const double last = b_incl ? std::floor(b) : std::ceil(b) - 1;
            if (first <= last) buckets.push_back({first, last, false});
        } else if (a < b) {
            buckets.push_back({a, b, false});
        }
    };
    for (double t : ts) {
        add_open(prev, prev_inclusive, t, false);
        if (!integral || t == std::floor(t)) buckets.push_back({t, t, true});
        prev = t;
        prev_inclusive = false;
    }
    add_open(prev, prev_inclusive, r.hi, true);
    if (buckets.empty()) buckets.push_back({r.lo, r.lo, true});

    const Bucket& b = buckets[static_cast<std::size_t>(rng() % buckets.size())];
    if (integral) {
        return b.point ? static_cast<std::int64_t>(b.a)
                       : uniform_int(rng, static_cast<std::int64_t>(b.a), static_cast<std::int64_t>(b.b));
    }
    if (b.point) return b.a;
    double v = cents(b.a + unit(rng) * (b.b - b.a));
    // Rounding may land on a bucket edge; keep the draw inside it.
    if (v <= b.a && b.a != r.lo) v = b.a + (b.b - b.a) / 2;
    if (v >= b.b && b.b != r.hi) v = b.a + (b.b - b.a) / 2;
    return v;
}

FeatureValue sample_choice(Rng& rng, const features::SlotConstraint& c) {
    return c.choices[static_cast<std::size_t>(rng() % c.choices.size())];
}

HouseholdProfile with_size(int members) {
    HouseholdProfile p;
    p.members.resize(static_cast<std::size_t>(members));
    p.household[kHouseholdSizeKey] = std::int64_t{members};
    return p;
}

bool is_size(const SlotKey& s) {
    return s.scope == Scope::Household && s.key == kHouseholdSizeKey;
}

template <typename Draw>
std::vector<HouseholdProfile> rejection_sample(const features::FeatureSchema& schema,
                                               const std::vector<ConsistencyRule>& rules, std::size_t n,
                                               SamplerLimits limits, Draw&& draw) {
    std::vector<HouseholdProfile> out;
    out.reserve(n);
    while (out.size() < n) {
        int tries = 0;
        while (true) {
            HouseholdProfile p = draw();
            if (violations(p, schema, rules).empty()) {
                out.push_back(std::move(p));
                break;
            }
            if (++tries >= limits.max_rejections) {
                throw ConstraintUnsatisfiable("no consistent household after " + std::to_string(tries) +
                                              " draws; check the consistency rules");
            }
        }
    }
    return out;
}

FeatureValue parse_for_slot(const SlotKey& slot, const features::SlotConstraint& c, const std::string& raw) {
    auto parsed = features::parse_raw(KeyPath{slot.scope, slot.scope == Scope::Member ? 0 : -1, slot.key}, c, raw);
    if (auto* err = std::get_if<features::ValidationError>(&parsed)) throw Error(err->message());
    return std::get<FeatureValue>(parsed);
}

FeatureValue draw_from(Rng& rng, const SlotKey& slot, const features::SlotConstraint& c, const Distribution& d) {
    switch (d.kind) {
        case Distribution::Kind::Categorical: {
            const double u = unit(rng);
            double acc = 0;
            for (const auto& [value, p] : d.probabilities) {
                acc += p;
                if (u < acc) return parse_for_slot(slot, c, value);
            }
            return parse_for_slot(slot, c, d.probabilities.back().first);
        }
        case Distribution::Kind::Uniform:
        case Distribution::Kind::Mixture: {
            double lo = d.low;
            double hi = d.high;
            if (d.kind == Distribution::Kind::Mixture) {
                double total = 0;
                for (const auto& s : d.segments) total += s.weight;
                double u = unit(rng) * total;
                const Segment* pick = &d.segments.back();
                for (const auto& s : d.segments) {
                    if (u < s.weight) {
                        pick = &s;
                        break;
                    }
                    u -= s.weight;
                }
                lo = pick->low;
                hi = pick->high;
            }
            if (c.kind == features::SlotKind::Integer) {
                return uniform_int(rng, static_cast<std::int64_t>(std::ceil(lo)), static_cast<std::int64_t>(std::floor(hi)));
            }
            if (c.kind == features::SlotKind::Real) return cents(lo + unit(rng) * (hi - lo));
            throw Error(to_string(slot) + ": numeric distribution for a choice slot");
        }
    }
    throw Error("unknown distribution kind");
}

}  // namespace

std::vector<ConsistencyRule> consistency_from_json(const nlohmann::json& j) {
    std::vector<ConsistencyRule> out;
    int index = 0;
    for (const auto& entry : j) {
        ConsistencyRule r;
        r.message = entry.at("message").get<std::string>();
        r.program = rules::parse_program(entry.at("rule").get<std::string>(), "consistency-" + std::to_string(index++));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::string> violations(const HouseholdProfile& p, const features::FeatureSchema& schema,
                                    const std::vector<ConsistencyRule>& rules) {
    std::vector<std::string> out;
    std::optional<features::FeatureStore> store;
    for (const auto& r : rules) {
        bool applies = true;
        for (const auto& slot : rules::slots_read(r.program)) {
            if (!schema.contains(slot)) applies = false;
        }
        if (!applies) continue;
        if (!store) store = to_store(p, schema);
        auto outcome = rules::evaluate(r.program, *store);
        const auto* d = std::get_if<rules::Decision>(&outcome);
        if (!d) throw Error("consistency rule '" + r.message + "' needs " + to_string(std::get<rules::Missing>(outcome).key));
        if (!d->eligible) out.push_back(r.message);
    }
    return out;
}

ThresholdMap collect_thresholds(const std::vector<Checker>& checkers) {
    ThresholdMap out;
    for (const auto& c : checkers) {
        for (const auto& slot : rules::slots_read(c.program)) {
            auto ts = rules::compared_thresholds(c.program, slot);
            auto& all = out[slot];
            all.insert(all.end(), ts.begin(), ts.end());
        }
    }
    for (auto& [slot, ts] : out) {
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    }
    return out;
}

features::FeatureSchema schema_union(const std::vector<Checker>& checkers) {
    features::FeatureSchema out;
    for (const auto& c : checkers) out = features::merge(out, c.schema);
    return out;
}

std::vector<HouseholdProfile> sample_diverse(const features::FeatureSchema& schema, const ThresholdMap& thresholds,
                                             const std::vector<ConsistencyRule>& rules, std::uint64_t seed,
                                             std::size_t n, SamplerLimits limits) {
    if (n < 1) throw Error("sample size must be at least 1");
    Rng rng(seed);
    auto draw = [&] {
        HouseholdProfile p = with_size(static_cast<int>(uniform_int(rng, 1, kMaxMembers)));
        auto value = [&](const SlotKey& slot, const features::SlotConstraint& c) -> FeatureValue {
            if (c.kind == features::SlotKind::Choice) return sample_choice(rng, c);
            auto it = thresholds.find(slot);
            return sample_numeric(rng, c, it == thresholds.end() ? std::vector<double>{} : it->second);
        };
        for (const auto& [slot, c] : schema.slots()) {
            if (is_size(slot)) continue;
            if (slot.scope == Scope::Household) {
                p.household[slot.key] = value(slot, c);
            } else {
                for (auto& m : p.members) m[slot.key] = value(slot, c);
            }
        }
        return p;
    };
    return rejection_sample(schema, rules, n, limits, draw);
}

FeatureDistribution distributions_from_json(const nlohmann::json& j) {
    FeatureDistribution out;
    for (const auto& [name, spec] : j.items()) {
        const SlotKey slot = parse_slot_key(name);
        Distribution d;
        const std::string type = spec.at("type").get<std::string>();
        if (type == "categorical") {
            d.kind = Distribution::Kind::Categorical;
            double total = 0;
            for (const auto& [value, p] : spec.at("p").items()) {
                const double prob = p.get<double>();
                if (prob < 0) throw Error(name + ": negative probability");
                d.probabilities.emplace_back(value, prob);
                total += prob;
            }
            if (d.probabilities.empty() || std::fabs(total - 1.0) > 1e-9) {
                throw Error(name + ": categorical probabilities must sum to 1");
            }
        } else if (type == "uniform") {
            d.kind = Distribution::Kind::Uniform;
            d.low = spec.at("low").get<double>();
            d.high = spec.at("high").get<double>();
            if (d.low > d.high) throw Error(name + ": low above high");
        } else if (type == "mixture") {
            d.kind = Distribution::Kind::Mixture;
            double total = 0;
            for (const auto& s : spec.at("segments")) {
                Segment seg{s.at("weight").get<double>(), s.at("low").get<double>(), s.at("high").get<double>()};
                if (seg.weight < 0 || seg.low > seg.high) throw Error(name + ": malformed mixture segment");
                total += seg.weight;
                d.segments.push_back(seg);
            }
            if (!(total > 0)) throw Error(name + ": mixture needs a positive weight");
        } else {
            throw Error(name + ": unknown distribution type '" + type + "'");
        }
        out[slot] = std::move(d);
    }
    return out;
}

std::vector<HouseholdProfile> sample_representative(const features::FeatureSchema& schema,
                                                    const FeatureDistribution& dist,
                                                    const std::vector<ConsistencyRule>& rules, std::uint64_t seed,
                                                    std::size_t n, SamplerLimits limits) {
    if (n < 1) throw Error("sample size must be at least 1");
    const SlotKey size_slot{Scope::Household, kHouseholdSizeKey};
    if (!dist.count(size_slot)) throw MissingDistribution(size_slot);
    for (const auto& [slot, c] : schema.slots()) {
        if (!dist.count(slot)) throw MissingDistribution(slot);
    }
    const auto size_constraint = features::household_size_constraint();
    Rng rng(seed);
    auto draw = [&] {
        const auto size = std::get<std::int64_t>(draw_from(rng, size_slot, size_constraint, dist.at(size_slot)));
        if (size < 1 || size > kMaxMembers) throw Error("household.size distribution must stay within 1..6");
        HouseholdProfile p = with_size(static_cast<int>(size));
        for (const auto& [slot, c] : schema.slots()) {
            if (is_size(slot)) continue;
            if (slot.scope == Scope::Household) {
                p.household[slot.key] = draw_from(rng, slot, c, dist.at(slot));
            } else {
                for (auto& m : p.members) m[slot.key] = draw_from(rng, slot, c, dist.at(slot));
            }
        }
        return p;
    };
    return rejection_sample(schema, rules, n, limits, draw);
}

}  // namespace screener::usersim
