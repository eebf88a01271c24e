#pragma once

// Hand-written reference semantics for every authored checker, written
// directly in C++ from the requirement texts. `path` records each
// conditional outcome (with the member index inside loops), so two households
// realize the same branch outcomes exactly when their paths are equal.

#include "screener/usersim/profile.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace support {

using screener::FeatureValue;
using screener::usersim::HouseholdProfile;

struct OracleResult {
    bool eligible = false;
    std::vector<std::string> path;
};

class Path {
public:
    explicit Path(OracleResult& r) : r_(r) {}
    bool operator()(const std::string& label, bool outcome, int member = -1) {
        r_.path.push_back(label + "@" + std::to_string(member) + "=" + (outcome ? "T" : "F"));
        return outcome;
    }

private:
    OracleResult& r_;
};

inline double num(const screener::features::FeatureMap& m, const std::string& k) {
    const auto& v = m.at(k);
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    return std::get<double>(v);
}

inline const std::string& str(const screener::features::FeatureMap& m, const std::string& k) {
    return std::get<std::string>(m.at(k));
}

using Oracle = std::function<OracleResult(const HouseholdProfile&)>;

inline std::map<std::string, Oracle> corpus_oracles() {
    std::map<std::string, Oracle> o;
    o["TrainEarn"] = [](const HouseholdProfile& h) {
        OracleResult r;
        Path p(r);
        for (int i = 0; i < static_cast<int>(h.size()); ++i) {
            const auto& m = h.members[static_cast<std::size_t>(i)];
            if (p("age>=16", num(m, "age") >= 16, i) && p("age<=24", num(m, "age") <= 24, i)) {
                if (p("foster", str(m, "former_foster_youth") == "yes", i)) return r.eligible = true, r;
                if (p("homeless", str(m, "homeless_or_runaway") == "yes", i)) return r.eligible = true, r;
            }
        }
        return r;
    };
    o["ChildCareAssist"] = [](const HouseholdProfile& h) {
        OracleResult r;
        Path p(r);
        if (p("income<=5000", num(h.household, "monthly_income") <= 5000)) {
            for (int i = 0; i < static_cast<int>(h.size()); ++i) {
                if (p("age<13", num(h.members[static_cast<std::size_t>(i)], "age") < 13, i)) return r.eligible = true, r;
            }
        }
        return r;
    };
    o["SeniorFare"] = [](const HouseholdProfile& h) {
        OracleResult r;
        Path p(r);
        for (int i = 0; i < static_cast<int>(h.size()); ++i) {
            if (p("age>=62", num(h.members[static_cast<std::size_t>(i)], "age") >= 62, i)) return r.eligible = true, r;
        }
        return r;
    };
    o["PrenatalCare"] = [](const HouseholdProfile& h) {
        OracleResult r;
        Path p(r);
        for (int i = 0; i < static_cast<int>(h.size()); ++i) {
            if (p("pregnant", str(h.members[static_cast<std::size_t>(i)], "pregnant") == "yes", i)) {
                return r.eligible = true, r;
            }
        }
        return r;
    };
    o["SchoolMeals"] = [](const HouseholdProfile& h) {
        OracleResult r;
        Path p(r);
        for (int i = 0; i < static_cast<int>(h.size()); ++i) {
            const auto& m = h.members[static_cast<std::size_t>(i)];
            if (p("student", str(m, "student") == "yes", i) && p("age<19", num(m, "age") < 19, i)) {
                return r.eligible = true, r;
            }
        }
        return r;
    };
    o["DisabilityRentFreeze"] = [](const HouseholdProfile& h) {
        OracleResult r;
        Path p(r);
        if (p("not-rent", str(h.household, "housing") != "rent")) return r;
        if (p("income>=4000", num(h.household, "monthly_income") >= 4000)) return r;
        for (int i = 0; i < static_cast<int>(h.size()); ++i) {
            if (p("disabled", str(h.members[static_cast<std::size_t>(i)], "disabled") == "yes", i)) {
                return r.eligible = true, r;
            }
        }
        return r;
    };
    o["VeteranHousing"] = [](const HouseholdProfile& h) {
        OracleResult r;
        Path p(r);
        if (p("own", str(h.household, "housing") == "own")) return r;
        for (int i = 0; i < static_cast<int>(h.size()); ++i) {
            if (p("veteran", str(h.members[static_cast<std::size_t>(i)], "veteran") == "yes", i)) {
                return r.eligible = true, r;
            }
        }
        return r;
    };
    o["EmergencyFood"] = [](const HouseholdProfile& h) {
        OracleResult r;
        Path p(r);
        if (p("shelter", str(h.household, "housing") == "shelter")) return r.eligible = true, r;
        const double limit = 800.0 * static_cast<double>(h.size()) + 400.0;
        r.eligible = p("income<limit", num(h.household, "monthly_income") < limit);
        return r;
    };
    o["LibraryCard"] = [](const HouseholdProfile&) { return OracleResult{true, {}}; };
    o["SummerYouthJobs"] = [](const HouseholdProfile& h) {
        OracleResult r;
        Path p(r);
        const double age = num(h.members.at(0), "age");
        r.eligible = p("age>=14", age >= 14) && p("age<=21", age <= 21);
        return r;
    };
    o["KinshipCare"] = [](const HouseholdProfile& h) {
        OracleResult r;
        Path p(r);
        for (int i = 0; i < static_cast<int>(h.size()); ++i) {
            const auto& m = h.members[static_cast<std::size_t>(i)];
            if (p("foster", str(m, "in_foster_care") == "yes", i) && p("grandchild", str(m, "relation") == "grandchild", i)) {
                return r.eligible = true, r;
            }
        }
        return r;
    };
    o["WorkforceBronx"] = [](const HouseholdProfile& h) {
        OracleResult r;
        Path p(r);
        if (p("not-bronx", str(h.household, "borough") != "bronx")) return r;
        int adults = 0;
        for (int i = 0; i < static_cast<int>(h.size()); ++i) {
            const auto& m = h.members[static_cast<std::size_t>(i)];
            if (p("adult", num(m, "age") >= 18, i) && p("jobless", str(m, "employed") == "no", i)) ++adults;
        }
        r.eligible = adults >= 1;
        return r;
    };
    return o;
}

// Value lists per feature; grid_households enumerates every combination for
// every household size up to max_members.
struct GridSpec {
    std::map<std::string, std::vector<FeatureValue>> household;
    std::map<std::string, std::vector<FeatureValue>> member;
    int max_members = 1;
};

namespace detail {

inline std::vector<screener::features::FeatureMap> combos(const std::map<std::string, std::vector<FeatureValue>>& spec) {
    std::vector<screener::features::FeatureMap> out{{}};
    for (const auto& [key, values] : spec) {
        std::vector<screener::features::FeatureMap> next;
        for (const auto& partial : out) {
            for (const auto& v : values) {
                auto m = partial;
                m[key] = v;
                next.push_back(std::move(m));
            }
        }
        out = std::move(next);
    }
    return out;
}

}  // namespace detail

inline std::vector<HouseholdProfile> grid_households(const GridSpec& spec) {
    const auto hh = detail::combos(spec.household);
    const auto mem = detail::combos(spec.member);
    std::vector<HouseholdProfile> out;
    for (int size = 1; size <= spec.max_members; ++size) {
        // All member tuples of this size.
        std::vector<std::vector<screener::features::FeatureMap>> tuples{{}};
        for (int k = 0; k < size; ++k) {
            std::vector<std::vector<screener::features::FeatureMap>> next;
            for (const auto& t : tuples) {
                for (const auto& m : mem) {
                    auto u = t;
                    u.push_back(m);
                    next.push_back(std::move(u));
                }
            }
            tuples = std::move(next);
        }
        for (const auto& h : hh) {
            for (const auto& t : tuples) {
                HouseholdProfile p;
                p.household = h;
                p.household["size"] = std::int64_t{size};
                p.members = t;
                out.push_back(std::move(p));
            }
        }
    }
    return out;
}

inline std::map<std::string, GridSpec> corpus_grids() {
    using V = std::vector<FeatureValue>;
    const V yn{std::string("yes"), std::string("no")};
    const V housing{std::string("rent"), std::string("own"), std::string("shelter"), std::string("other")};
    std::map<std::string, GridSpec> g;
    g["TrainEarn"] = {{}, {{"age", V{std::int64_t{15}, std::int64_t{16}, std::int64_t{24}, std::int64_t{25}}},
                          {"former_foster_youth", yn}, {"homeless_or_runaway", yn}}, 2};
    g["ChildCareAssist"] = {{{"monthly_income", V{4999.5, 5000.0, 5000.5}}},
                            {{"age", V{std::int64_t{12}, std::int64_t{13}}}}, 3};
    g["SeniorFare"] = {{}, {{"age", V{std::int64_t{61}, std::int64_t{62}, std::int64_t{63}}}}, 3};
    g["PrenatalCare"] = {{}, {{"pregnant", yn}}, 3};
    g["SchoolMeals"] = {{}, {{"student", yn}, {"age", V{std::int64_t{18}, std::int64_t{19}}}}, 3};
    g["DisabilityRentFreeze"] = {{{"housing", housing}, {"monthly_income", V{3999.99, 4000.0}}}, {{"disabled", yn}}, 3};
    g["VeteranHousing"] = {{{"housing", housing}}, {{"veteran", yn}}, 3};
    g["EmergencyFood"] = {{{"housing", housing}, {"monthly_income", V{1199.99, 1200.0, 1999.99, 2000.0, 2800.0}}}, {}, 3};
    g["LibraryCard"] = {{}, {}, 2};
    g["SummerYouthJobs"] = {{}, {{"age", V{std::int64_t{13}, std::int64_t{14}, std::int64_t{21}, std::int64_t{22}}}}, 2};
    g["KinshipCare"] = {{}, {{"in_foster_care", yn},
                             {"relation", V{std::string("grandchild"), std::string("child"), std::string("self")}}}, 2};
    g["WorkforceBronx"] = {{{"borough", V{std::string("bronx"), std::string("queens")}}},
                           {{"age", V{std::int64_t{17}, std::int64_t{18}}}, {"employed", yn}}, 3};
    return g;
}

}  // namespace support
