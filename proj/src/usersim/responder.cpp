#include "screener/usersim/responder.hpp"

#include "screener/text.hpp"

#include <algorithm>
#include <regex>
#include <set>

namespace screener::usersim {

namespace {

using Words = std::vector<std::string>;

struct Mention {
    std::string key;
    bool member;
    std::size_t begin;
    std::size_t end;
};

std::size_t find_words(const Words& hay, const Words& needle, std::size_t from = 0) {
    if (needle.empty() || needle.size() > hay.size()) return std::string::npos;
    for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
        if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) return i;
    }
    return std::string::npos;
}

bool has_word(const Words& w, const char* x) {
    return std::find(w.begin(), w.end(), x) != w.end();
}

bool contains(const std::string& s, const char* x) {
    return s.find(x) != std::string::npos;
}

// Features named in the question; a mention contained in a longer one
// ("income" inside "monthly income") is dropped.
std::vector<Mention> mentions(const HouseholdProfile& p, const Words& q) {
    std::set<std::pair<std::string, bool>> keys;
    for (const auto& [k, v] : p.household) {
        if (k != kHouseholdSizeKey) keys.insert({k, false});
    }
    for (const auto& m : p.members) {
        for (const auto& [k, v] : m) keys.insert({k, true});
    }
    std::vector<Mention> found;
    for (const auto& [k, member] : keys) {
        const Words needle = text::words(label(k));
        const std::size_t at = find_words(q, needle);
        if (at != std::string::npos) found.push_back({k, member, at, at + needle.size()});
    }
    std::vector<Mention> out;
    for (const auto& m : found) {
        const bool inner = std::any_of(found.begin(), found.end(), [&](const Mention& o) {
            return &o != &m && o.begin <= m.begin && m.end <= o.end && (o.end - o.begin) > (m.end - m.begin);
        });
        if (inner) continue;
        // The same key can be both household and member scoped only in broken
        // profiles; keep one.
        if (std::none_of(out.begin(), out.end(), [&](const Mention& o) { return o.key == m.key; })) out.push_back(m);
    }
    return out;
}

struct Threshold {
    std::string op;
    double value;
};

std::optional<Threshold> threshold_of(const std::string& q) {
    static const std::regex before(
        R"((under|below|younger than|less than|fewer than|over|above|older than|more than|greater than|at least|at most)\s+(?:the age of\s+)?(\d+(?:\.\d+)?))");
    static const std::regex after(R"((\d+(?:\.\d+)?)\s+(?:years old\s+)?(or older|or more|and older|and over|or over|or younger|or less|and under|or under))");
    std::smatch m;
    if (std::regex_search(q, m, before)) {
        const std::string w = m[1];
        const double v = std::stod(m[2]);
        if (w == "at least") return Threshold{">=", v};
        if (w == "at most") return Threshold{"<=", v};
        if (w == "under" || w == "below" || w == "younger than" || w == "less than" || w == "fewer than") {
            return Threshold{"<", v};
        }
        return Threshold{">", v};
    }
    if (std::regex_search(q, m, after)) {
        const std::string w = m[2];
        const double v = std::stod(m[1]);
        if (w == "or younger" || w == "or less" || w == "and under" || w == "or under") return Threshold{"<=", v};
        return Threshold{">=", v};
    }
    return std::nullopt;
}

bool holds(const std::string& op, double x, double t) {
    if (op == "<") return x < t;
    if (op == "<=") return x <= t;
    if (op == ">") return x > t;
    return x >= t;
}

std::optional<double> numeric(const FeatureValue& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::nullopt;
}

const FeatureValue* member_value(const features::FeatureMap& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
}

bool asks_size(const std::string& q) {
    for (const char* phrase : {"how many people", "how many members", "how many persons", "how many individuals",
                               "household size", "size of your household", "number of people",
                               "number of members", "people live", "people are in your household"}) {
        if (contains(q, phrase)) return true;
    }
    return false;
}

bool asks_anyone(const std::string& q, const Words& w) {
    return has_word(w, "anyone") || has_word(w, "anybody") || has_word(w, "someone") || has_word(w, "somebody") ||
           contains(q, "any member") || contains(q, "any of") || contains(q, "any person") ||
           contains(q, "any household member");
}

bool refers_to_user(const Words& w) {
    return has_word(w, "you") || has_word(w, "your") || has_word(w, "user") || has_word(w, "applicant");
}

// Choice value named outside the feature label itself.
std::string named_value(const HouseholdProfile& p, const Mention& m, const Words& q) {
    std::set<std::string> values;
    for (const auto& mem : p.members) {
        if (const auto* v = member_value(mem, m.key)) {
            if (const auto* s = std::get_if<std::string>(v)) values.insert(*s);
        }
    }
    std::string best;
    std::size_t best_len = 0;
    for (const auto& v : values) {
        const Words needle = text::words(v);
        std::size_t at = find_words(q, needle);
        while (at != std::string::npos && at >= m.begin && at < m.end) at = find_words(q, needle, at + 1);
        if (at != std::string::npos && needle.size() > best_len) {
            best = v;
            best_len = needle.size();
        }
    }
    return best;
}

}  // namespace

OracleQuery parse_question(const HouseholdProfile& p, const std::string& question) {
    const std::string q = text::lower(question);
    const Words w = text::words(question);
    const auto named = mentions(p, w);
    const auto thr = threshold_of(q);

    if (named.size() > 1) throw OracleUnanswerable("question names more than one feature");

    static const std::regex person_re(R"(\bperson\s+(\d+)\b)");
    std::smatch pm;
    const bool has_person = std::regex_search(q, pm, person_re);

    OracleQuery out;
    if (named.empty()) {
        const bool by_age = thr && !p.members.empty() && p.members.front().count("age");
        if (by_age && (contains(q, "how many") || asks_anyone(q, w))) {
            // "How many children do you have under the age of 5?", "Is anyone over 65?"
            out.kind = contains(q, "how many") ? OracleQuery::Kind::Count : OracleQuery::Kind::Any;
            out.key = "age";
            out.member = true;
            out.op = thr->op;
            out.threshold = thr->value;
            return out;
        }
        if (asks_size(q) && !thr) {
            out.kind = OracleQuery::Kind::HouseholdSize;
            return out;
        }
        throw OracleUnanswerable("question names no known feature");
    }

    const Mention& m = named.front();
    out.key = m.key;
    out.member = m.member;

    if (m.member && contains(q, "how many")) {
        out.kind = OracleQuery::Kind::Count;
        if (thr) {
            out.op = thr->op;
            out.threshold = thr->value;
            return out;
        }
        out.target = named_value(p, m, w);
        if (out.target.empty()) {
            if (!has_word(w, "yes") && p.members.size() && member_value(p.members.front(), m.key) &&
                std::holds_alternative<std::string>(*member_value(p.members.front(), m.key))) {
                out.target = "yes";
            } else {
                throw OracleUnanswerable("count without a condition");
            }
        }
        return out;
    }

    if (m.member && !has_person && asks_anyone(q, w)) {
        out.kind = OracleQuery::Kind::Any;
        if (thr) {
            out.op = thr->op;
            out.threshold = thr->value;
        } else {
            out.target = named_value(p, m, w);
            if (out.target.empty()) out.target = "yes";
        }
        return out;
    }

    if (thr) throw OracleUnanswerable("threshold on a single value");
    out.kind = OracleQuery::Kind::Lookup;
    if (m.member) {
        if (has_person) {
            out.person = std::stoi(pm[1]);
        } else if (refers_to_user(w) || p.members.size() == 1) {
            out.person = 0;
        } else {
            throw OracleUnanswerable("which person is meant");
        }
    }
    return out;
}

std::string answer(const HouseholdProfile& p, const OracleQuery& q) {
    switch (q.kind) {
        case OracleQuery::Kind::HouseholdSize: return std::to_string(p.members.size());
        case OracleQuery::Kind::Lookup: {
            const FeatureValue* v = nullptr;
            if (q.member) {
                if (q.person < 0 || static_cast<std::size_t>(q.person) >= p.members.size()) {
                    throw OracleUnanswerable("no such person");
                }
                v = member_value(p.members[static_cast<std::size_t>(q.person)], q.key);
            } else {
                v = member_value(p.household, q.key);
            }
            if (!v) throw OracleUnanswerable("feature not in profile");
            return format_value(*v);
        }
        case OracleQuery::Kind::Count:
        case OracleQuery::Kind::Any: {
            int count = 0;
            for (const auto& m : p.members) {
                const FeatureValue* v = member_value(m, q.key);
                if (!v) throw OracleUnanswerable("feature not in profile");
                bool match;
                if (!q.op.empty()) {
                    auto x = numeric(*v);
                    if (!x) throw OracleUnanswerable("threshold on a non-numeric feature");
                    match = holds(q.op, *x, q.threshold);
                } else {
                    const auto* s = std::get_if<std::string>(v);
                    match = s && text::fold(*s) == text::fold(q.target);
                }
                count += match ? 1 : 0;
            }
            if (q.kind == OracleQuery::Kind::Count) return std::to_string(count);
            return count > 0 ? "yes" : "no";
        }
    }
    throw OracleUnanswerable("unsupported question");
}

std::string oracle_respond(const HouseholdProfile& p, const std::string& question) {
    try {
        return answer(p, parse_question(p, question));
    } catch (const OracleUnanswerable&) {
        return kCannotAnswer;
    }
}

std::string role_play_prompt(const std::string& profile_text, const std::string& question) {
    return "You are role-playing a member of the household described below. Answer the question truthfully using "
           "only this description. Refer to people the way the question does. If the description does not contain "
           "the answer, reply \"" +
           std::string(kCannotAnswer) + "\". Keep the answer short.\n\nHousehold:\n" + profile_text +
           "\n\nQuestion: " + question + "\nAnswer:";
}

std::string llm_respond(llm::Gateway& gw, const std::string& profile_text, const std::string& question) {
    return text::trim(gw.complete(llm::user_prompt(role_play_prompt(profile_text, question), "user-sim")));
}

}  // namespace screener::usersim
