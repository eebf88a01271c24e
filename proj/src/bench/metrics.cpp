#include "screener/bench/metrics.hpp"

#include <cmath>
#include <string>

namespace screener::bench {

F1Scores micro_f1(const std::vector<std::pair<bool, bool>>& pairs) {
    if (pairs.empty()) throw Error("micro F1 needs at least one pair");
    F1Scores s;
    for (const auto& [pred, gold] : pairs) {
        if (pred && gold) ++s.counts.tp;
        else if (pred) ++s.counts.fp;
        else if (gold) ++s.counts.fn;
        else ++s.counts.tn;
    }
    const auto& c = s.counts;
    s.degenerate = c.tp == 0;
    if (c.tp == 0) return s;
    s.precision = 100.0 * c.tp / (c.tp + c.fp);
    s.recall = 100.0 * c.tp / (c.tp + c.fn);
    s.f1 = 100.0 * 2 * c.tp / (2 * c.tp + c.fp + c.fn);
    return s;
}

double turn_weighted_f1(double f1, double turns) {
    if (!(f1 >= 0 && f1 <= 100)) throw Error("F1 must lie in [0, 100], got " + std::to_string(f1));
    if (!(turns >= 0 && turns <= 100)) throw Error("turns must lie in [0, 100], got " + std::to_string(turns));
    return f1 / (turns / 100.0 + 1.0);
}

}  // namespace screener::bench
