#pragma once

#include "screener/error.hpp"

#include <utility>
#include <vector>

namespace screener::bench {

struct Confusion {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    int tn = 0;
};

// Micro-averaged scores on the 0..100 scale. Precision, recall and F1 are 0
// when their denominators are; `degenerate` marks TP = 0.
struct F1Scores {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    bool degenerate = false;
    Confusion counts;
};

// pairs: (prediction, gold). Throws Error on an empty list.
F1Scores micro_f1(const std::vector<std::pair<bool, bool>>& pairs);

// F1 / (T/100 + 1) with F1 in [0, 100] and T in [0, 100]. Throws Error
// outside those ranges.
double turn_weighted_f1(double f1, double turns);

}  // namespace screener::bench
