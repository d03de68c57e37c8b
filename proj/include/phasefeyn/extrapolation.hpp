#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "phasefeyn/errors.hpp"

namespace phasefeyn {

// One Richardson level for a sequence at doubling resolution with error
// ~ C n^-p: out[i] = (2^p seq[i+1] - seq[i]) / (2^p - 1).
template <class T>
std::vector<T> richardson_step(const std::vector<T>& seq, double p) {
    if (seq.size() < 2)
        throw PreconditionError("richardson_step: need at least two entries");
    const double w = std::pow(2.0, p);
    std::vector<T> out(seq.size() - 1);
    for (size_t i = 0; i + 1 < seq.size(); ++i)
        out[i] = (w * seq[i + 1] - seq[i]) / (w - 1.0);
    return out;
}

template <class T>
T richardson_limit(std::vector<T> seq, double p, int levels) {
    for (int l = 0; l < levels && seq.size() > 1; ++l) {
        seq = richardson_step(seq, p + 2.0 * l);
        // each level removes the leading term; the next one is two orders up
    }
    return seq.back();
}

// Observed convergence order from the last three entries of a sequence at
// doubling resolution: log2 |d1| / |d2|.
template <class T>
double observed_order(const std::vector<T>& seq) {
    if (seq.size() < 3)
        throw PreconditionError("observed_order: need at least three entries");
    const auto n = seq.size();
    const double d1 = std::abs(seq[n - 2] - seq[n - 3]);
    const double d2 = std::abs(seq[n - 1] - seq[n - 2]);
    if (d2 == 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(d1 / d2);
}

}  // namespace phasefeyn
