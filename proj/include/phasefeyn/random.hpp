#pragma once

#include <Eigen/Dense>
#include <random>

#include "phasefeyn/grid.hpp"

namespace phasefeyn {

// Sum of a few Gaussian bumps per channel; real, smooth, reproducible.
struct SmoothFieldOptions {
    int bumps = 3;
    double amplitude = 1.0;
};
PhaseFunction random_smooth_phase_function(const TimeGrid& grid, std::mt19937_64& rng,
                                           const SmoothFieldOptions& opts = {});

// Random real symmetric matrix with eigenvalues drawn uniformly from
// [lo, hi] (conjugated by a random orthogonal matrix).
Eigen::MatrixXd random_symmetric_in_range(int n, std::mt19937_64& rng, double lo, double hi);

}  // namespace phasefeyn
