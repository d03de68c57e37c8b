#include "phasefeyn/random.hpp"

#include <cmath>

namespace phasefeyn {

PhaseFunction random_smooth_phase_function(const TimeGrid& grid, std::mt19937_64& rng,
                                           const SmoothFieldOptions& opts) {
    std::normal_distribution<double> amp(0.0, opts.amplitude);
    std::uniform_real_distribution<double> pos(0.1 * grid.t_total, 0.9 * grid.t_total);
    std::uniform_real_distribution<double> spread(0.05 * grid.t_total, 0.2 * grid.t_total);
    Eigen::VectorXcd chan[2];
    for (auto& c : chan) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.m);
        for (int b = 0; b < opts.bumps; ++b) {
            const double a = amp(rng), c0 = pos(rng), sig = spread(rng);
            for (int j = 0; j < grid.m; ++j) {
                const double d = (grid.center(j) - c0) / sig;
                v[j] += a * std::exp(-0.5 * d * d);
            }
        }
        c = v.cast<Complex>();
    }
    return PhaseFunction(grid, std::move(chan[0]), std::move(chan[1]));
}

Eigen::MatrixXd random_symmetric_in_range(int n, std::mt19937_64& rng, double lo, double hi) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            G(i, j) = gauss(rng);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
    std::uniform_real_distribution<double> lam(lo, hi);
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d[i] = lam(rng);
    Eigen::MatrixXd K = Q * d.asDiagonal() * Q.transpose();
    return 0.5 * (K + K.transpose());
}

}  // namespace phasefeyn
