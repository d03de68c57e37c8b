#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "phasefeyn/parallel.hpp"

namespace phasefeyn::oracle {

using Complex = std::complex<double>;

// int exp(a z^2 + b z) dz via regulated trapezoid quadrature (regulator
// exp(-eps z^2), eps in {1e-1, 1e-2, 1e-3}) with two Richardson levels in
// eps. Good to roughly 1e-4 relative for Fresnel-type a.
inline Complex regulated_gauss_integral(Complex a, Complex b) {
    auto quad = [&](double eps) {
        const double decay = eps - a.real();
        const double L = 7.0 / std::sqrt(decay);
        const double freq = std::max(std::abs(a.imag()) * L + std::abs(b.imag()), 1.0);
        const double step = std::min(0.25 / freq, 0.01);
        const long n = static_cast<long>(2.0 * L / step) + 1;
        Complex acc = 0.0;
        for (long i = 0; i <= n; ++i) {
            const double z = -L + 2.0 * L * i / n;
            const double wgt = (i == 0 || i == n) ? 0.5 : 1.0;
            acc += wgt * std::exp((a - eps) * z * z + b * z);
        }
        return acc * (2.0 * L / n);
    };
    const Complex v1 = quad(1e-1), v2 = quad(1e-2), v3 = quad(1e-3);
    const Complex r1 = (10.0 * v2 - v1) / 9.0;
    const Complex r2 = (10.0 * v3 - v2) / 9.0;
    return (10.0 * r2 - r1) / 9.0;
}

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

// Monte-Carlo estimate of E[exp(-w^T K w)], w standard normal. Fixed chunk
// count with per-chunk RNG streams: the result is identical under either
// execution policy and any thread count.
inline McEstimate mc_gaussian_quadratic(const Eigen::MatrixXd& K, long n_samples,
                                        std::uint64_t seed,
                                        par::Policy policy = par::Policy::openmp) {
    const int n = static_cast<int>(K.rows());
    constexpr int kChunks = 256;
    struct Partial {
        double sum = 0.0, sumsq = 0.0;
        long count = 0;
    };
    const auto partials = par::map_chunks<Partial>(
        kChunks,
        [&](int chunk) {
            Partial p;
            std::mt19937_64 rng(par::mix_seed(seed, chunk));
            std::normal_distribution<double> gauss(0.0, 1.0);
            const long lo = n_samples * chunk / kChunks;
            const long hi = n_samples * (chunk + 1) / kChunks;
            Eigen::VectorXd w(n);
            for (long s = lo; s < hi; ++s) {
                for (int i = 0; i < n; ++i) w[i] = gauss(rng);
                const double v = std::exp(-w.dot(K * w));
                p.sum += v;
                p.sumsq += v * v;
                ++p.count;
            }
            return p;
        },
        policy);
    double sum = 0.0, sumsq = 0.0;
    long count = 0;
    for (const auto& p : partials) {
        sum += p.sum;
        sumsq += p.sumsq;
        count += p.count;
    }
    McEstimate est;
    est.mean = sum / count;
    const double var = std::max(sumsq / count - est.mean * est.mean, 0.0);
    est.std_error = std::sqrt(var / count);
    return est;
}

}  // namespace phasefeyn::oracle
