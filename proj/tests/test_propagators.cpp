#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "phasefeyn/extrapolation.hpp"
#include "phasefeyn/kernels.hpp"
#include "phasefeyn/propagators.hpp"
#include "phasefeyn/random.hpp"

using namespace phasefeyn;

namespace {
constexpr Complex kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("free generating functional") {
    const TimeGrid g = build_grid(1.0, 2.0, 512);

    // f = 0 gives the Green's function; at y = 0, t = 1 the value is
    // (2 pi)^{-1/2} exp(-i pi/4)
    const Complex v0 = free_t_transform(PhaseFunction::zero(g), 0.0, 1.0);
    const Complex expected0 = std::sqrt(1.0 / (2.0 * kPi)) * std::polar(1.0, -kPi / 4.0);
    CHECK(std::abs(v0 - expected0) < 1e-14);
    CHECK(v0.real() == doctest::Approx(0.2820947917738781).epsilon(1e-12));
    CHECK(v0.imag() == doctest::Approx(-0.2820947917738781).epsilon(1e-12));

    const double y = 1.3;
    const Complex vy = free_t_transform(PhaseFunction::zero(g), y, 1.0);
    CHECK(std::abs(vy - free_green(y, 1.0)) < 1e-14);

    // matches the master route on random smooth fields
    const GaussKernelSpec spec = make_free_spec(g, y);
    std::mt19937_64 rng(51);
    for (int c = 0; c < 10; ++c) {
        const PhaseFunction f = random_smooth_phase_function(g, rng);
        const Complex direct = free_t_transform(f, y, 1.0);
        const Complex master = master_t_transform(spec, f).value;
        CHECK(std::abs(direct - master) / std::abs(master) < 1e-8);
    }

    CHECK_THROWS_AS(free_t_transform(PhaseFunction::zero(g), y, 0.7), PreconditionError);
}

TEST_CASE("harmonic generating functional") {
    const TimeGrid g = build_grid(1.0, 2.0, 512);
    const double y = 0.6, k = 1.0;

    // f = 0 approaches the analytic closed form at second order
    const Complex v0 = ho_t_transform(PhaseFunction::zero(g), y, 1.0, k);
    const Complex analytic = std::sqrt(std::sqrt(k) / (2.0 * kPi * kI * std::sin(1.0))) *
                             std::exp(kI * std::sqrt(k) / (2.0 * std::tan(1.0)) * y * y);
    CHECK(std::abs(v0 - analytic) / std::abs(analytic) < 1e-5);

    // k -> 0 limit reproduces the free functional
    std::mt19937_64 rng(53);
    const PhaseFunction f = random_smooth_phase_function(g, rng);
    const Complex small_k = ho_t_transform(f, y, 1.0, 1e-8);
    const Complex free_val = free_t_transform(f, y, 1.0);
    CHECK(std::abs(small_k - free_val) / std::abs(free_val) < 1e-6);

    // matches the master route on random smooth fields
    const GaussKernelSpec spec = make_ho_spec(g, y, k);
    for (int c = 0; c < 10; ++c) {
        const PhaseFunction ff = random_smooth_phase_function(g, rng);
        const Complex direct = ho_t_transform(ff, y, 1.0, k);
        const Complex master = master_t_transform(spec, ff).value;
        CHECK(std::abs(direct - master) / std::abs(master) < 1e-8);
    }
}

TEST_CASE("harmonic functional at t = pi/3") {
    const double t = kPi / 3.0;
    const TimeGrid g = build_grid(t, 2.0 * t, 512);
    const Complex v = ho_t_transform(PhaseFunction::zero(g), 0.0, t, 1.0);
    const Complex expected =
        std::sqrt(1.0 / (2.0 * kPi * std::sin(t))) * std::polar(1.0, -kPi / 4.0);
    CHECK(std::abs(v - expected) / std::abs(expected) < 1e-5);
    CHECK(expected.real() == doctest::Approx(0.3031).epsilon(1e-3));
}

TEST_CASE("Green's functions") {
    const Complex g01 = free_green(0.0, 1.0);
    CHECK(g01.real() == doctest::Approx(0.2820947917738781).epsilon(1e-12));
    CHECK(g01.imag() == doctest::Approx(-0.2820947917738781).epsilon(1e-12));

    // constant modulus in y
    for (double y : {-2.0, 0.3, 1.7})
        CHECK(std::abs(free_green(y, 0.7)) == doctest::Approx(1.0 / std::sqrt(2.0 * kPi * 0.7)));

    for (double y : {-1.0, 0.4, 2.2})
        CHECK(std::abs(ho_green(y, 1.0, 1.0)) ==
              doctest::Approx(std::sqrt(1.0 / (2.0 * kPi * std::sin(1.0)))));

    // harmonic limit k -> 0
    const Complex lim = ho_green(0.9, 1.2, 1e-8);
    CHECK(std::abs(lim - free_green(0.9, 1.2)) / std::abs(lim) < 1e-6);

    CHECK_THROWS_AS(ho_green(0.0, kPi / 2.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(free_green(0.0, -1.0), PreconditionError);
}

TEST_CASE("complex Gaussian integral") {
    CHECK(std::abs(complex_gauss_integral(-1.0, 0.0) - std::sqrt(kPi)) < 1e-15);
    CHECK(std::abs(complex_gauss_integral(-1.0, 2.0) - std::sqrt(kPi) * std::exp(1.0)) < 1e-13);

    // Fresnel case against the regulated quadrature oracle
    const Complex fresnel = complex_gauss_integral(kI * 0.5, 0.0);
    const Complex expected = std::sqrt(2.0 * kPi) * std::polar(1.0, kPi / 4.0);
    CHECK(std::abs(fresnel - expected) < 1e-13);
    const Complex oracle_val = oracle::regulated_gauss_integral(kI * 0.5, 0.0);
    CHECK(std::abs(fresnel - oracle_val) / std::abs(fresnel) < 1e-3);

    CHECK_THROWS_AS(complex_gauss_integral(1.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(complex_gauss_integral(0.0, 1.0), PreconditionError);
}

TEST_CASE("time slicing is exact for the free kernel") {
    CHECK(std::abs(time_slice_oracle(1.0, 1.0, 0.0, 1) - free_green(1.0, 1.0)) < 1e-15);
    CHECK(std::abs(time_slice_oracle(1.0, 1.0, 0.0, 100) - free_green(1.0, 1.0)) < 1e-12);
    CHECK(std::abs(time_slice_oracle(-0.7, 0.35, 0.0, 57) - free_green(-0.7, 0.35)) < 1e-12);
    CHECK_THROWS_AS(time_slice_oracle(0.0, 1.0, 0.0, 0), PreconditionError);
}

TEST_CASE("time slicing converges at second order to the harmonic kernel") {
    const double y = 1.0, t = 1.0, k = 1.0;
    std::vector<Complex> vals;
    for (int n = 16; n <= 1024; n *= 2) vals.push_back(time_slice_oracle(y, t, k, n));
    CHECK(observed_order(vals) == doctest::Approx(2.0).epsilon(0.02));
    const Complex limit = richardson_limit(vals, 2.0, 2);
    const Complex closed = ho_green(y, t, k);
    CHECK(std::abs(limit - closed) / std::abs(closed) < 1e-9);
}

TEST_CASE("Schroedinger residual") {
    const std::vector<double> ys = {-0.8, 0.0, 0.5, 1.2};
    const std::vector<double> ts = {0.5, 1.0, 1.3};

    const double free_res = schrodinger_residual(GreenKind::free, {0.5}, {1.0}, 0.0, 1e-3, 1e-3);
    CHECK(free_res < 1e-5);

    const double ho_res = schrodinger_residual(GreenKind::ho, ys, ts, 1.0, 1e-3, 1e-3);
    CHECK(ho_res < 1e-5);

    // second-order decay
    const double r1 = schrodinger_residual(GreenKind::ho, ys, ts, 1.0, 2e-3, 2e-3);
    const double r2 = schrodinger_residual(GreenKind::ho, ys, ts, 1.0, 1e-3, 1e-3);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.08));

    // flipped potential is not a solution
    const double flipped = schrodinger_residual(GreenKind::ho, ys, ts, 1.0, 1e-3, 1e-3,
                                                PotentialSign::flipped);
    CHECK(flipped > 1e-1);

    CHECK_THROWS_AS(schrodinger_residual(GreenKind::free, ys, {0.05}, 0.0, 1e-3, 1e-3),
                    PreconditionError);
}

TEST_CASE("propagator composition") {
    // free: exact Gaussian algebra
    {
        const auto [composed, direct] = compose_check(0.5, 0.5, 0.0, 0.0, 1.0);
        CHECK(std::abs(composed - direct) < 1e-12);
    }
    // harmonic with general endpoints
    {
        const auto [composed, direct] = compose_check(0.4, 0.5, 1.0, 0.3, -0.8);
        CHECK(std::abs(composed - direct) < 1e-10);
    }
    // t2 -> 0: the second kernel approaches the identity
    {
        const auto [composed, direct_t1] =
            std::pair{compose_check(0.7, 1e-4, 1.0, 0.0, 0.5).first,
                      mehler_two_point_kernel(0.7, 1.0).eval(0.5, 0.0)};
        CHECK(std::abs(composed - direct_t1) / std::abs(direct_t1) < 1e-3);
    }
    CHECK_THROWS_AS(compose_check(1.0, 1.0, 1.0, 0.0, 0.0), PreconditionError);
}

TEST_CASE("propagator parameter validation") {
    PropagatorParams p{0.0, 1.0, 1.0, 1.0};
    p.validate();
    p.t = kPi;
    CHECK_THROWS_AS(p.validate(), PreconditionError);
    p = PropagatorParams{0.5, 1.0, 1.0, 0.0};
    CHECK_THROWS_AS(p.validate(), PreconditionError);
}
