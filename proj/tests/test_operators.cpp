#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "phasefeyn/extrapolation.hpp"
#include "phasefeyn/kernels.hpp"
#include "phasefeyn/operators.hpp"
#include "phasefeyn/random.hpp"

using namespace phasefeyn;

namespace {
constexpr Complex kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("free kinetic operator block values") {
    const TimeGrid g = build_grid(1.0, 2.0, 64);
    const BlockOperator K = make_K_free(g);
    for (int j = 0; j < g.m; ++j) {
        if (g.in_window(j)) {
            CHECK(K.xx.entry(j, j) == Complex(-1.0));
            CHECK(K.xp.entry(j, j) == -kI);
            CHECK(K.px.entry(j, j) == -kI);
            CHECK(K.pp.entry(j, j) == Complex(-1.0, 1.0));
        } else {
            CHECK(K.xx.entry(j, j) == Complex(0.0));
            CHECK(K.xp.entry(j, j) == Complex(0.0));
            CHECK(K.px.entry(j, j) == Complex(0.0));
            CHECK(K.pp.entry(j, j) == Complex(0.0));
        }
    }

    std::mt19937_64 rng(2);
    const PhaseFunction f = random_smooth_phase_function(g, rng);
    const PhaseFunction h = random_smooth_phase_function(g, rng);
    CHECK(std::abs(bilinear_pair(f, K.apply(h)) - bilinear_pair(K.apply(f), h)) < 1e-12);
}

TEST_CASE("double-integration operator") {
    const TimeGrid g = build_grid(1.0, 2.0, 512);
    const BlockOperator A = make_A(g);
    const double t = g.t_window;

    // kernel symmetry is exact
    for (int i : {0, 17, 101})
        for (int j : {3, 64, 200})
            CHECK(A.xx.entry(i, j) == A.xx.entry(j, i));

    // A 1_[0,t) evaluates to (t^2 - s^2)/2 at window centers
    const PhaseFunction one = indicator(g, 0.0, t, Channel::x);
    const PhaseFunction Aone = A.apply(one);
    double dev = 0.0;
    for (int j = 0; j < g.m; ++j) {
        if (!g.in_window(j)) continue;
        const double s = g.center(j);
        dev = std::max(dev, std::abs(Aone.x()[j] - 0.5 * (t * t - s * s)));
    }
    CHECK(dev < 10.0 / (g.m * g.m) * g.t_total * g.t_total);

    // trace -> t^2/2 at second order
    double tr = 0.0;
    for (int j = 0; j < g.m; ++j) tr += A.xx.entry(j, j).real();
    CHECK(std::abs(tr - t * t / 2.0) < 10.0 / (g.m * g.m));

    std::mt19937_64 rng(3);
    const PhaseFunction f = random_smooth_phase_function(g, rng);
    const PhaseFunction h = random_smooth_phase_function(g, rng);
    CHECK(std::abs(bilinear_pair(f, A.apply(h)) - bilinear_pair(A.apply(f), h)) < 1e-12);
}

TEST_CASE("harmonic potential block") {
    const TimeGrid g = build_grid(1.0, 2.0, 64);
    CHECK_THROWS_AS(make_L_ho(g, -0.5), PreconditionError);

    const BlockOperator L0 = make_L_ho(g, 0.0);
    CHECK(L0.xx.max_abs() == 0.0);

    const BlockOperator A = make_A(g);
    const BlockOperator L = make_L_ho(g, 1.0);
    for (int i : {0, 5, 20})
        for (int j : {1, 9, 30})
            CHECK(L.xx.entry(i, j) == kI * A.xx.entry(i, j));

    std::mt19937_64 rng(4);
    const PhaseFunction f = random_smooth_phase_function(g, rng);
    const PhaseFunction h = random_smooth_phase_function(g, rng);
    CHECK(std::abs(bilinear_pair(f, L.apply(h)) - bilinear_pair(L.apply(f), h)) < 1e-12);
}

TEST_CASE("assembled operator patterns") {
    const TimeGrid g = build_grid(1.0, 2.0, 32);
    const BlockOperator N_free = assemble_N(make_K_free(g), BlockOperator::zero(g));
    for (int j = 0; j < g.m; ++j) {
        const bool in = g.in_window(j);
        CHECK(N_free.xx.entry(j, j) == (in ? Complex(0.0) : Complex(1.0)));
        CHECK(N_free.xp.entry(j, j) == (in ? -kI : Complex(0.0)));
        CHECK(N_free.pp.entry(j, j) == (in ? kI : Complex(1.0)));
    }
    CHECK(N_free.symmetric);

    const BlockOperator A = make_A(g);
    const BlockOperator N_ho = assemble_N(make_K_free(g), make_L_ho(g, 1.0));
    for (int j = 0; j < g.m; ++j) {
        const bool in = g.in_window(j);
        const Complex expected_xx = (in ? Complex(0.0) : Complex(1.0)) + kI * A.xx.entry(j, j);
        CHECK(std::abs(N_ho.xx.entry(j, j) - expected_xx) < 1e-15);
        CHECK(N_ho.xp.entry(j, j) == (in ? -kI : Complex(0.0)));
    }

    const TimeGrid other = build_grid(1.0, 2.0, 16);
    CHECK_THROWS_AS(assemble_N(make_K_free(g), BlockOperator::zero(other)), PreconditionError);
}

TEST_CASE("free inverse matches the closed-form block pattern") {
    const TimeGrid g = build_grid(1.0, 2.0, 128);
    const BlockOperator Ninv = invert_N(assemble_N(make_K_free(g), BlockOperator::zero(g)));
    double dev = 0.0;
    for (int j = 0; j < g.m; ++j) {
        const bool in = g.in_window(j);
        dev = std::max(dev, std::abs(Ninv.xx.entry(j, j) - (in ? kI : Complex(1.0))));
        dev = std::max(dev, std::abs(Ninv.xp.entry(j, j) - (in ? kI : Complex(0.0))));
        dev = std::max(dev, std::abs(Ninv.px.entry(j, j) - (in ? kI : Complex(0.0))));
        dev = std::max(dev, std::abs(Ninv.pp.entry(j, j) - (in ? Complex(0.0) : Complex(1.0))));
    }
    CHECK(dev < 1e-8);
}

TEST_CASE("endpoint pairing against the closed forms") {
    // free: pair(eta, N^-1 eta) = i t, exact on aligned grids
    const TimeGrid g = build_grid(1.0, 2.0, 256);
    const BlockOperator Ninv = invert_N(assemble_N(make_K_free(g), BlockOperator::zero(g)));
    const PhaseFunction eta = indicator(g, 0.0, 1.0, Channel::x);
    CHECK(std::abs(bilinear_pair(eta, Ninv.apply(eta)) - kI * 1.0) < 1e-12);

    // harmonic at k=1, t=1: i tan(1), second-order in the cell width
    std::vector<double> errs;
    for (int m : {64, 256, 1024}) {
        const TimeGrid gg = build_grid(1.0, 2.0, m);
        const BlockOperator inv = invert_N(assemble_N(make_K_free(gg), make_L_ho(gg, 1.0)));
        const PhaseFunction e = indicator(gg, 0.0, 1.0, Channel::x);
        errs.push_back(std::abs(bilinear_pair(e, inv.apply(e)) - kI * std::tan(1.0)));
    }
    CHECK(errs[0] / errs[1] == doctest::Approx(16.0).epsilon(0.2));
    CHECK(errs[1] / errs[2] == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("inverse round-trips across resolutions") {
    for (int m : {64, 256, 1024}) {
        const TimeGrid g = build_grid(1.0, 2.0, m);
        for (bool harmonic : {false, true}) {
            const BlockOperator N = assemble_N(
                make_K_free(g), harmonic ? make_L_ho(g, 1.0) : BlockOperator::zero(g));
            const BlockOperator Ninv = invert_N(N);  // residual gate lives inside
            // spot-check the action as well
            std::mt19937_64 rng(m);
            const PhaseFunction f = random_smooth_phase_function(g, rng);
            const PhaseFunction back = N.apply(Ninv.apply(f));
            const PhaseFunction back2 = Ninv.apply(N.apply(f));
            double dev = 0.0;
            for (int j = 0; j < g.m; ++j) {
                dev = std::max(dev, std::abs(back.x()[j] - f.x()[j]));
                dev = std::max(dev, std::abs(back.p()[j] - f.p()[j]));
                dev = std::max(dev, std::abs(back2.x()[j] - f.x()[j]));
                dev = std::max(dev, std::abs(back2.p()[j] - f.p()[j]));
            }
            CHECK(dev < 1e-8);
        }
    }
}

TEST_CASE("singular and ill-conditioned operators fail loudly") {
    const TimeGrid g = build_grid(1.0, 2.0, 8);
    BlockOperator N = BlockOperator::identity(g);
    Eigen::VectorXcd d = Eigen::VectorXcd::Ones(g.m);
    d[3] = 0.0;  // singular cell
    N.xx = Block::diagonal(d);
    CHECK_THROWS_AS(invert_N(N), SingularOperatorError);

    d[3] = 1e-12;  // condition estimate ~1e12 > default bound
    N.xx = Block::diagonal(d);
    try {
        invert_N(N);
        CHECK(false);
    } catch (const SingularOperatorError& e) {
        CHECK(e.condition_estimate > 1e10);
        CHECK(std::string(e.what()).find("condition estimate") != std::string::npos);
    }
}

TEST_CASE("spectrum of the windowed double integration") {
    const double l1_exact = 4.0 / (kPi * kPi);
    std::vector<double> errs;
    for (int m : {64, 256, 1024}) {
        const TimeGrid g = build_grid(1.0, 2.0, m);
        const SpectrumResult sr = spectrum_A(g, 1.0, 4);
        errs.push_back(std::abs(sr.eigenvalues[0] - l1_exact));
        for (int r = 1; r < sr.n_modes; ++r) {
            CHECK(sr.eigenvalues[r] > 0.0);
            CHECK(sr.eigenvalues[r] < sr.eigenvalues[r - 1]);
        }
        // quadrature normalization
        double norm = 0.0;
        for (int j = 0; j < g.m; ++j)
            norm += sr.eigenfunctions(j, 0) * sr.eigenfunctions(j, 0) * g.cell_width();
        CHECK(std::abs(norm - 1.0) < 1e-8);
    }
    CHECK(errs[0] / errs[1] == doctest::Approx(16.0).epsilon(0.25));
    CHECK(errs[1] / errs[2] == doctest::Approx(16.0).epsilon(0.25));

    // first eigenfunction matches sqrt(2/t) cos(pi s / (2t)) up to sign
    const TimeGrid g = build_grid(1.0, 2.0, 1024);
    const SpectrumResult sr = spectrum_A(g, 1.0, 1);
    double dev = 0.0;
    for (int j = 0; j < g.m; ++j) {
        if (!g.in_window(j)) continue;
        const double analytic = std::sqrt(2.0) * std::cos(kPi * g.center(j) / 2.0);
        dev = std::max(dev, std::abs(sr.eigenfunctions(j, 0) - analytic));
    }
    CHECK(dev < 1e-4);

    // k = 0 collapses the spectrum
    const SpectrumResult zero = spectrum_A(g, 0.0, 3);
    for (int r = 0; r < 3; ++r) CHECK(std::abs(zero.eigenvalues[r]) < 1e-14);

    CHECK_THROWS_AS(spectrum_A(g, 1.0, g.m / 2), PreconditionError);
}

TEST_CASE("determinant identity") {
    const TimeGrid g = build_grid(1.0, 2.0, 512);
    const BlockOperator K = make_K_free(g);

    // free case: identity determinant, both methods
    const BlockOperator L0 = BlockOperator::zero(g);
    CHECK(fredholm_det(K, L0, DetMethod::product) == Complex(1.0));
    CHECK(fredholm_det(K, L0, DetMethod::dense) == Complex(1.0));

    // sqrt(k) t = pi/3: determinant cos(pi/3) = 1/2
    const double k3 = kPi * kPi / 9.0;
    const Complex prod3 = fredholm_det(K, make_L_ho(g, k3), DetMethod::product);
    CHECK(std::abs(prod3 - 0.5) < 1e-3);
    CHECK(std::abs(1.0 / prod3 - 2.0) < 5e-3);

    // k = 1, t = 1: product and dense agree with cos(1)
    const BlockOperator L1 = make_L_ho(g, 1.0);
    const Complex prod = fredholm_det(K, L1, DetMethod::product, 10000);
    const Complex dense = fredholm_det(K, L1, DetMethod::dense);
    CHECK(std::abs(prod - std::cos(1.0)) / std::cos(1.0) < 1e-3);
    CHECK(std::abs(dense - std::cos(1.0)) / std::cos(1.0) < 1e-3);

    // non-harmonic L is rejected by the product route
    BlockOperator bad = BlockOperator::zero(g);
    bad.pp = Block::diagonal(Eigen::VectorXcd::Ones(g.m));
    CHECK_THROWS_AS(fredholm_det(K, bad, DetMethod::product), PreconditionError);
}

TEST_CASE("determinant vanishes at the caustic") {
    // k = 4, t = pi/4 puts the leading eigenvalue factor at zero
    const double t = kPi / 4.0;
    const TimeGrid g = build_grid(t, 2.0 * t, 128);
    const BlockOperator K = make_K_free(g);
    const BlockOperator L = make_L_ho(g, 4.0);
    CHECK_THROWS_AS(fredholm_det(K, L, DetMethod::product), VanishingDeterminantError);
}

TEST_CASE("truncated eigenvalue product reaches the cosine at 1e-3 for kt^2 <= 2") {
    for (double kt2 : {0.25, 1.0, 2.0}) {
        double logdet = 0.0;
        for (int n = 1; n <= 10000; ++n) {
            const double d = (n - 0.5) * kPi;
            logdet += std::log(1.0 - kt2 / (d * d));
        }
        const double target = std::cos(std::sqrt(kt2));
        CHECK(std::abs(std::exp(logdet) - target) / std::abs(target) < 1e-3);
    }
}
