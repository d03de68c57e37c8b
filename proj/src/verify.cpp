#include "phasefeyn/verify.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "phasefeyn/extrapolation.hpp"
#include "phasefeyn/propagators.hpp"
#include "phasefeyn/random.hpp"

namespace phasefeyn {

namespace {

constexpr Complex kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

std::string fmt_complex(Complex v) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.12g%+.12gi", v.real(), v.imag());
    return buf;
}

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Truncated eigenvalue sum for pair(eta, N^-1 eta) of the harmonic kernel:
// sum_n 2t / ((n - 1/2)^2 pi^2 - k t^2), times i.
Complex tan_series(double k, double t, int n_terms) {
    double acc = 0.0;
    for (int n = n_terms; n >= 1; --n) {
        const double d = (n - 0.5) * kPi;
        acc += 2.0 * t / (d * d - k * t * t);
    }
    return kI * acc;
}

}  // namespace

CheckResult check_close(const std::string& name, const std::string& module,
                        const std::string& operation, Complex observed, Complex expected,
                        double tolerance, bool relative) {
    CheckResult r;
    r.name = name;
    r.module = module;
    r.operation = operation;
    r.observed = fmt_complex(observed);
    r.expected = fmt_complex(expected);
    double err = std::abs(observed - expected);
    if (relative && std::abs(expected) > 0.0) err /= std::abs(expected);
    r.error = err;
    r.tolerance = tolerance;
    r.pass = err <= tolerance;
    return r;
}

CheckResult check_bound(const std::string& name, const std::string& module,
                        const std::string& operation, double observed, double bound) {
    CheckResult r;
    r.name = name;
    r.module = module;
    r.operation = operation;
    r.observed = fmt_double(observed);
    r.expected = "<= " + fmt_double(bound);
    r.error = observed;
    r.tolerance = bound;
    r.pass = observed <= bound;
    return r;
}

Complex mixed_wick_oracle(const GaussKernelSpec& spec, const PhaseFunction& k,
                          const PhaseFunction& h, const PhaseFunction& f, double step) {
    const PhaseFunction kp = k * step, hp = h * step;
    const Complex pp = master_t_transform(spec, f + kp + hp).value;
    const Complex pm = master_t_transform(spec, f + kp - hp).value;
    const Complex mp = master_t_transform(spec, f - kp + hp).value;
    const Complex mm = master_t_transform(spec, f - kp - hp).value;
    return -(pp - pm - mp + mm) / (4.0 * step * step);
}

std::vector<CheckResult> verify_identities(int m, std::uint64_t seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    m = std::max(64, m + (m % 2));  // aligned window edge; exact free-case identities

    // determinant identity, product and dense routes vs cos(sqrt(k) t)
    for (double k : {0.25, 1.0, 2.0}) {
        const TimeGrid grid = build_grid(1.0, 2.0, std::min(m, 512));
        const BlockOperator K = make_K_free(grid);
        const BlockOperator L = make_L_ho(grid, k);
        const Complex target = std::cos(std::sqrt(k) * grid.t_window);
        out.push_back(check_close("cos-product k=" + fmt_double(k), "operators", "fredholm_det",
                                  fredholm_det(K, L, DetMethod::product), target, 1e-3, true));
        out.push_back(check_close("cos-dense k=" + fmt_double(k), "operators", "fredholm_det",
                                  fredholm_det(K, L, DetMethod::dense), target, 1e-3, true));
    }

    // tan sum vs closed form
    out.push_back(check_close("tan-sum k=1 t=1", "operators", "spectrum_A",
                              tan_series(1.0, 1.0, 10000), kI * std::tan(1.0), 1e-3, true));

    // free inverse block pattern
    {
        const TimeGrid grid = build_grid(1.0, 2.0, std::min(m, 256));
        const BlockOperator Ninv =
            invert_N(assemble_N(make_K_free(grid), BlockOperator::zero(grid)));
        double dev = 0.0;
        for (int j = 0; j < grid.m; ++j) {
            const bool in = grid.in_window(j);
            dev = std::max(dev, std::abs(Ninv.xx.entry(j, j) - (in ? kI : Complex(1.0))));
            dev = std::max(dev, std::abs(Ninv.xp.entry(j, j) - (in ? kI : Complex(0.0))));
            dev = std::max(dev, std::abs(Ninv.px.entry(j, j) - (in ? kI : Complex(0.0))));
            dev = std::max(dev, std::abs(Ninv.pp.entry(j, j) - (in ? Complex(0.0) : Complex(1.0))));
        }
        out.push_back(check_bound("free inverse block pattern", "operators", "invert_N", dev, 1e-8));
    }

    // pairing identity with Richardson extrapolation over a 4x mesh ladder
    {
        std::vector<Complex> vals;
        for (int mm : {m / 16, m / 4, m}) {
            const TimeGrid grid = build_grid(1.0, 2.0, mm);
            const GaussKernelSpec spec = make_ho_spec(grid, 0.0, 1.0);
            vals.push_back(spec.gram().matrix(0, 0));
        }
        Complex ext = vals.back();
        if (vals.size() >= 2) {
            // 4x refinement at second order: weight 16
            ext = (16.0 * vals[2] - vals[1]) / 15.0;
        }
        out.push_back(check_close("pairing identity (HO, extrapolated)", "operators", "invert_N",
                                  ext, kI * std::tan(1.0), 1e-6, true));
        const TimeGrid grid = build_grid(1.0, 2.0, m);
        const GaussKernelSpec free_spec = make_free_spec(grid, 0.0);
        out.push_back(check_close("pairing identity (free)", "operators", "invert_N",
                                  free_spec.gram().matrix(0, 0), kI * grid.t_window, 1e-12, false));
    }

    // reduction chain on seeded random inputs
    {
        const TimeGrid grid = build_grid(1.0, 2.0, std::min(m, 256));
        const GaussKernelSpec free_spec = make_free_spec(grid, 0.7);
        const PhaseFunction f = random_smooth_phase_function(grid, rng);

        // Donsker specialization: K = L = 0, one pinning
        const PhaseFunction eta = indicator(grid, 0.0, grid.t_window, Channel::x);
        const GaussKernelSpec flat(BlockOperator::zero(grid), BlockOperator::zero(grid),
                                   PhaseFunction::zero(grid), {Pinning{eta, 0.45}});
        out.push_back(check_close("reduction: Donsker", "kernels", "master_t_transform",
                                  master_t_transform(flat, f).value,
                                  donsker_t_transform(eta, 0.45, f), 1e-12, true));

        // Nexp specialization: J = 0, L = 0
        const GaussKernelSpec nexp_spec(make_K_free(grid), BlockOperator::zero(grid),
                                        PhaseFunction::zero(grid), {});
        out.push_back(check_close("reduction: Nexp", "kernels", "master_t_transform",
                                  master_t_transform(nexp_spec, f).value,
                                  nexp_t_transform(make_K_free(grid), f), 1e-12, true));

        // two-factor product: J = 0, g = 0, L harmonic
        const GaussKernelSpec prod_spec(make_K_free(grid), make_L_ho(grid, 1.0),
                                        PhaseFunction::zero(grid), {});
        const Complex direct = 1.0 / std::sqrt(prod_spec.fredholm_determinant()) *
                               std::exp(-0.5 * bilinear_pair(f, prod_spec.solver().solve(f)));
        out.push_back(check_close("reduction: two-factor product", "kernels", "master_t_transform",
                                  master_t_transform(prod_spec, f).value, direct, 1e-12, true));

        // source-shift law
        const PhaseFunction g = random_smooth_phase_function(grid, rng);
        const GaussKernelSpec sourced(make_K_free(grid), BlockOperator::zero(grid), g,
                                      {Pinning{eta, 0.7}});
        out.push_back(check_close("source-shift law", "kernels", "master_t_transform",
                                  master_t_transform(sourced, f).value,
                                  master_t_transform(free_spec, f + g).value, 1e-12, true));

        // bracket symmetry: pair(eta, N^-1 v) vs pair(N^-1 eta, v)
        const GaussKernelSpec ho_spec = make_ho_spec(grid, 0.7, 1.0);
        const PhaseFunction sol = ho_spec.solver().solve(f);
        out.push_back(check_close("bracket symmetry", "kernels", "master_t_transform",
                                  bilinear_pair(ho_spec.pinnings()[0].eta, sol),
                                  bilinear_pair(ho_spec.eta_solution(0), f), 1e-12, false));

        // closed form vs master, free and harmonic
        out.push_back(check_close("closed form vs master (free)", "propagators",
                                  "free_t_transform", free_t_transform(f, 0.7, grid.t_window),
                                  master_t_transform(free_spec, f).value, 1e-8, true));
        out.push_back(check_close("closed form vs master (harmonic)", "propagators",
                                  "ho_t_transform", ho_t_transform(f, 0.7, grid.t_window, 1.0),
                                  master_t_transform(ho_spec, f).value, 1e-8, true));
    }

    return out;
}

std::vector<CheckResult> verify_moments(int m, std::uint64_t seed, int n_cases) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    const TimeGrid grid = build_grid(1.0, 2.0, std::min(m, 400));
    const GaussKernelSpec free_spec = make_free_spec(grid, 0.6);
    const GaussKernelSpec ho_spec = make_ho_spec(grid, 0.6, 1.0);
    for (int c = 0; c < n_cases; ++c) {
        const GaussKernelSpec& spec = (c % 2 == 0) ? free_spec : ho_spec;
        const char* tag = (c % 2 == 0) ? "free" : "ho";
        const PhaseFunction k = random_smooth_phase_function(grid, rng);
        const PhaseFunction h = random_smooth_phase_function(grid, rng);
        const PhaseFunction f = random_smooth_phase_function(grid, rng);
        out.push_back(check_close(
            "moment1 vs oracle #" + std::to_string(c) + " (" + tag + ")", "moments", "moment1",
            moment1(spec, k, f), wick_derivative_oracle(spec, k, f, 1, 1e-4), 1e-6, false));
        out.push_back(check_close(
            "moment2 vs oracle #" + std::to_string(c) + " (" + tag + ")", "moments", "moment2",
            moment2(spec, k, h, f), mixed_wick_oracle(spec, k, h, f, 1e-3), 1e-5, false));
        out.push_back(check_close("moment2 symmetry #" + std::to_string(c), "moments", "moment2",
                                  moment2(spec, k, h, f), moment2(spec, h, k, f), 1e-12, false));
    }
    return out;
}

std::vector<CheckResult> verify_ccr(double s, double t, double y, int m) {
    std::vector<CheckResult> out;
    const CcrLimitResult res = ccr_limit(s, t, y, default_ccr_schedule(s, t), m);
    const Complex target = -kI * free_green(y, t);
    out.push_back(check_close("ccr limit s=" + fmt_double(s), "moments", "ccr_limit", res.limit,
                              target, 1e-3, false));
    for (size_t i = 1; i < res.points.size(); ++i) {
        const double prev = std::abs(res.points[i - 1].value - target);
        const double curr = std::abs(res.points[i].value - target);
        out.push_back(check_bound("ccr monotone step " + std::to_string(i), "moments",
                                  "ccr_difference", prev > 0.0 ? curr / prev : 0.0, 1.0));
    }
    return out;
}

std::vector<CheckResult> verify_growth(int m, std::uint64_t seed, int n_fields) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    const TimeGrid grid = build_grid(1.0, 2.0, std::min(m, 256));
    const GaussKernelSpec free_spec = make_free_spec(grid, 0.5);
    const GaussKernelSpec ho_spec = make_ho_spec(grid, 0.5, 1.0);
    const std::pair<const GaussKernelSpec*, const char*> specs[] = {{&free_spec, "free"},
                                                                    {&ho_spec, "ho"}};
    for (const auto& [spec, tag] : specs) {
        const Complex T0 = master_t_transform(*spec, PhaseFunction::zero(grid)).value;
        double worst_excess = 0.0;
        double worst_mean_dev = 0.0;
        for (int c = 0; c < n_fields; ++c) {
            const PhaseFunction f = random_smooth_phase_function(grid, rng);
            const RayCoefficients rc = t_transform_ray_coefficients(*spec, f);
            for (int ir = 1; ir <= 5; ++ir) {
                const double r = 2.0 * ir;
                for (int ia = 0; ia < 8; ++ia) {
                    const double th = 2.0 * kPi * ia / 8.0;
                    const Complex z = std::polar(r, th);
                    const double lhs = std::abs(master_t_transform(*spec, f * z).value);
                    const double rhs = std::abs(T0) * std::exp(std::abs(rc.quadratic) * r * r +
                                                               std::abs(rc.linear) * r);
                    worst_excess = std::max(worst_excess, lhs / rhs - 1.0);
                }
            }
            // ray analyticity proxy: mean value over a small circle
            const Complex center(0.3, 0.1);
            const double rho = 0.2;
            Complex avg = 0.0;
            const int npts = 32;
            for (int q = 0; q < npts; ++q) {
                const Complex lam = center + std::polar(rho, 2.0 * kPi * q / npts);
                avg += master_t_transform(*spec, f * lam).value;
            }
            avg /= static_cast<double>(npts);
            const Complex mid = master_t_transform(*spec, f * center).value;
            worst_mean_dev = std::max(worst_mean_dev, std::abs(avg - mid) / std::abs(mid));
        }
        out.push_back(check_bound(std::string("growth bound (") + tag + ")", "kernels",
                                  "master_t_transform", worst_excess, 1e-10));
        out.push_back(check_bound(std::string("ray mean value (") + tag + ")", "kernels",
                                  "master_t_transform", worst_mean_dev, 1e-8));
    }
    return out;
}

}  // namespace phasefeyn
