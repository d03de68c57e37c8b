#include "phasefeyn/moments.hpp"

#include <algorithm>
#include <cmath>

#include "phasefeyn/parallel.hpp"

namespace phasefeyn {

namespace {

constexpr Complex kI(0.0, 1.0);

struct MomentContext {
    const GaussKernelSpec& spec;
    PhaseFunction sol_fg;       // N^-1 (f+g)
    Eigen::VectorXcd u_pin;   // i y_j + pair(eta_j, N^-1(f+g))

    MomentContext(const GaussKernelSpec& s, const PhaseFunction& f)
        : spec(s), sol_fg(s.solver().solve(f + s.g())), u_pin(s.J()) {
        for (int j = 0; j < s.J(); ++j)
            u_pin[j] = kI * s.pinnings()[j].y + bilinear_pair(s.pinnings()[j].eta, sol_fg);
    }

    // pair(eta_j, N^-1 v), via the cached eta solutions (N is bilinear-symmetric).
    Eigen::VectorXcd eta_bracket(const PhaseFunction& v) const {
        Eigen::VectorXcd b(spec.J());
        for (int j = 0; j < spec.J(); ++j)
            b[j] = bilinear_pair(spec.eta_solution(j), v);
        return b;
    }

    Complex gram_form(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const {
        if (spec.J() == 0) return 0.0;
        const Eigen::VectorXcd w = spec.gram().matrix.lu().solve(b);
        return (a.transpose() * w)(0, 0);
    }

    // pair(f+g, N^-1 v) - <eta, N^-1 v>^T M^-1 u
    Complex first_bracket(const PhaseFunction& v) const {
        return bilinear_pair(sol_fg, v) - gram_form(eta_bracket(v), u_pin);
    }
};

void check_real_argument(const PhaseFunction& v, const char* who) {
    if (!v.is_real(0.0))
        throw PreconditionError(std::string(who) + ": smearing argument must be real");
}

}  // namespace

double Mollifier::support_radius() const {
    return (family == MollifierFamily::gaussian) ? 6.0 * width() : 3.0 * width();
}

PhaseFunction smeared_delta(const TimeGrid& grid, const Mollifier& mollifier, double center,
                            Channel channel) {
    if (mollifier.index < 1 || !(mollifier.base_width > 0.0))
        throw PreconditionError("smeared_delta: invalid mollifier");
    const double w = mollifier.width();
    const double r = (mollifier.family == MollifierFamily::gaussian) ? 6.0 * w : 3.0 * w;
    if (center - r < 0.0 || center + r > grid.t_total)
        throw PreconditionError("smeared_delta: mollifier support leaks outside the grid");

    Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.m);
    for (int j = 0; j < grid.m; ++j) {
        const double u = (grid.center(j) - center) / w;
        if (mollifier.family == MollifierFamily::gaussian) {
            v[j] = std::exp(-0.5 * u * u);
        } else {
            const double q = u / 3.0;  // compact support radius 3w
            if (std::abs(q) < 1.0) v[j] = std::exp(-1.0 / (1.0 - q * q));
        }
    }
    const double mass = v.sum() * grid.cell_width();
    if (!(mass > 0.0))
        throw PreconditionError("smeared_delta: grid too coarse to resolve the mollifier");
    v /= mass;

    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(grid.m);
    if (channel == Channel::x)
        return PhaseFunction(grid, v.cast<Complex>(), zero);
    return PhaseFunction(grid, zero, v.cast<Complex>());
}

Complex wick_derivative_oracle(const GaussKernelSpec& spec, const PhaseFunction& k,
                               const PhaseFunction& f, int order, double h) {
    if (order != 1 && order != 2)
        throw PreconditionError("wick_derivative_oracle: order must be 1 or 2");
    if (!(h >= 1e-8 && h <= 1e-2))
        throw PreconditionError("wick_derivative_oracle: step h outside [1e-8, 1e-2]");
    check_real_argument(k, "wick_derivative_oracle");
    const Complex plus = master_t_transform(spec, f + k * h).value;
    const Complex minus = master_t_transform(spec, f - k * h).value;
    if (order == 1) return -kI * (plus - minus) / (2.0 * h);
    const Complex center = master_t_transform(spec, f).value;
    return -(plus - 2.0 * center + minus) / (h * h);
}

Complex moment1(const GaussKernelSpec& spec, const PhaseFunction& k, const PhaseFunction& f) {
    check_real_argument(k, "moment1");
    const MomentContext ctx(spec, f);
    const Complex Tf = master_t_transform(spec, f).value;
    return kI * Tf * ctx.first_bracket(k);
}

Complex moment2(const GaussKernelSpec& spec, const PhaseFunction& k, const PhaseFunction& h,
                const PhaseFunction& f) {
    check_real_argument(k, "moment2");
    check_real_argument(h, "moment2");
    const MomentContext ctx(spec, f);
    const Complex Tf = master_t_transform(spec, f).value;
    const PhaseFunction sol_h = spec.solver().solve(h);
    const Complex pair_kh = bilinear_pair(k, sol_h);
    const Complex cross = ctx.gram_form(ctx.eta_bracket(h), ctx.eta_bracket(k));
    return Tf * (pair_kh - cross - ctx.first_bracket(h) * ctx.first_bracket(k));
}

void CcrParams::validate(double t) const {
    if (!(0.0 < s - epsilon && s < s + epsilon && s + epsilon < t))
        throw PreconditionError("CcrParams: need 0 < s - eps < s < s + eps < t");
    if (!(mollifier.width() < epsilon / 4.0))
        throw PreconditionError("CcrParams: mollifier width must stay below eps/4");
    const TimeGrid& grid = f.grid();
    const double r = mollifier.support_radius();
    if (s - epsilon - r < 0.0 || s + epsilon + r > grid.t_total)
        throw PreconditionError("CcrParams: mollifier support leaks outside the grid");
}

Complex ccr_difference(const CcrParams& params, double t, double y) {
    params.validate(t);
    const TimeGrid& grid = params.f.grid();
    if (std::abs(grid.t_window - t) > 1e-12 * std::max(1.0, t))
        throw PreconditionError("ccr_difference: t must equal the grid window");
    const GaussKernelSpec spec = make_free_spec(grid, y);
    const PhaseFunction h = indicator(grid, 0.0, params.s, Channel::x);
    const PhaseFunction k_plus =
        smeared_delta(grid, params.mollifier, params.s + params.epsilon, Channel::p);
    const PhaseFunction k_minus =
        smeared_delta(grid, params.mollifier, params.s - params.epsilon, Channel::p);
    return moment2(spec, k_plus, h, params.f) - moment2(spec, k_minus, h, params.f);
}

CcrSchedule default_ccr_schedule(double s, double t) {
    const double eps0 = std::min(0.1, 0.45 * std::min(s, t - s));
    CcrSchedule sched;
    for (int j = 0; j < 3; ++j) {
        const double eps = eps0 / (1 << j);
        sched.emplace_back(eps, eps / (5.0 + j));
    }
    return sched;
}

CcrLimitResult ccr_limit(double s, double t, double y, const CcrSchedule& schedule, int m) {
    if (schedule.empty())
        throw PreconditionError("ccr_limit: empty schedule");
    for (size_t i = 0; i < schedule.size(); ++i) {
        const auto& [eps, width] = schedule[i];
        if (!(width < eps / 4.0))
            throw PreconditionError("ccr_limit: schedule width must stay below eps/4");
        if (i > 0 && !(eps < schedule[i - 1].first))
            throw PreconditionError("ccr_limit: schedule must be monotone decreasing");
    }
    const TimeGrid grid = build_grid(t, 2.0 * t, m);
    const PhaseFunction f0 = PhaseFunction::zero(grid);

    CcrLimitResult out;
    out.points.resize(schedule.size());
    par::for_index(static_cast<int>(schedule.size()), [&](int i) {
        const auto& [eps, width] = schedule[i];
        CcrParams params{s, eps, Mollifier{MollifierFamily::gaussian, 1, width, s}, f0};
        out.points[i] = CcrPoint{eps, width, ccr_difference(params, t, y)};
    });
    out.limit = out.points.back().value;
    out.error_estimate = out.points.size() > 1
                             ? std::abs(out.points.back().value -
                                        out.points[out.points.size() - 2].value)
                             : std::abs(out.limit);
    return out;
}

}  // namespace phasefeyn
