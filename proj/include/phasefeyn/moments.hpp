#pragma once

#include <vector>

#include "phasefeyn/kernels.hpp"

namespace phasefeyn {

enum class MollifierFamily { gaussian, bump };

// Approximate-identity member: width shrinks as base_width / index. The
// gaussian family has effective support center +- 6 width; the bump family
// has compact support center +- 3 width.
struct Mollifier {
    MollifierFamily family = MollifierFamily::gaussian;
    int index = 1;
    double base_width = 0.02;
    double center = 0.0;

    double width() const { return base_width / index; }
    double support_radius() const;
};

// Mollifier sampled at cell centers, normalized to unit mass under midpoint
// quadrature, placed in one channel. The placement center overrides the
// mollifier's own center field.
PhaseFunction smeared_delta(const TimeGrid& grid, const Mollifier& mollifier, double center,
                            Channel channel);

// (-i)^order d^order/d lambda^order of T(f + lambda k) at 0, by central
// differences. h must lie in [1e-8, 1e-2].
Complex wick_derivative_oracle(const GaussKernelSpec& spec, const PhaseFunction& k,
                               const PhaseFunction& f, int order, double h);

// Closed-form first and second Wick moments of the integrand, i.e. the
// analytic lambda-derivatives of the master transform.
Complex moment1(const GaussKernelSpec& spec, const PhaseFunction& k, const PhaseFunction& f);
Complex moment2(const GaussKernelSpec& spec, const PhaseFunction& k, const PhaseFunction& h,
                const PhaseFunction& f);

// Parameters of one equal-time commutator evaluation: smeared momentum at
// s +- epsilon against position accumulated on [0, s).
struct CcrParams {
    double s = 0.5;
    double epsilon = 0.05;
    Mollifier mollifier;
    PhaseFunction f;

    // Enforces 0 < s - eps < s < s + eps < t, width < eps/4, and mollifier
    // support inside the grid.
    void validate(double t) const;
};

// T(<delta_{s+eps},.><1_[0,s),.> I0)(f) - T(<delta_{s-eps},.><1_[0,s),.> I0)(f)
// on the free spec pinned at (t, y).
Complex ccr_difference(const CcrParams& params, double t, double y = 0.0);

struct CcrPoint {
    double epsilon = 0.0;
    double width = 0.0;
    Complex value;
};

struct CcrLimitResult {
    Complex limit;
    double error_estimate = 0.0;
    std::vector<CcrPoint> points;
};

using CcrSchedule = std::vector<std::pair<double, double>>;  // (epsilon, width)

// Width shrinks at fixed epsilon faster than epsilon itself (growing
// eps/width ratio), matching the order of limits width -> 0 then eps -> 0.
CcrSchedule default_ccr_schedule(double s, double t);

// Evaluates the difference along the schedule; the last-step change is the
// error estimate.
CcrLimitResult ccr_limit(double s, double t, double y, const CcrSchedule& schedule, int m = 4096);

}  // namespace phasefeyn
