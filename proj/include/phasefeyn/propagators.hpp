#pragma once

#include <utility>
#include <vector>

#include "phasefeyn/grid.hpp"

namespace phasefeyn {

// Endpoint/duration/spring data for the closed-form propagators. The start
// point is fixed at the origin; for k > 0 the valid window is
// 0 < t < pi/(2 sqrt(k)).
struct PropagatorParams {
    double y0 = 0.0;
    double y = 0.0;
    double t = 1.0;
    double k = 0.0;
    void validate() const;
};

// Generating functional of the free integrand evaluated directly from its
// explicit window integrals (midpoint quadrature). t must equal the grid
// window.
Complex free_t_transform(const PhaseFunction& f, double y, double t);

// Generating functional of the harmonic integrand, evaluated in the window
// representation: every resolvent-derived scalar (determinant prefactor,
// pinning coefficient, smeared endpoint pairing, window quadratic form) comes
// from the discretized resolvent (1 - kA)^-1 on [0,t), solved window-sized.
Complex ho_t_transform(const PhaseFunction& f, double y, double t, double k);

// Green's functions (generalized expectations) in closed form; principal
// square roots throughout, so the free phase factor is exp(-i pi/4).
Complex free_green(double y, double t);
Complex ho_green(double y, double t, double k);

// int exp(a z^2 + b z) dz = sqrt(pi/(-a)) exp(-b^2/(4a)) for Re(a) < 0, or
// Re(a) = 0 with Im(a) != 0 (Fresnel case, regulated limit).
Complex complex_gauss_integral(Complex a, Complex b);

// amplitude * exp(a y^2 + b y y0 + c y0^2)
struct GaussianKernel1D {
    Complex amplitude{1.0, 0.0};
    Complex a{0.0, 0.0};
    Complex b{0.0, 0.0};
    Complex c{0.0, 0.0};

    Complex eval(double y, double y0) const;
};

// Exact Gaussian composition over the intermediate variable; coefficients
// recurse in closed form, no spatial grid.
GaussianKernel1D compose_kernels(const GaussianKernel1D& later, const GaussianKernel1D& earlier);

// Short-time kernels for step eps: the free kernel is exact; the harmonic
// slice applies the symmetric midpoint potential factor
// exp(-i eps k (y^2 + y0^2)/4), giving second-order Trotter error.
GaussianKernel1D free_slice_kernel(double eps);
GaussianKernel1D ho_slice_kernel(double eps, double k);

// Two-point propagator kernels used by the composition check.
GaussianKernel1D free_two_point_kernel(double t);
GaussianKernel1D mehler_two_point_kernel(double t, double k);

// Composes n_slices short-time kernels and evaluates at (y, y0 = 0). Exact
// for k = 0 at any n.
Complex time_slice_oracle(double y, double t, double k, int n_slices);

enum class GreenKind { free, ho };
enum class PotentialSign { physical, flipped };

// Max over the (y, t) grid of |i dG/dt + 1/2 d2G/dy2 - 1/2 k y^2 G| relative
// to |dG/dt|, central differences with steps h_y, h_t. The flipped sign is a
// negative control.
double schrodinger_residual(GreenKind kind, const std::vector<double>& ys,
                            const std::vector<double>& ts, double k, double h_y, double h_t,
                            PotentialSign sign = PotentialSign::physical);

// Semigroup check: (composed over the intermediate point, direct at t1+t2).
std::pair<Complex, Complex> compose_check(double t1, double t2, double k, double y0, double y);

}  // namespace phasefeyn
