#include "phasefeyn/propagators.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "phasefeyn/operators.hpp"

namespace phasefeyn {

namespace {

constexpr Complex kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

void check_duration(double t, double k) {
    if (!(t > 0.0))
        throw PreconditionError("duration must be positive");
    if (k < 0.0)
        throw PreconditionError("spring constant must be nonnegative");
    if (k > 0.0 && !(t < kPi / (2.0 * std::sqrt(k))))
        throw PreconditionError("duration must stay below pi/(2 sqrt(k))");
}

void check_window_matches(const TimeGrid& grid, double t) {
    if (std::abs(grid.t_window - t) > 1e-12 * std::max(1.0, t))
        throw PreconditionError("t must equal the grid window");
}

}  // namespace

void PropagatorParams::validate() const {
    if (y0 != 0.0)
        throw PreconditionError("PropagatorParams: start point is fixed at 0");
    check_duration(t, k);
}

Complex free_green(double y, double t) {
    check_duration(t, 0.0);
    return 1.0 / std::sqrt(2.0 * kPi * kI * t) * std::exp(-y * y / (2.0 * kI * t));
}

Complex ho_green(double y, double t, double k) {
    check_duration(t, k);
    if (k == 0.0) return free_green(y, t);
    const double sk = std::sqrt(k);
    return std::sqrt(sk / (2.0 * kPi * kI * std::sin(sk * t))) *
           std::exp(kI * sk / (2.0 * std::tan(sk * t)) * y * y);
}

Complex free_t_transform(const PhaseFunction& f, double y, double t) {
    const TimeGrid& grid = f.grid();
    check_window_matches(grid, t);
    const double w = grid.cell_width();
    Complex endpoint_sum = 0.0;  // int_0^t (f_x + f_p)
    Complex window_xx = 0.0;     // int_0^t f_x^2
    Complex window_xp = 0.0;     // int_0^t f_x f_p
    Complex off_window = 0.0;    // int over [t, t_total] of f_x^2 + f_p^2
    for (int j = 0; j < grid.m; ++j) {
        const Complex fx = f.x()[j], fp = f.p()[j];
        if (grid.in_window(j)) {
            endpoint_sum += fx + fp;
            window_xx += fx * fx;
            window_xp += fx * fp;
        } else {
            off_window += fx * fx + fp * fp;
        }
    }
    endpoint_sum *= w;
    window_xx *= w;
    window_xp *= w;
    off_window *= w;
    const Complex shifted = y + endpoint_sum;
    return 1.0 / std::sqrt(2.0 * kPi * kI * t) *
           std::exp(-shifted * shifted / (2.0 * kI * t) -
                    0.5 * (off_window + kI * window_xx + 2.0 * kI * window_xp));
}

Complex ho_t_transform(const PhaseFunction& f, double y, double t, double k) {
    const TimeGrid& grid = f.grid();
    check_window_matches(grid, t);
    check_duration(t, k);

    std::vector<int> win;
    for (int j = 0; j < grid.m; ++j)
        if (grid.in_window(j)) win.push_back(j);
    const int mw = static_cast<int>(win.size());
    if (mw == 0)
        throw PreconditionError("ho_t_transform: empty window");
    const double w = grid.cell_width();

    const Eigen::MatrixXd Afull = build_window_kernel_matrix(grid);
    Eigen::MatrixXcd B(mw, mw);
    for (int i = 0; i < mw; ++i)
        for (int j = 0; j < mw; ++j)
            B(i, j) = (i == j ? 1.0 : 0.0) - k * Afull(win[i], win[j]);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(B);
    const Complex det = lu.determinant();
    if (std::abs(det) < 1e-8)
        throw VanishingDeterminantError("ho_t_transform: resolvent determinant vanishes");

    Eigen::VectorXcd fx(mw), fp(mw), ones = Eigen::VectorXcd::Ones(mw);
    for (int i = 0; i < mw; ++i) {
        fx[i] = f.x()[win[i]];
        fp[i] = f.p()[win[i]];
    }
    const Eigen::VectorXcd r1 = lu.solve(ones);
    const Eigen::VectorXcd rfx = lu.solve(fx);
    const Eigen::VectorXcd rfp = lu.solve(fp);

    const Complex gram = kI * w * r1.sum();                       // pair(eta, N^-1 eta)
    const Complex smeared = w * (rfx.sum() + rfp.sum());          // <1, R (f_x + f_p)>
    Complex window_form = (fx.transpose() * rfx)(0, 0) + 2.0 * (fx.transpose() * rfp)(0, 0);
    if (k > 0.0) {
        Eigen::VectorXcd arfp(mw);
        for (int i = 0; i < mw; ++i) {
            Complex acc = 0.0;
            for (int j = 0; j < mw; ++j) acc += Afull(win[i], win[j]) * rfp[j];
            arfp[i] = acc;
        }
        window_form += k * (fp.transpose() * arfp)(0, 0);
    }
    window_form *= kI * w;

    Complex off_window = 0.0;
    for (int j = 0; j < grid.m; ++j)
        if (!grid.in_window(j))
            off_window += f.x()[j] * f.x()[j] + f.p()[j] * f.p()[j];
    off_window *= w;

    const Complex u = kI * (y + smeared);
    return std::pow(2.0 * kPi, -0.5) / std::sqrt(gram) / std::sqrt(det) *
           std::exp(0.5 * u * u / gram - 0.5 * (off_window + window_form));
}

Complex complex_gauss_integral(Complex a, Complex b) {
    if (a.real() > 0.0 || (a.real() == 0.0 && a.imag() == 0.0))
        throw PreconditionError(
            "complex_gauss_integral: need Re(a) < 0, or Re(a) = 0 with Im(a) != 0");
    return std::sqrt(kPi / (-a)) * std::exp(-b * b / (4.0 * a));
}

Complex GaussianKernel1D::eval(double y, double y0) const {
    return amplitude * std::exp(a * y * y + b * y * y0 + c * y0 * y0);
}

GaussianKernel1D compose_kernels(const GaussianKernel1D& later, const GaussianKernel1D& earlier) {
    const Complex alpha = later.c + earlier.a;
    const Complex gauss = complex_gauss_integral(alpha, Complex(0.0));
    GaussianKernel1D out;
    out.amplitude = later.amplitude * earlier.amplitude * gauss;
    out.a = later.a - later.b * later.b / (4.0 * alpha);
    out.b = -later.b * earlier.b / (2.0 * alpha);
    out.c = earlier.c - earlier.b * earlier.b / (4.0 * alpha);
    return out;
}

GaussianKernel1D free_slice_kernel(double eps) {
    GaussianKernel1D kern;
    kern.amplitude = 1.0 / std::sqrt(2.0 * kPi * kI * eps);
    kern.a = kern.c = kI / (2.0 * eps);
    kern.b = -kI / eps;
    return kern;
}

GaussianKernel1D ho_slice_kernel(double eps, double k) {
    GaussianKernel1D kern = free_slice_kernel(eps);
    const Complex pot = -kI * eps * k / 4.0;
    kern.a += pot;
    kern.c += pot;
    return kern;
}

GaussianKernel1D free_two_point_kernel(double t) {
    GaussianKernel1D kern;
    kern.amplitude = 1.0 / std::sqrt(2.0 * kPi * kI * t);
    kern.a = kern.c = kI / (2.0 * t);
    kern.b = -kI / t;
    return kern;
}

GaussianKernel1D mehler_two_point_kernel(double t, double k) {
    if (k == 0.0) return free_two_point_kernel(t);
    check_duration(t, k);
    const double sk = std::sqrt(k);
    const double s = std::sin(sk * t), c = std::cos(sk * t);
    GaussianKernel1D kern;
    kern.amplitude = std::sqrt(sk / (2.0 * kPi * kI * s));
    kern.a = kern.c = kI * sk * c / (2.0 * s);
    kern.b = -kI * sk / s;
    return kern;
}

Complex time_slice_oracle(double y, double t, double k, int n_slices) {
    if (n_slices < 1)
        throw PreconditionError("time_slice_oracle: need at least one slice");
    check_duration(t, k);
    const double eps = t / n_slices;
    const GaussianKernel1D slice =
        (k == 0.0) ? free_slice_kernel(eps) : ho_slice_kernel(eps, k);
    // composition is associative, so square instead of chaining linearly;
    // the cancellation in the coefficient recursion then grows with log(n)
    // rather than n and stays below 1e-13 even for thousands of slices
    GaussianKernel1D total;
    bool have = false;
    GaussianKernel1D sq = slice;
    for (int bits = n_slices; bits != 0; bits >>= 1) {
        if (bits & 1) {
            total = have ? compose_kernels(sq, total) : sq;
            have = true;
        }
        if (bits > 1) sq = compose_kernels(sq, sq);
    }
    return total.eval(y, 0.0);
}

double schrodinger_residual(GreenKind kind, const std::vector<double>& ys,
                            const std::vector<double>& ts, double k, double h_y, double h_t,
                            PotentialSign sign) {
    const double keff = (kind == GreenKind::free) ? 0.0 : k;
    auto G = [&](double y, double t) {
        return kind == GreenKind::free ? free_green(y, t) : ho_green(y, t, k);
    };
    const double pot_sign = (sign == PotentialSign::flipped) ? -1.0 : 1.0;
    double worst = 0.0;
    for (double t : ts) {
        if (!(t >= 0.1))
            throw PreconditionError("schrodinger_residual: t must stay away from 0 (t >= 0.1)");
        check_duration(t + h_t, keff);
        for (double y : ys) {
            const Complex dt = (G(y, t + h_t) - G(y, t - h_t)) / (2.0 * h_t);
            const Complex dyy =
                (G(y + h_y, t) - 2.0 * G(y, t) + G(y - h_y, t)) / (h_y * h_y);
            const Complex resid =
                kI * dt + 0.5 * dyy - pot_sign * 0.5 * keff * y * y * G(y, t);
            worst = std::max(worst, std::abs(resid) / std::max(std::abs(dt), 1e-30));
        }
    }
    return worst;
}

std::pair<Complex, Complex> compose_check(double t1, double t2, double k, double y0, double y) {
    check_duration(t1, k);
    check_duration(t2, k);
    check_duration(t1 + t2, k);
    const GaussianKernel1D first =
        (k == 0.0) ? free_two_point_kernel(t1) : mehler_two_point_kernel(t1, k);
    const GaussianKernel1D second =
        (k == 0.0) ? free_two_point_kernel(t2) : mehler_two_point_kernel(t2, k);
    const GaussianKernel1D direct =
        (k == 0.0) ? free_two_point_kernel(t1 + t2) : mehler_two_point_kernel(t1 + t2, k);
    const GaussianKernel1D composed = compose_kernels(second, first);
    return {composed.eval(y, y0), direct.eval(y, y0)};
}

}  // namespace phasefeyn
