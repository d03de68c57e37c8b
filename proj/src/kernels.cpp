#include "phasefeyn/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace phasefeyn {

namespace {

constexpr Complex kI(0.0, 1.0);
constexpr double kVanishingDet = 1e-8;

GramResult classify_gram(const Eigen::MatrixXcd& M) {
    GramResult out;
    out.matrix = M;
    if (M.rows() == 0) {
        out.classification = GramClass::positive_real;
        return out;
    }
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    const double tol = 1e-10 * scale;
    const Eigen::MatrixXd re = M.real();
    const Eigen::MatrixXd im = M.imag();
    const bool re_zero = re.cwiseAbs().maxCoeff() <= tol;
    const bool im_zero = im.cwiseAbs().maxCoeff() <= tol;
    if (re_zero && !im_zero) {
        out.classification = GramClass::imaginary;
    } else if (!re_zero) {
        const Eigen::MatrixXd sym = 0.5 * (re + re.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
        out.classification = (es.eigenvalues().minCoeff() > -tol) ? GramClass::positive_real
                                                                  : GramClass::violated;
    } else {
        out.classification = GramClass::violated;
    }
    return out;
}

// u^T A^-1 v without conjugation, for small J.
Complex bilinear_quadratic(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& u,
                           const Eigen::VectorXcd& v) {
    const Eigen::VectorXcd w = A.lu().solve(v);
    return (u.transpose() * w)(0, 0);
}

}  // namespace

GaussKernelSpec::GaussKernelSpec(BlockOperator K, BlockOperator L, PhaseFunction g,
                                 std::vector<Pinning> pinnings, double cond_bound)
    : K_(std::move(K)), L_(std::move(L)), g_(std::move(g)), pinnings_(std::move(pinnings)) {
    if (!(K_.grid == L_.grid) || !(g_.grid() == K_.grid))
        throw PreconditionError("GaussKernelSpec: all members must share one grid");
    const int J = static_cast<int>(pinnings_.size());
    if (J > kMaxPinnings)
        throw PreconditionError("GaussKernelSpec: at most 8 pinnings supported");
    for (int i = 0; i < J; ++i) {
        const PhaseFunction& ei = pinnings_[i].eta;
        if (!(ei.grid() == K_.grid))
            throw PreconditionError("GaussKernelSpec: pinning grid mismatch");
        if (!ei.is_real(0.0))
            throw PreconditionError("GaussKernelSpec: pinning functions must be real");
        if (std::abs(bilinear_pair(ei, ei)) == 0.0)
            throw PreconditionError("GaussKernelSpec: pinning function " + std::to_string(i) +
                                    " is zero");
        for (int j = 0; j < i; ++j)
            if (std::abs(bilinear_pair(ei, pinnings_[j].eta)) > 1e-10)
                throw PreconditionError("GaussKernelSpec: pinning functions " + std::to_string(j) +
                                        " and " + std::to_string(i) + " are not orthogonal");
    }

    const BlockOperator N = assemble_N(K_, L_);
    solver_ = std::make_shared<BlockSolver>(N, cond_bound);

    eta_solutions_.reserve(J);
    Eigen::MatrixXcd M(J, J);
    for (int j = 0; j < J; ++j)
        eta_solutions_.push_back(solver_->solve(pinnings_[j].eta));
    for (int i = 0; i < J; ++i)
        for (int j = 0; j < J; ++j)
            M(i, j) = bilinear_pair(pinnings_[i].eta, eta_solutions_[j]);
    gram_ = classify_gram(M);

    // det(Id + L(Id+K)^-1) = det(N) / det(Id+K); reuses the factorization and
    // stays finite near the caustic so the spec itself can still be inspected.
    const bool l_zero = L_.xx.max_abs() == 0.0 && L_.xp.max_abs() == 0.0 &&
                        L_.px.max_abs() == 0.0 && L_.pp.max_abs() == 0.0;
    if (l_zero) {
        det_ = 1.0;
    } else {
        const BlockSolver idk(assemble_N(K_, BlockOperator::zero(K_.grid)), cond_bound);
        det_ = solver_->determinant() / idk.determinant();
    }
}

GaussKernelSpec make_free_spec(const TimeGrid& grid, double y) {
    return GaussKernelSpec(make_K_free(grid), BlockOperator::zero(grid), PhaseFunction::zero(grid),
                           {Pinning{indicator(grid, 0.0, grid.t_window, Channel::x), y}});
}

GaussKernelSpec make_ho_spec(const TimeGrid& grid, double y, double k) {
    return GaussKernelSpec(make_K_free(grid), make_L_ho(grid, k), PhaseFunction::zero(grid),
                           {Pinning{indicator(grid, 0.0, grid.t_window, Channel::x), y}});
}

GramResult pinning_gram(const GaussKernelSpec& spec) { return spec.gram(); }

TTransformResult master_t_transform(const GaussKernelSpec& spec, const PhaseFunction& f) {
    if (!(f.grid() == spec.grid()))
        throw PreconditionError("master_t_transform: argument grid mismatch");
    if (std::abs(spec.fredholm_determinant()) < kVanishingDet)
        throw VanishingDeterminantError(
            "master_t_transform: det(Id + L(Id+K)^-1) within 1e-8 of zero");
    const int J = spec.J();
    if (J > 0 && spec.gram().classification == GramClass::violated)
        throw GramViolationError(
            "master_t_transform: Gram matrix satisfies neither admissibility branch");

    TTransformResult res;
    res.det_factor = 1.0 / std::sqrt(spec.fredholm_determinant());
    res.gram = spec.gram().matrix;

    const PhaseFunction fg = f + spec.g();
    const PhaseFunction sol = spec.solver().solve(fg);
    res.quad_form = -0.5 * bilinear_pair(fg, sol);

    Complex u_term = 0.0;
    Complex gram_prefactor = 1.0;
    res.u.resize(J);
    if (J > 0) {
        Eigen::VectorXcd u_pin(J);
        for (int j = 0; j < J; ++j) {
            const Complex pairing = bilinear_pair(spec.pinnings()[j].eta, sol);
            u_pin[j] = kI * spec.pinnings()[j].y + pairing;
            res.u[j] = spec.pinnings()[j].y - kI * pairing;
        }
        const Complex detM = res.gram.determinant();
        if (!std::isfinite(std::abs(detM)) || std::abs(detM) < 1e-300)
            throw GramViolationError("master_t_transform: Gram matrix numerically singular");
        u_term = 0.5 * bilinear_quadratic(res.gram, u_pin, u_pin);
        gram_prefactor =
            std::pow(2.0 * std::numbers::pi, -0.5 * J) / std::sqrt(detM);
    }
    res.value = res.det_factor * gram_prefactor * std::exp(res.quad_form + u_term);
    return res;
}

Complex donsker_t_transform(const PhaseFunction& eta, double x, const PhaseFunction& f) {
    if (!eta.is_real(0.0))
        throw PreconditionError("donsker_t_transform: eta must be real");
    const Complex ee = bilinear_pair(eta, eta);
    if (!(ee.real() > 0.0))
        throw PreconditionError("donsker_t_transform: eta must be nonzero");
    const Complex ef = bilinear_pair(eta, f);
    const Complex ff = bilinear_pair(f, f);
    const Complex w = kI * ef - x;
    return 1.0 / std::sqrt(2.0 * std::numbers::pi * ee) * std::exp(-w * w / (2.0 * ee) - 0.5 * ff);
}

Complex nexp_t_transform(const BlockOperator& K, const PhaseFunction& f) {
    if (!(f.grid() == K.grid))
        throw PreconditionError("nexp_t_transform: grid mismatch");
    const BlockSolver solver(assemble_N(K, BlockOperator::zero(K.grid)));
    return std::exp(-0.5 * bilinear_pair(f, solver.solve(f)));
}

double gaussian_quadratic_expectation(const Eigen::MatrixXd& K_real) {
    if (K_real.rows() != K_real.cols())
        throw PreconditionError("gaussian_quadratic_expectation: matrix must be square");
    const double scale = std::max(1.0, K_real.cwiseAbs().maxCoeff());
    if ((K_real - K_real.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw PreconditionError("gaussian_quadratic_expectation: matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K_real);
    double prod = 1.0;
    for (int i = 0; i < K_real.rows(); ++i) {
        const double lam = es.eigenvalues()[i];
        if (!(lam > -0.5) || lam > 1e-12)
            throw PreconditionError("gaussian_quadratic_expectation: eigenvalue " +
                                    std::to_string(lam) + " outside (-1/2, 0]");
        prod *= 1.0 + 2.0 * lam;
    }
    return 1.0 / std::sqrt(prod);
}

RayCoefficients t_transform_ray_coefficients(const GaussKernelSpec& spec, const PhaseFunction& f) {
    if (!(f.grid() == spec.grid()))
        throw PreconditionError("t_transform_ray_coefficients: grid mismatch");
    const int J = spec.J();
    const PhaseFunction sol_f = spec.solver().solve(f);
    RayCoefficients out;
    out.quadratic = -0.5 * bilinear_pair(f, sol_f);
    out.linear = -bilinear_pair(sol_f, spec.g());
    if (J > 0) {
        Eigen::VectorXcd b(J), u0(J);
        const PhaseFunction sol_g = spec.solver().solve(spec.g());
        for (int j = 0; j < J; ++j) {
            b[j] = bilinear_pair(spec.pinnings()[j].eta, sol_f);
            u0[j] = kI * spec.pinnings()[j].y + bilinear_pair(spec.pinnings()[j].eta, sol_g);
        }
        out.quadratic += 0.5 * bilinear_quadratic(spec.gram().matrix, b, b);
        out.linear += bilinear_quadratic(spec.gram().matrix, b, u0);
    }
    return out;
}

}  // namespace phasefeyn
