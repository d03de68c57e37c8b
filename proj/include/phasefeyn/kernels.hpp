#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "phasefeyn/operators.hpp"

namespace phasefeyn {

// Admissibility of the pinning Gram matrix M = [ pair(eta_i, N^-1 eta_j) ]:
// either Re(M) positive definite, or Re(M) = 0 with Im(M) != 0. Anything
// else is out of scope of the closed-form transform.
enum class GramClass { positive_real, imaginary, violated };

struct GramResult {
    Eigen::MatrixXcd matrix;
    GramClass classification = GramClass::violated;
};

struct Pinning {
    PhaseFunction eta;  // real, nonzero; pairwise orthogonal across pinnings
    double y = 0.0;
};

// Full integrand descriptor: Gauss kernel operators K and L, linear source g,
// and an ordered pinning list. Construction assembles and factorizes
// N = Id + K + L, caches N^-1 eta_j, the Gram matrix with classification and
// det(Id + L(Id+K)^-1); everything is immutable afterwards, so concurrent
// evaluation is safe.
class GaussKernelSpec {
  public:
    static constexpr int kMaxPinnings = 8;

    GaussKernelSpec(BlockOperator K, BlockOperator L, PhaseFunction g,
                    std::vector<Pinning> pinnings, double cond_bound = 1e10);

    const TimeGrid& grid() const { return K_.grid; }
    const BlockOperator& K() const { return K_; }
    const BlockOperator& L() const { return L_; }
    const PhaseFunction& g() const { return g_; }
    const std::vector<Pinning>& pinnings() const { return pinnings_; }
    int J() const { return static_cast<int>(pinnings_.size()); }

    const BlockSolver& solver() const { return *solver_; }
    const PhaseFunction& eta_solution(int j) const { return eta_solutions_[j]; }
    const GramResult& gram() const { return gram_; }
    Complex fredholm_determinant() const { return det_; }

  private:
    BlockOperator K_, L_;
    PhaseFunction g_;
    std::vector<Pinning> pinnings_;
    std::shared_ptr<const BlockSolver> solver_;
    std::vector<PhaseFunction> eta_solutions_;
    GramResult gram_;
    Complex det_;
};

// Canonical specs used throughout: free kinetic kernel (L = 0) and the
// harmonic kernel, both pinned by (1_[0,t), 0) at height y.
GaussKernelSpec make_free_spec(const TimeGrid& grid, double y);
GaussKernelSpec make_ho_spec(const TimeGrid& grid, double y, double k);

// Evaluation record. The reassembly identity
//   value = det_factor * (2pi)^{-J/2} det(gram)^{-1/2}
//           * exp(quad_form) * exp(-1/2 u^T gram^-1 u)
// holds exactly, with u_j = y_j - i * pair(eta_j, N^-1 (f+g)).
struct TTransformResult {
    Complex value;
    Complex det_factor;      // det(Id + L(Id+K)^-1)^{-1/2}, principal branch
    Eigen::MatrixXcd gram;   // J x J
    Eigen::VectorXcd u;      // J entries
    Complex quad_form;       // -1/2 pair(f+g, N^-1 (f+g))
};

GramResult pinning_gram(const GaussKernelSpec& spec);

TTransformResult master_t_transform(const GaussKernelSpec& spec, const PhaseFunction& f);

// T-transform of Donsker's delta pinning <eta, .> at x:
// (2pi<eta,eta>)^{-1/2} exp(-(i<eta,f> - x)^2 / (2<eta,eta>) - 1/2 <f,f>).
Complex donsker_t_transform(const PhaseFunction& eta, double x, const PhaseFunction& f);

// T-transform of the normalized exponential: exp(-1/2 <f, (Id+K)^-1 f>).
Complex nexp_t_transform(const BlockOperator& K, const PhaseFunction& f);

// Gaussian expectation of exp(-<w, K w>) for real symmetric K with
// eigenvalues in (-1/2, 0]: det(Id + 2K)^{-1/2} via the eigenvalue product.
double gaussian_quadratic_expectation(const Eigen::MatrixXd& K_real);

// Exact quadratic-in-z exponent of the ray z -> T(z f):
// T(z f) = T(0) * exp(quadratic z^2 + linear z).
struct RayCoefficients {
    Complex quadratic;
    Complex linear;
};
RayCoefficients t_transform_ray_coefficients(const GaussKernelSpec& spec, const PhaseFunction& f);

}  // namespace phasefeyn
