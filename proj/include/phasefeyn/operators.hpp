#pragma once

#include <Eigen/Dense>

#include "phasefeyn/grid.hpp"
#include "phasefeyn/parallel.hpp"

namespace phasefeyn {

// One m x m complex block. Multiplication operators stay diagonal so that
// purely multiplicative block operators invert cell by cell instead of
// through a dense 2m x 2m factorization.
class Block {
  public:
    static Block zero(int m);
    static Block diagonal(Eigen::VectorXcd d);
    static Block dense(Eigen::MatrixXcd a);

    bool is_diagonal() const { return diagonal_; }
    int size() const;

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
    Eigen::MatrixXcd to_dense() const;
    Complex entry(int i, int j) const;
    double max_abs() const;

    Block plus(const Block& o) const;
    Block scaled(Complex a) const;
    Block times(const Block& o) const;

    const Eigen::VectorXcd& diag() const { return d_; }

  private:
    Block() = default;
    bool diagonal_ = true;
    Eigen::VectorXcd d_;
    Eigen::MatrixXcd a_;
};

// 2x2 block of m x m complex matrices acting on stacked (x, p) channels.
struct BlockOperator {
    TimeGrid grid;
    Block xx, xp, px, pp;
    bool symmetric = false;  // pair(f, Bg) == pair(Bf, g) by construction

    int m() const { return grid.m; }
    bool all_diagonal() const;
    PhaseFunction apply(const PhaseFunction& f) const;
    Eigen::MatrixXcd stacked_dense() const;

    static BlockOperator zero(const TimeGrid& grid);
    static BlockOperator identity(const TimeGrid& grid);
};

// Kinetic-term block operator: multiplication by
//   [ -1        -i   ]
//   [ -i     -(1-i) ]
// on window cells, zero outside.
BlockOperator make_K_free(const TimeGrid& grid);

// Double-integration operator as the symmetric kernel a(s,r) = t - max(s,r)
// on the window (collapsed analytically; no nested quadrature). Only the xx
// block is populated. Uses the OpenMP fill kernel; the serial reference is
// build_window_kernel_matrix with Policy::serial.
BlockOperator make_A(const TimeGrid& grid);

// Potential block for the harmonic family: xx = i k A, rest zero. k >= 0.
BlockOperator make_L_ho(const TimeGrid& grid, double k);

// N = Id + K + L, blockwise.
BlockOperator assemble_N(const BlockOperator& K, const BlockOperator& L);

// Blockwise operator product a . b (2x2 block algebra).
BlockOperator compose(const BlockOperator& a, const BlockOperator& b);

// Factorized solver for N applied to stacked channel vectors. Diagonal
// operators invert cell by cell; anything else goes through a dense
// partial-pivot LU of the stacked 2m x 2m system.
class BlockSolver {
  public:
    explicit BlockSolver(const BlockOperator& N, double cond_bound = 1e10);

    PhaseFunction solve(const PhaseFunction& rhs) const;
    Eigen::VectorXcd solve(const Eigen::VectorXcd& stacked) const;
    double condition_estimate() const { return cond_; }
    Complex determinant() const;
    const TimeGrid& grid() const { return grid_; }

  private:
    TimeGrid grid_;
    bool diagonal_ = false;
    // per-cell inverse entries for the diagonal path
    Eigen::VectorXcd ixx_, ixp_, ipx_, ipp_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    double cond_ = 0.0;
    Complex det_ = 1.0;
};

// Explicit inverse with condition gate (default bound 1e10) and residual
// check |N N^-1 - Id|_max < 1e-8. Fails loudly naming the condition
// estimate rather than returning noise near degeneracy.
BlockOperator invert_N(const BlockOperator& N, double cond_bound = 1e10);

struct SpectrumResult {
    Eigen::VectorXd eigenvalues;    // descending
    Eigen::MatrixXd eigenfunctions; // m x n_modes, quadrature-normalized on the window
    int n_modes = 0;
};

// Leading spectrum of the discretized k*A restricted to the window.
SpectrumResult spectrum_A(const TimeGrid& grid, double k, int n_modes);

enum class DetMethod { product, dense };

// det(Id + L (Id+K)^-1). The product method uses the analytic eigenvalue
// family of the harmonic L (validated against the discretized kernel) with a
// trigamma tail estimate appended; the dense method evaluates the determinant
// of the discretized stacked matrix. Quadrature weights are already folded
// symmetrically into the kernel matrix (uniform grid: sqrt(w) a sqrt(w) = w a),
// so the discrete spectrum approximates the L2 spectrum.
Complex fredholm_det(const BlockOperator& K, const BlockOperator& L, DetMethod method,
                     int n_modes = 10000);

// Window-restricted kernel matrix [ w * a(s_i, s_j) ] used by make_A,
// spectrum_A and the window-representation evaluators. Dual-path kernel:
// identical per-entry arithmetic under both policies.
Eigen::MatrixXd build_window_kernel_matrix(const TimeGrid& grid,
                                           par::Policy policy = par::Policy::openmp);

}  // namespace phasefeyn
