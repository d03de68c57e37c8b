#include "phasefeyn/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace phasefeyn {

namespace {
constexpr double kSingularDetFloor = 1e-8;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}
}  // namespace

// ---------------------------------------------------------------------------
// Block

Block Block::zero(int m) {
    Block b;
    b.diagonal_ = true;
    b.d_ = Eigen::VectorXcd::Zero(m);
    return b;
}

Block Block::diagonal(Eigen::VectorXcd d) {
    Block b;
    b.diagonal_ = true;
    b.d_ = std::move(d);
    return b;
}

Block Block::dense(Eigen::MatrixXcd a) {
    if (a.rows() != a.cols())
        throw PreconditionError("Block: dense block must be square");
    Block b;
    b.diagonal_ = false;
    b.a_ = std::move(a);
    return b;
}

int Block::size() const { return diagonal_ ? static_cast<int>(d_.size()) : static_cast<int>(a_.rows()); }

Eigen::VectorXcd Block::apply(const Eigen::VectorXcd& v) const {
    return diagonal_ ? d_.cwiseProduct(v).eval() : (a_ * v).eval();
}

Eigen::MatrixXcd Block::to_dense() const {
    if (diagonal_) return d_.asDiagonal();
    return a_;
}

Complex Block::entry(int i, int j) const {
    if (diagonal_) return i == j ? d_[i] : Complex(0.0);
    return a_(i, j);
}

double Block::max_abs() const {
    if (diagonal_) return d_.size() ? d_.cwiseAbs().maxCoeff() : 0.0;
    return a_.size() ? a_.cwiseAbs().maxCoeff() : 0.0;
}

Block Block::plus(const Block& o) const {
    if (size() != o.size())
        throw PreconditionError("Block: size mismatch");
    if (diagonal_ && o.diagonal_) return diagonal(d_ + o.d_);
    return dense(to_dense() + o.to_dense());
}

Block Block::scaled(Complex a) const {
    if (diagonal_) return diagonal((d_ * a).eval());
    return dense((a_ * a).eval());
}

Block Block::times(const Block& o) const {
    if (size() != o.size())
        throw PreconditionError("Block: size mismatch");
    if (diagonal_ && o.diagonal_) return diagonal(d_.cwiseProduct(o.d_).eval());
    if (diagonal_) return dense((d_.asDiagonal() * o.a_).eval());
    if (o.diagonal_) return dense((a_ * o.d_.asDiagonal()).eval());
    return dense((a_ * o.a_).eval());
}

// ---------------------------------------------------------------------------
// BlockOperator

bool BlockOperator::all_diagonal() const {
    return xx.is_diagonal() && xp.is_diagonal() && px.is_diagonal() && pp.is_diagonal();
}

PhaseFunction BlockOperator::apply(const PhaseFunction& f) const {
    if (!(f.grid() == grid))
        throw PreconditionError("BlockOperator::apply: grid mismatch");
    Eigen::VectorXcd nx = xx.apply(f.x()) + xp.apply(f.p());
    Eigen::VectorXcd np = px.apply(f.x()) + pp.apply(f.p());
    return PhaseFunction(grid, std::move(nx), std::move(np));
}

Eigen::MatrixXcd BlockOperator::stacked_dense() const {
    const int n = m();
    Eigen::MatrixXcd out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = xx.to_dense();
    out.topRightCorner(n, n) = xp.to_dense();
    out.bottomLeftCorner(n, n) = px.to_dense();
    out.bottomRightCorner(n, n) = pp.to_dense();
    return out;
}

BlockOperator BlockOperator::zero(const TimeGrid& grid) {
    return BlockOperator{grid, Block::zero(grid.m), Block::zero(grid.m), Block::zero(grid.m),
                         Block::zero(grid.m), true};
}

BlockOperator BlockOperator::identity(const TimeGrid& grid) {
    return BlockOperator{grid, Block::diagonal(Eigen::VectorXcd::Ones(grid.m)), Block::zero(grid.m),
                         Block::zero(grid.m), Block::diagonal(Eigen::VectorXcd::Ones(grid.m)), true};
}

// ---------------------------------------------------------------------------
// Constructors of the concrete operator families

BlockOperator make_K_free(const TimeGrid& grid) {
    const int m = grid.m;
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(m);
    for (int j = 0; j < m; ++j)
        if (grid.in_window(j)) w[j] = 1.0;
    const Complex i(0.0, 1.0);
    BlockOperator K{grid,
                    Block::diagonal((-1.0 * w).eval()),
                    Block::diagonal((-i * w).eval()),
                    Block::diagonal((-i * w).eval()),
                    Block::diagonal((-(1.0 - i) * w).eval()),
                    true};
    return K;
}

Eigen::MatrixXd build_window_kernel_matrix(const TimeGrid& grid, par::Policy policy) {
    const int m = grid.m;
    const double w = grid.cell_width();
    const double t = grid.t_window;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    // column-parallel so each thread writes a contiguous column block
    par::for_index(
        m,
        [&](int j) {
            if (!grid.in_window(j)) return;
            const double sj = grid.center(j);
            for (int i = 0; i < m; ++i) {
                if (!grid.in_window(i)) continue;
                A(i, j) = w * (t - std::max(grid.center(i), sj));
            }
        },
        policy);
    return A;
}

BlockOperator make_A(const TimeGrid& grid) {
    Eigen::MatrixXcd Axx = build_window_kernel_matrix(grid).cast<Complex>();
    return BlockOperator{grid, Block::dense(std::move(Axx)), Block::zero(grid.m),
                         Block::zero(grid.m), Block::zero(grid.m), true};
}

BlockOperator make_L_ho(const TimeGrid& grid, double k) {
    if (k < 0.0)
        throw PreconditionError("make_L_ho: spring constant must be nonnegative");
    if (k == 0.0) return BlockOperator::zero(grid);
    Eigen::MatrixXcd Lxx = build_window_kernel_matrix(grid).cast<Complex>() * Complex(0.0, k);
    return BlockOperator{grid, Block::dense(std::move(Lxx)), Block::zero(grid.m),
                         Block::zero(grid.m), Block::zero(grid.m), true};
}

BlockOperator assemble_N(const BlockOperator& K, const BlockOperator& L) {
    if (!(K.grid == L.grid))
        throw PreconditionError("assemble_N: grid mismatch");
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(K.grid.m);
    return BlockOperator{K.grid,
                         Block::diagonal(ones).plus(K.xx).plus(L.xx),
                         K.xp.plus(L.xp),
                         K.px.plus(L.px),
                         Block::diagonal(ones).plus(K.pp).plus(L.pp),
                         K.symmetric && L.symmetric};
}

BlockOperator compose(const BlockOperator& a, const BlockOperator& b) {
    if (!(a.grid == b.grid))
        throw PreconditionError("compose: grid mismatch");
    return BlockOperator{a.grid,
                         a.xx.times(b.xx).plus(a.xp.times(b.px)),
                         a.xx.times(b.xp).plus(a.xp.times(b.pp)),
                         a.px.times(b.xx).plus(a.pp.times(b.px)),
                         a.px.times(b.xp).plus(a.pp.times(b.pp)),
                         false};
}

// ---------------------------------------------------------------------------
// BlockSolver / invert_N

namespace {

double stacked_inf_norm_diag(const Eigen::VectorXcd& xx, const Eigen::VectorXcd& xp,
                             const Eigen::VectorXcd& px, const Eigen::VectorXcd& pp) {
    double n = 0.0;
    for (int c = 0; c < xx.size(); ++c) {
        n = std::max(n, std::abs(xx[c]) + std::abs(xp[c]));
        n = std::max(n, std::abs(px[c]) + std::abs(pp[c]));
    }
    return n;
}

}  // namespace

BlockSolver::BlockSolver(const BlockOperator& N, double cond_bound) : grid_(N.grid) {
    const int m = N.m();
    if (N.all_diagonal()) {
        diagonal_ = true;
        ixx_.resize(m);
        ixp_.resize(m);
        ipx_.resize(m);
        ipp_.resize(m);
        const auto &xx = N.xx.diag(), &xp = N.xp.diag(), &px = N.px.diag(), &pp = N.pp.diag();
        for (int c = 0; c < m; ++c) {
            const Complex det = xx[c] * pp[c] - xp[c] * px[c];
            if (!(std::abs(det) > 0.0))
                throw SingularOperatorError(
                    "BlockSolver: singular 2x2 cell block at cell " + std::to_string(c),
                    std::numeric_limits<double>::infinity());
            det_ *= det;
            ixx_[c] = pp[c] / det;
            ixp_[c] = -xp[c] / det;
            ipx_[c] = -px[c] / det;
            ipp_[c] = xx[c] / det;
        }
        cond_ = stacked_inf_norm_diag(xx, xp, px, pp) *
                stacked_inf_norm_diag(ixx_, ixp_, ipx_, ipp_);
    } else {
        Eigen::MatrixXcd S = N.stacked_dense();
        const double norm_n = S.cwiseAbs().rowwise().sum().maxCoeff();
        lu_.compute(S);
        det_ = lu_.determinant();
        // lower-bound estimate of |N^-1|_inf from a few probe solves
        std::mt19937_64 rng(0x9d2c5680u);
        double inv_norm = 0.0;
        for (int probe = 0; probe < 4; ++probe) {
            Eigen::VectorXcd b(2 * m);
            for (int j = 0; j < 2 * m; ++j)
                b[j] = (rng() & 1) ? 1.0 : -1.0;
            Eigen::VectorXcd x = lu_.solve(b);
            inv_norm = std::max(inv_norm, x.cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff());
        }
        cond_ = norm_n * inv_norm;
    }
    if (!std::isfinite(cond_) || cond_ > cond_bound)
        throw SingularOperatorError("operator condition estimate " + fmt(cond_) +
                                        " exceeds bound " + fmt(cond_bound),
                                    cond_);
}

Complex BlockSolver::determinant() const { return det_; }

Eigen::VectorXcd BlockSolver::solve(const Eigen::VectorXcd& stacked) const {
    const int m = grid_.m;
    if (stacked.size() != 2 * m)
        throw PreconditionError("BlockSolver::solve: size mismatch");
    if (diagonal_) {
        Eigen::VectorXcd out(2 * m);
        for (int c = 0; c < m; ++c) {
            out[c] = ixx_[c] * stacked[c] + ixp_[c] * stacked[m + c];
            out[m + c] = ipx_[c] * stacked[c] + ipp_[c] * stacked[m + c];
        }
        return out;
    }
    return lu_.solve(stacked);
}

PhaseFunction BlockSolver::solve(const PhaseFunction& rhs) const {
    if (!(rhs.grid() == grid_))
        throw PreconditionError("BlockSolver::solve: grid mismatch");
    return PhaseFunction::from_stacked(grid_, solve(rhs.stacked()));
}

BlockOperator invert_N(const BlockOperator& N, double cond_bound) {
    const int m = N.m();
    BlockSolver solver(N, cond_bound);
    BlockOperator inv = BlockOperator::zero(N.grid);
    double residual = 0.0;
    if (N.all_diagonal()) {
        Eigen::VectorXcd ixx(m), ixp(m), ipx(m), ipp(m);
        for (int c = 0; c < m; ++c) {
            Eigen::VectorXcd ex = Eigen::VectorXcd::Zero(2 * m);
            ex[c] = 1.0;
            Eigen::VectorXcd col = solver.solve(ex);
            ixx[c] = col[c];
            ipx[c] = col[m + c];
            ex[c] = 0.0;
            ex[m + c] = 1.0;
            col = solver.solve(ex);
            ixp[c] = col[c];
            ipp[c] = col[m + c];
        }
        const auto &xx = N.xx.diag(), &xp = N.xp.diag(), &px = N.px.diag(), &pp = N.pp.diag();
        for (int c = 0; c < m; ++c) {
            residual = std::max(residual, std::abs(xx[c] * ixx[c] + xp[c] * ipx[c] - 1.0));
            residual = std::max(residual, std::abs(xx[c] * ixp[c] + xp[c] * ipp[c]));
            residual = std::max(residual, std::abs(px[c] * ixx[c] + pp[c] * ipx[c]));
            residual = std::max(residual, std::abs(px[c] * ixp[c] + pp[c] * ipp[c] - 1.0));
        }
        inv.xx = Block::diagonal(std::move(ixx));
        inv.xp = Block::diagonal(std::move(ixp));
        inv.px = Block::diagonal(std::move(ipx));
        inv.pp = Block::diagonal(std::move(ipp));
    } else {
        Eigen::MatrixXcd S = N.stacked_dense();
        Eigen::MatrixXcd Sinv = Eigen::PartialPivLU<Eigen::MatrixXcd>(S).inverse();
        residual = (S * Sinv - Eigen::MatrixXcd::Identity(2 * m, 2 * m)).cwiseAbs().maxCoeff();
        inv.xx = Block::dense(Sinv.topLeftCorner(m, m));
        inv.xp = Block::dense(Sinv.topRightCorner(m, m));
        inv.px = Block::dense(Sinv.bottomLeftCorner(m, m));
        inv.pp = Block::dense(Sinv.bottomRightCorner(m, m));
    }
    if (!(residual < 1e-8))
        throw SingularOperatorError("invert_N: inverse residual " + fmt(residual) +
                                        " above 1e-8 (condition estimate " +
                                        fmt(solver.condition_estimate()) + ")",
                                    solver.condition_estimate());
    inv.symmetric = N.symmetric;
    return inv;
}

// ---------------------------------------------------------------------------
// Spectrum and determinants

SpectrumResult spectrum_A(const TimeGrid& grid, double k, int n_modes) {
    if (k < 0.0)
        throw PreconditionError("spectrum_A: spring constant must be nonnegative");
    if (n_modes < 1 || n_modes > grid.m / 4)
        throw PreconditionError("spectrum_A: n_modes must lie in [1, m/4]");
    std::vector<int> win;
    for (int j = 0; j < grid.m; ++j)
        if (grid.in_window(j)) win.push_back(j);
    const int mw = static_cast<int>(win.size());
    if (n_modes > mw)
        throw PreconditionError("spectrum_A: n_modes exceeds window cells");

    const Eigen::MatrixXd Afull = build_window_kernel_matrix(grid);
    Eigen::MatrixXd Aw(mw, mw);
    for (int i = 0; i < mw; ++i)
        for (int j = 0; j < mw; ++j)
            Aw(i, j) = k * Afull(win[i], win[j]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Aw);
    if (es.info() != Eigen::Success)
        throw SingularOperatorError("spectrum_A: eigensolver failed", 0.0);

    SpectrumResult out;
    out.n_modes = n_modes;
    out.eigenvalues.resize(n_modes);
    out.eigenfunctions = Eigen::MatrixXd::Zero(grid.m, n_modes);
    const double inv_sqrt_w = 1.0 / std::sqrt(grid.cell_width());
    for (int r = 0; r < n_modes; ++r) {
        const int src = mw - 1 - r;  // Eigen sorts ascending
        out.eigenvalues[r] = es.eigenvalues()[src];
        Eigen::VectorXd v = es.eigenvectors().col(src) * inv_sqrt_w;
        if (v[0] < 0.0) v = -v;  // fix the sign convention
        for (int i = 0; i < mw; ++i)
            out.eigenfunctions(win[i], r) = v[i];
    }
    return out;
}

namespace {

// sum_{n > N} (n - 1/2)^-2 = trigamma(N + 1/2), by its asymptotic expansion.
double trigamma_tail(int N) {
    const double z = N + 0.5;
    return 1.0 / z + 1.0 / (2.0 * z * z) + 1.0 / (6.0 * z * z * z);
}

// Recover the spring constant from the xx block of a harmonic L and verify
// the block really is i*k*A for the grid's window kernel.
double recover_spring_constant(const BlockOperator& L) {
    const TimeGrid& grid = L.grid;
    if (L.xp.max_abs() > 0.0 || L.px.max_abs() > 0.0 || L.pp.max_abs() > 0.0)
        throw PreconditionError("fredholm_det(product): L is not of the harmonic form");
    if (L.xx.max_abs() == 0.0) return 0.0;
    const Eigen::MatrixXd Aker = build_window_kernel_matrix(grid);
    int i0 = -1;
    for (int j = 0; j < grid.m; ++j)
        if (grid.in_window(j)) {
            i0 = j;
            break;
        }
    if (i0 < 0 || Aker(i0, i0) == 0.0)
        throw PreconditionError("fredholm_det(product): empty window");
    const double k = L.xx.entry(i0, i0).imag() / Aker(i0, i0);
    double dev = 0.0;
    for (int i = 0; i < grid.m; ++i)
        for (int j = 0; j < grid.m; ++j)
            dev = std::max(dev, std::abs(L.xx.entry(i, j) - Complex(0.0, k * Aker(i, j))));
    if (k < 0.0 || dev > 1e-10 * std::max(1.0, std::abs(k) * Aker.maxCoeff()))
        throw PreconditionError("fredholm_det(product): L is not of the harmonic form");
    return k;
}

}  // namespace

Complex fredholm_det(const BlockOperator& K, const BlockOperator& L, DetMethod method,
                     int n_modes) {
    if (!(K.grid == L.grid))
        throw PreconditionError("fredholm_det: grid mismatch");
    const TimeGrid& grid = K.grid;
    Complex det;
    const bool l_zero = L.xx.max_abs() == 0.0 && L.xp.max_abs() == 0.0 && L.px.max_abs() == 0.0 &&
                        L.pp.max_abs() == 0.0;
    if (l_zero) {
        det = 1.0;
    } else if (method == DetMethod::product) {
        const double k = recover_spring_constant(L);
        const double t = grid.t_window;
        const double kt2 = k * t * t;
        double logdet = 0.0;
        for (int n = 1; n <= n_modes; ++n) {
            const double denom = (n - 0.5) * std::numbers::pi;
            const double factor = 1.0 - kt2 / (denom * denom);
            if (factor <= 0.0)
                throw VanishingDeterminantError(
                    "fredholm_det: nonpositive eigenvalue factor; t at or beyond pi/(2 sqrt(k))");
            logdet += std::log(factor);
        }
        logdet -= kt2 / (std::numbers::pi * std::numbers::pi) * trigamma_tail(n_modes);
        det = std::exp(logdet);
    } else {
        // det(Id + L (Id+K)^-1) on the discretized stacked system
        const BlockOperator idk_inv = invert_N(assemble_N(K, BlockOperator::zero(grid)));
        const int n = grid.m;
        Eigen::MatrixXcd S = compose(L, idk_inv).stacked_dense();
        S += Eigen::MatrixXcd::Identity(2 * n, 2 * n);
        det = Eigen::PartialPivLU<Eigen::MatrixXcd>(S).determinant();
    }
    if (std::abs(det) < kSingularDetFloor)
        throw VanishingDeterminantError(
            "fredholm_det: determinant within 1e-8 of zero; t at or beyond pi/(2 sqrt(k))");
    return det;
}

}  // namespace phasefeyn
