#include "phasefeyn/grid.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

namespace phasefeyn {

int TimeGrid::window_cells() const {
    int n = 0;
    for (int j = 0; j < m; ++j)
        if (in_window(j)) ++n;
    return n;
}

TimeGrid build_grid(double t_window, double t_total, int m) {
    if (!(t_window > 0.0))
        throw PreconditionError("build_grid: t_window must be positive");
    if (!(t_window <= t_total))
        throw PreconditionError("build_grid: t_window must not exceed t_total");
    if (m < 2)
        throw PreconditionError("build_grid: need at least 2 cells");
    return TimeGrid{t_window, t_total, m};
}

PhaseFunction::PhaseFunction(TimeGrid grid, Eigen::VectorXcd x_channel, Eigen::VectorXcd p_channel)
    : grid_(grid), x_(std::move(x_channel)), p_(std::move(p_channel)) {
    if (x_.size() != grid_.m || p_.size() != grid_.m)
        throw PreconditionError("PhaseFunction: channel size must equal the cell count");
}

PhaseFunction PhaseFunction::zero(const TimeGrid& grid) {
    return PhaseFunction(grid, Eigen::VectorXcd::Zero(grid.m), Eigen::VectorXcd::Zero(grid.m));
}

bool PhaseFunction::is_real(double tol) const {
    return x_.imag().cwiseAbs().maxCoeff() <= tol && p_.imag().cwiseAbs().maxCoeff() <= tol;
}

Eigen::VectorXcd PhaseFunction::stacked() const {
    Eigen::VectorXcd v(2 * grid_.m);
    v.head(grid_.m) = x_;
    v.tail(grid_.m) = p_;
    return v;
}

PhaseFunction PhaseFunction::from_stacked(const TimeGrid& grid, const Eigen::VectorXcd& v) {
    if (v.size() != 2 * grid.m)
        throw PreconditionError("from_stacked: vector size must be 2m");
    return PhaseFunction(grid, v.head(grid.m), v.tail(grid.m));
}

PhaseFunction PhaseFunction::operator+(const PhaseFunction& o) const {
    if (!(grid_ == o.grid_)) throw PreconditionError("PhaseFunction: grid mismatch");
    return PhaseFunction(grid_, x_ + o.x_, p_ + o.p_);
}

PhaseFunction PhaseFunction::operator-(const PhaseFunction& o) const {
    if (!(grid_ == o.grid_)) throw PreconditionError("PhaseFunction: grid mismatch");
    return PhaseFunction(grid_, x_ - o.x_, p_ - o.p_);
}

PhaseFunction PhaseFunction::operator*(Complex a) const {
    return PhaseFunction(grid_, x_ * a, p_ * a);
}

Complex bilinear_pair(const PhaseFunction& f, const PhaseFunction& g) {
    if (!(f.grid() == g.grid()))
        throw PreconditionError("bilinear_pair: grid mismatch");
    const Complex sx = f.x().cwiseProduct(g.x()).sum();
    const Complex sp = f.p().cwiseProduct(g.p()).sum();
    return (sx + sp) * f.grid().cell_width();
}

PhaseFunction indicator(const TimeGrid& grid, double a, double b, Channel channel) {
    if (!(0.0 <= a && a < b && b <= grid.t_total))
        throw PreconditionError("indicator: need 0 <= a < b <= t_total");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(grid.m);
    for (int j = 0; j < grid.m; ++j) {
        const double c = grid.center(j);
        if (c >= a && c < b) v[j] = 1.0;
    }
    if (channel == Channel::x)
        return PhaseFunction(grid, v, Eigen::VectorXcd::Zero(grid.m));
    return PhaseFunction(grid, Eigen::VectorXcd::Zero(grid.m), v);
}

void write_csv(std::ostream& out, const PhaseFunction& f) {
    out << "cell_index,center,x_re,x_im,p_re,p_im\n";
    out.precision(17);
    for (int j = 0; j < f.grid().m; ++j) {
        out << j << ',' << f.grid().center(j) << ','
            << f.x()[j].real() << ',' << f.x()[j].imag() << ','
            << f.p()[j].real() << ',' << f.p()[j].imag() << '\n';
    }
}

PhaseFunction read_csv(std::istream& in, const TimeGrid& grid) {
    std::string line;
    if (!std::getline(in, line))
        throw PreconditionError("read_csv: empty input");
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(grid.m);
    Eigen::VectorXcd p = Eigen::VectorXcd::Zero(grid.m);
    std::vector<bool> seen(grid.m, false);
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        double vals[6];
        for (int c = 0; c < 6; ++c) {
            if (!std::getline(ls, field, ','))
                throw PreconditionError("read_csv: malformed row '" + line + "'");
            vals[c] = std::stod(field);
        }
        const int j = static_cast<int>(vals[0]);
        if (j < 0 || j >= grid.m)
            throw PreconditionError("read_csv: cell index out of range");
        if (seen[j])
            throw PreconditionError("read_csv: duplicate cell index " + std::to_string(j));
        if (std::abs(vals[1] - grid.center(j)) > 1e-9 * grid.t_total)
            throw PreconditionError("read_csv: cell center does not match the grid");
        seen[j] = true;
        x[j] = Complex(vals[2], vals[3]);
        p[j] = Complex(vals[4], vals[5]);
        ++rows;
    }
    if (rows != grid.m)
        throw PreconditionError("read_csv: expected one row per cell");
    return PhaseFunction(grid, std::move(x), std::move(p));
}

PhaseFunction read_csv_file(const std::string& path, const TimeGrid& grid) {
    std::ifstream in(path);
    if (!in)
        throw PreconditionError("cannot open '" + path + "'");
    return read_csv(in, grid);
}

}  // namespace phasefeyn
