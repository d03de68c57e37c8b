#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <string>

#include "phasefeyn/errors.hpp"

namespace phasefeyn {

using Complex = std::complex<double>;

// Uniform midpoint discretization of [0, t_total] with an evaluation window
// [0, t_window). Cells are classified by whether their center lies inside the
// window; quadrature weight is the cell width throughout.
struct TimeGrid {
    double t_window = 0.0;
    double t_total = 0.0;
    int m = 0;

    double cell_width() const { return t_total / m; }
    double center(int j) const { return (j + 0.5) * cell_width(); }
    bool in_window(int j) const { return center(j) < t_window; }
    int window_cells() const;

    bool operator==(const TimeGrid&) const = default;
};

// Validates 0 < t_window <= t_total and m >= 2.
TimeGrid build_grid(double t_window, double t_total, int m);

enum class Channel { x, p };

// Two-channel complex function sampled at cell centers. Immutable after
// construction; arithmetic returns new values.
class PhaseFunction {
  public:
    PhaseFunction(TimeGrid grid, Eigen::VectorXcd x_channel, Eigen::VectorXcd p_channel);

    static PhaseFunction zero(const TimeGrid& grid);

    const TimeGrid& grid() const { return grid_; }
    const Eigen::VectorXcd& x() const { return x_; }
    const Eigen::VectorXcd& p() const { return p_; }
    const Eigen::VectorXcd& channel(Channel c) const { return c == Channel::x ? x_ : p_; }

    bool is_real(double tol = 0.0) const;

    // Both channels stacked as a 2m vector (x first).
    Eigen::VectorXcd stacked() const;
    static PhaseFunction from_stacked(const TimeGrid& grid, const Eigen::VectorXcd& v);

    PhaseFunction operator+(const PhaseFunction& o) const;
    PhaseFunction operator-(const PhaseFunction& o) const;
    PhaseFunction operator*(Complex a) const;

  private:
    TimeGrid grid_;
    Eigen::VectorXcd x_, p_;
};

// Bilinear pairing sum_channels sum_j f_j g_j * cell_width. No conjugation.
Complex bilinear_pair(const PhaseFunction& f, const PhaseFunction& g);

// Indicator of [a, b) in one channel, by cell-center membership.
PhaseFunction indicator(const TimeGrid& grid, double a, double b, Channel channel);

// CSV serialization: cell_index,center,x_re,x_im,p_re,p_im.
void write_csv(std::ostream& out, const PhaseFunction& f);
PhaseFunction read_csv(std::istream& in, const TimeGrid& grid);
PhaseFunction read_csv_file(const std::string& path, const TimeGrid& grid);

}  // namespace phasefeyn
