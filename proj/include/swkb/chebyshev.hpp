#pragma once

#include <cstddef>
#include <vector>

namespace swkb {

/// Piecewise Chebyshev-Lobatto representation on [x_lo, b], with panels of equal
/// length in log x. Functions are passed around as node values (panel-major).
class LogChebyshevGrid {
 public:
  /// n_total is split across panels of log-width at most panel_width.
  LogChebyshevGrid(double x_lo, double b, std::size_t n_total, double panel_width = 1.0);

  using Values = std::vector<double>;
  using Coeffs = std::vector<std::vector<double>>;

  double x_lo() const { return x_lo_; }
  double b() const { return b_; }
  std::size_t panels() const { return panels_; }
  std::size_t points_per_panel() const { return n_; }
  std::size_t size() const { return panels_ * n_; }
  /// Node coordinates, panel-major; node 0 of each panel is its right end.
  const std::vector<double>& nodes() const { return x_; }

  Coeffs coefficients(const Values& f) const;
  Values values(const Coeffs& c) const;
  /// d/dx of the interpolant, returned at the nodes.
  Values derivative(const Values& f) const;
  /// int_x^b f(y) dy at the nodes (Clenshaw-Curtis per panel, accumulated from b).
  Values integral_from_b(const Values& f) const;
  double evaluate(const Coeffs& c, double x) const;
  /// Largest ratio of trailing to leading coefficient magnitude over all panels.
  double tail_ratio(const Coeffs& c) const;

 private:
  std::size_t panel_of(double x) const;
  double local_s(std::size_t p, double x) const;

  double x_lo_, b_;
  std::size_t panels_, n_;
  double log_lo_, width_;
  std::vector<double> x_;
  std::vector<double> cos_table_;
};

}  // namespace swkb
