#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "swkb/config.hpp"

namespace swkb {

enum class WKind { Polynomial, ExpPoly, Constant, Custom };

/// The smooth factor W in V(x) = x^gamma W(x): an evaluation handle plus Taylor data at 0.
class WFunction {
 public:
  static WFunction polynomial(std::vector<double> coeffs);
  /// W = exp(P) with P given by ascending coefficients.
  static WFunction exp_poly(std::vector<double> coeffs, int taylor_order = 40);
  static WFunction constant(double value);
  static WFunction custom(std::function<double(double)> fn, std::vector<double> taylor);

  double value(double x) const;
  /// n-th derivative. Exact for the built-in kinds, finite differences for custom handles.
  double derivative(double x, int n) const;
  /// Taylor coefficients W^(j)(x)/j!, j = 0..order.
  std::vector<double> jet(double x, int order) const;

  WKind kind() const { return kind_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::vector<double>& taylor() const { return taylor_; }
  /// True when the Taylor list is the whole function (polynomial and constant kinds).
  bool taylor_exact() const { return kind_ == WKind::Polynomial || kind_ == WKind::Constant; }
  bool identically_zero() const;

 private:
  WKind kind_ = WKind::Constant;
  std::vector<double> coeffs_;
  std::vector<double> taylor_;
  std::function<double(double)> fn_;
};

class Potential {
 public:
  /// Throws InvalidArgument for gamma <= 0, b <= 0, inconsistent Taylor data, or W == 0
  /// without allow_degenerate.
  Potential(double gamma, double b, WFunction w, bool allow_degenerate = false);

  double gamma() const { return gamma_; }
  double b() const { return b_; }
  const WFunction& w() const { return w_; }
  const std::vector<double>& w_taylor() const { return w_.taylor(); }
  bool degenerate() const { return degenerate_; }
  bool allows_degenerate() const { return allow_degenerate_; }

  /// W(x), using the Taylor list for x < 0.01 b.
  double w_at(double x) const;
  /// x^gamma W(x) without domain checks.
  double v(double x) const;
  /// Exponent p of the graded substitution x = t^p.
  int grading_power() const;

 private:
  double gamma_;
  double b_;
  WFunction w_;
  bool allow_degenerate_;
  bool degenerate_;
};

struct EnergyWindow {
  double e_min = 0.0;
  double e_max = 0.0;
  double delta = 0.0;
};

EnergyWindow validate(const Potential& p, EnergyWindow win, std::size_t grid_size = 2048);

/// V(x); throws OutOfDomain outside [0, b].
double v_at(const Potential& p, double x);

/// Action sigma_E = int_0^b sqrt(E - V).
double sigma(const Potential& p, double E, double tol = 1e-13);
/// d sigma / dE = (1/2) int_0^b (E - V)^{-1/2}.
double sigma_prime(const Potential& p, double E, double tol = 1e-12);
/// T_E(x) = int_0^x [sqrt(E - V) - sqrt(E)].
double t_correction(const Potential& p, double E, double x, double tol = 1e-13);
/// Phase S(x) = -int_x^b sqrt(E - V).
double phase(const Potential& p, double E, double x, double tol = 1e-13);

/// Builds a potential from keys gamma, b, w.kind, w.coeffs, w.taylor_order, w.allow_zero.
Potential parse_potential(const KeyValues& kv);
/// Reads window.e_min and window.e_max.
EnergyWindow parse_window(const KeyValues& kv);

}  // namespace swkb
