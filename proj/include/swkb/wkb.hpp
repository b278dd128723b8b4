#pragma once

#include <complex>
#include <ostream>
#include <vector>

#include "swkb/chebyshev.hpp"
#include "swkb/gte.hpp"
#include "swkb/potential.hpp"

namespace swkb {

using cplx = std::complex<double>;

/// Cauchy datum (u(x), h u'(x)).
struct CauchyDatum {
  cplx value;
  cplx h_derivative;
  double at = 0.0;
  double h = 0.0;
};

struct QuasimodeOptions {
  std::size_t n_cheb = 256;
  /// Relative agreement required between grid and series amplitudes at 2 x_lo.
  double crossover_tol = 1e-6;
  /// Bound on the trailing Chebyshev coefficients of the differentiated amplitudes.
  double differentiation_tol = 1e-8;
  /// Truncation order of the series near 0; 0 picks one from x_lo.
  double series_order = 0.0;
  double quad_tol = 1e-13;
};

/// Exterior quasimode data: phase S and real amplitudes a_k with A_k = i^k a_k,
/// a_0 = q^{-1/4} and a_{k+1} = -(1/2) a_0 int_x^b a_k'' a_0.
class Quasimode {
 public:
  const Potential& potential() const { return p_; }
  double E() const { return E_; }
  int N() const { return N_; }
  double x_lo() const { return grid_.x_lo(); }
  double b() const { return grid_.b(); }
  double sigma() const { return sigma_; }
  /// Below this point amplitudes are read from the series.
  double crossover() const { return crossover_; }

  /// a_k and its first two derivatives. `which` selects 0, 1 or 2 derivatives.
  double amplitude(int k, double x, int which = 0) const;
  /// Same, from the Chebyshev grid only.
  double amplitude_grid(int k, double x, int which = 0) const;
  /// Same, from the series only.
  double amplitude_series(int k, double x, int which = 0) const;
  /// A_k = i^k a_k.
  cplx A(int k, double x, int which = 0) const;
  /// Series for a_k (real coefficients, A_k = i^k a_k).
  const gte::Expansion& series(int k) const { return series_[static_cast<std::size_t>(k)][0]; }
  double S(double x) const;
  double S_prime(double x) const;
  /// Largest trailing-coefficient ratio seen while differentiating.
  double differentiation_noise() const { return noise_; }
  const LogChebyshevGrid& grid() const { return grid_; }

 private:
  friend Quasimode build_quasimode(const Potential&, double, int, double, const QuasimodeOptions&);
  Quasimode(Potential p, double E, int N, LogChebyshevGrid grid);
  void check_domain(double x) const;

  Potential p_;
  double E_;
  int N_;
  LogChebyshevGrid grid_;
  double sigma_ = 0.0;
  double crossover_ = 0.0;
  double noise_ = 0.0;
  double quad_tol_ = 1e-13;
  // [k][which] -> coefficients / series
  std::vector<std::vector<LogChebyshevGrid::Coeffs>> coeffs_;
  std::vector<std::vector<gte::Expansion>> series_;
};

Quasimode build_quasimode(const Potential& p, double E, int N, double x_lo,
                          const QuasimodeOptions& opts = {});

/// sign = +1 for u+, -1 for u- = conj(u+).
CauchyDatum evaluate_quasimode(const Quasimode& q, int sign, double h, double x);

/// max over grid of |h^2 W(u+, u-) - 2ih|.
double wronskian_defect(const Quasimode& q, double h, const std::vector<double>& grid);

/// h^2 W(u+, u-) at x.
cplx scaled_wronskian(const Quasimode& q, double h, double x);

/// max over grid of |h^2 W(x) - h^2 W(b)|.
double wronskian_drift(const Quasimode& q, double h, const std::vector<double>& grid);

/// h^(N+2) |A_N''(x)|.
double residual(const Quasimode& q, double h, double x);

/// gamma / (2 (gamma + 1)).
double default_epsilon(double gamma);

/// Rows `x,k,re,im` of A_k for k = 0..N at each x, after a header row.
void dump_amplitudes(std::ostream& out, const Quasimode& q, const std::vector<double>& xs);

}  // namespace swkb
