#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "swkb/interior.hpp"
#include "swkb/potential.hpp"
#include "swkb/wkb.hpp"

namespace swkb {

struct MatchingConfig {
  /// WKB amplitude order.
  int N = 4;
  /// Interior delta; 0 selects gamma / 2.
  double delta_int = 0.0;
  QuasimodeOptions quasimode;
  /// Bound on the discarded imaginary part.
  double imag_tol = 1e-3;
  double condition_limit = 1e8;
  double interior_richardson_tol = 1e-8;
};

struct TransferMatrix {
  Eigen::Matrix2d entries;
  double E = 0.0;
  double h = 0.0;
  double sigma = 0.0;
  double imag_defect = 0.0;
  double x_match = 0.0;
  /// h^{N+1} int_{x_h}^b |a_N''| a_0.
  double exterior_budget = 0.0;
  /// Richardson error of the interior data at the matching point.
  double interior_budget = 0.0;

  double det() const { return entries.determinant(); }
  double budget() const { return exterior_budget + interior_budget; }
};

/// Rotation by sigma / h: (cos, -sin; sin, cos).
Eigen::Matrix2d free_rotation(double sigma, double h);

/// M_h(E) mapping the normalized datum diag(q_b^{1/4}, q_b^{-1/4})(u, hu')(b) to
/// diag(E^{1/4}, E^{-1/4})(u, hu')(0). `prebuilt` must have the same E and N and reach
/// down to the matching point.
TransferMatrix connect(const Potential& p, double E, double h, const MatchingConfig& cfg = {},
                       const Quasimode* prebuilt = nullptr);

/// Matching point h^{1 - eps} for the configured delta.
double matching_point(const Potential& p, double h, const MatchingConfig& cfg);

struct CorrectionTerm {
  int entry = 0;  // 0..3 for 11, 12, 21, 22
  int m = 0;
  int n = 0;
  double exponent = 0.0;
  double a_plus = 0.0;
  double a_minus = 0.0;
};

struct CorrectionFit {
  std::vector<CorrectionTerm> terms;
  std::vector<double> h_grid;
  /// max over entries of |residual| / |rhs|.
  double residual = 0.0;
  /// max over entries of the absolute residual norm divided by sqrt(rows).
  double rms_residual = 0.0;

  /// Smallest exponent whose largest contribution |a| h_max^e exceeds both `factor` times the rms
  /// residual and `floor`.
  std::optional<double> smallest_active(double factor = 10.0, double floor = 1e-10) const;
};

/// Lattice exponents m gamma + n, m <= max_m, n <= max_n, (m, n) != (0, 0), deduplicated by value.
std::vector<CorrectionTerm> correction_basis(double gamma, int max_m, int max_n);

/// Least-squares fit of M - D over the lattice basis from transfer matrices at the h_grid.
CorrectionFit fit_corrections(const std::vector<TransferMatrix>& sweep, double gamma, int max_m, int max_n);

/// Sweep of connect over h at fixed E, sharing one quasimode.
std::vector<TransferMatrix> transfer_sweep(const Potential& p, double E, const std::vector<double>& hs,
                                           const MatchingConfig& cfg = {}, unsigned threads = 1);

struct ExponentProfile {
  double exponent = 0.0;
  double residual = 0.0;
};

/// Fits M - D with basis {alpha} plus `others` and minimizes the relative residual over alpha in [lo, hi].
ExponentProfile fit_leading_exponent(const std::vector<TransferMatrix>& sweep, const std::vector<double>& others,
                                     double lo, double hi);

/// CSV rows `h,E,m11,m12,m21,m22,det,imag_defect`.
void write_transfer_row(std::ostream& out, const TransferMatrix& m);
/// CSV rows `entry,m,n,a_plus,a_minus`.
void write_fit(std::ostream& out, const CorrectionFit& fit);

}  // namespace swkb
