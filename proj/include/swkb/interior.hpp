#pragma once

#include <cstddef>
#include <ostream>
#include <utility>
#include <vector>

#include "swkb/potential.hpp"
#include "swkb/wkb.hpp"

namespace swkb {

/// Rescaled interior problem v'' + v = f(z) v on [0, z_max], z = sqrt(E) x / h,
/// f(z) = h^gamma E^{-1-gamma/2} z^gamma W(h z / sqrt(E)).
struct InteriorConfig {
  double h = 0.0;
  double E = 0.0;
  double delta_int = 0.0;
  double eps = 0.0;
  double z_max = 0.0;
  std::size_t n_grid = 0;
  double richardson_tol = 1e-8;
  double contraction_limit = 0.5;

  /// Physical matching point h^{1 - eps}.
  double x_match() const;
};

/// Derives eps = (gamma - delta)/(gamma + 1), z_max = sqrt(E) h^{-eps} and a grid with
/// dz = min(max_dz, z_max / 2000). delta_int <= 0 selects gamma / 2.
InteriorConfig interior_config(const Potential& p, double E, double h, double delta_int = 0.0,
                               double max_dz = 0.05);

/// delta_int giving the matching point h^{1 - eps}.
double delta_for_eps(double gamma, double eps);

struct InteriorSolution {
  int sign = 1;
  std::vector<double> z;
  std::vector<cplx> v;
  std::vector<cplx> v_dot;
  /// From the equation: (f(z) - 1) v.
  std::vector<cplx> v_ddot;
  /// max |R2 - R1| over the two Richardson levels; bounds the error of the stored values.
  double error_estimate = 0.0;
  /// (4/3) max |v_2n - v_n|: error of the plain trapezoid march on the base grid.
  double trapezoid_error = 0.0;
  double norm = 0.0;

  /// Quintic Hermite value and derivative at z.
  std::pair<cplx, cplx> at(double z) const;
};

double operator_norm(const Potential& p, const InteriorConfig& cfg);

InteriorSolution solve_branch(const Potential& p, const InteriorConfig& cfg, int sign);
/// (psi+, psi-).
std::pair<InteriorSolution, InteriorSolution> solve_basis(const Potential& p, const InteriorConfig& cfg);

/// (psi(x_h), h psi'(x_h)) = (v(z_max), sqrt(E) v'(z_max)).
CauchyDatum cauchy_at_matching(const InteriorSolution& sol, const InteriorConfig& cfg);
/// Same at a physical point x <= x_h.
CauchyDatum cauchy_at(const InteriorSolution& sol, const InteriorConfig& cfg, double x);

/// (c+, c-) with v = c+ e^{iz} + c- e^{-iz} at z_max.
std::pair<cplx, cplx> asymptotic_coefficients(const InteriorSolution& sol, const InteriorConfig& cfg);

/// K[phi] and its derivative on the base grid, for phi sampled on the same grid.
std::pair<std::vector<cplx>, std::vector<cplx>> apply_volterra(const Potential& p, const InteriorConfig& cfg,
                                                               const std::vector<cplx>& phi);
/// L_j[phi]: kernel sin(z - t) w_j h^{gamma+j} E^{-1-gamma/2-j/2} t^{gamma+j}.
std::vector<cplx> apply_l(const Potential& p, const InteriorConfig& cfg, int j, const std::vector<cplx>& phi);

/// Index tuples of the truncated Neumann sum for order D: index j occurs at most n_j times,
/// n_j = max{n : n (delta + j d) < D}, d = (1 + delta)/(1 + gamma).
std::vector<std::vector<int>> neumann_tuples(const Potential& p, const InteriorConfig& cfg, double D);
/// max over both branches of sup |psi - T_D e|.
double neumann_compare(const Potential& p, const InteriorConfig& cfg, double D);

/// Sup-norm increments |v_n - v_{n-1}| of the Picard iteration v_n = e + K[v_{n-1}].
std::vector<double> picard_increments(const Potential& p, const InteriorConfig& cfg, int sign, int iterations);

/// Rows `z,re_v,im_v,re_v_dot,im_v_dot`.
void dump_interior(std::ostream& out, const InteriorSolution& sol);

}  // namespace swkb
