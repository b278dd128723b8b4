#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "swkb/potential.hpp"
#include "swkb/spectrum.hpp"
#include "swkb/wkb.hpp"

namespace swkb {

struct OracleConfig {
  double rtol = 1e-11;
  double atol = 1e-13;
  /// Step bound as a fraction of the local wavelength h / sqrt(E - V).
  double max_step_fraction = 0.2;
  /// Mesh grading x = s^g near 0. 0 means ceil(2/gamma) for gamma < 1 and 1 otherwise.
  int grading_exponent = 0;
  std::size_t max_steps = 5'000'000;
};

struct OracleStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Integrates h^2 u'' + (E - V) u = 0 from `from` to `to` starting at (u, h u') = datum.
CauchyDatum propagate(const Potential& p, double E, double h, double from, double to,
                      const CauchyDatum& datum, const OracleConfig& cfg = {},
                      OracleStats* stats = nullptr);

/// u(0) for the Dirichlet datum (0, 1) at b.
double shooting_function(const Potential& p, double E, double h, const OracleConfig& cfg = {});

/// Transfer matrix from the normalized datum at b to the normalized datum at 0, by direct integration.
Eigen::Matrix2d oracle_transfer(const Potential& p, double E, double h, const OracleConfig& cfg = {});

/// Dirichlet eigenvalues by shooting.
SpectralResult oracle_eigenvalues(const Potential& p, const EnergyWindow& win, double h,
                                  const OracleConfig& cfg = {}, unsigned threads = 1);

}  // namespace swkb
