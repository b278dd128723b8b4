#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "swkb/matching.hpp"
#include "swkb/oracle.hpp"
#include "swkb/spectrum.hpp"

namespace swkb {

/// Leading-order rule sigma(E) = k pi h, solved for each k in the window.
SpectralResult bs_leading(const Potential& p, const EnergyWindow& win, double h);

/// M_12 of the matched transfer matrix: zero exactly at Dirichlet eigenvalues.
double quantization_function(const Potential& p, double E, double h, const MatchingConfig& cfg = {});

/// Roots of the quantization function. The scan grid is refined once if the ladder indices
/// of the roots skip or repeat; BracketLost if that persists.
SpectralResult eigenvalues_matched(const Potential& p, const EnergyWindow& win, double h,
                                   const MatchingConfig& cfg = {}, unsigned threads = 1);

struct SpectralConfig {
  MatchingConfig matching;
  OracleConfig oracle;
  unsigned threads = 1;
};

SpectralResult compute_spectrum(const Potential& p, const EnergyWindow& win, double h, Method method,
                                const SpectralConfig& cfg = {});

struct Alignment {
  double max_err = 0.0;
  std::size_t aligned = 0;
  /// Repeated k in either list, or nothing in common.
  bool ambiguous = false;
};

/// Compares eigenvalues sharing a quantum number.
Alignment align(const SpectralResult& result, const SpectralResult& reference);

struct StudyRow {
  double h = 0.0;
  Method method = Method::BsLeading;
  double max_err = 0.0;
  std::size_t aligned = 0;
  bool alignment_failure = false;
};

struct StudySlope {
  Method method = Method::BsLeading;
  double slope = 0.0;
  /// All errors sit at roundoff level; the slope is meaningless.
  bool floor = false;
};

struct StudyReport {
  std::vector<StudyRow> rows;
  std::vector<StudySlope> slopes;

  std::optional<StudySlope> slope(Method m) const;
};

/// Errors against the oracle per h and method, with log-log slopes over h.
StudyReport convergence_study(const Potential& p, const EnergyWindow& win, const std::vector<double>& h_grid,
                              const std::vector<Method>& methods, const SpectralConfig& cfg = {});

/// Rows `h,method,k,E`.
void write_spectrum(std::ostream& out, const SpectralResult& r);
/// Rows `h,method,max_err,fitted_slope`; the slope column reads `floor` for roundoff-level errors.
void write_study(std::ostream& out, const StudyReport& r);

}  // namespace swkb
