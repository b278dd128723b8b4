#pragma once

#include <functional>
#include <string>
#include <vector>

#include "swkb/potential.hpp"

namespace swkb {

enum class Method { BsLeading, Matched, Oracle };

const char* to_string(Method m) noexcept;
/// Accepts "bs_leading", "matched", "oracle".
Method parse_method(const std::string& name);

struct Eigenpair {
  long k = 0;
  double E = 0.0;
};

struct SpectralResult {
  double h = 0.0;
  Method method = Method::Oracle;
  std::vector<Eigenpair> eigenvalues;
  EnergyWindow window;

  /// Index of the entry with quantum number k, or -1.
  long find(long k) const;
};

/// Grid spacing in E that keeps consecutive roots of a quantization function in separate cells:
/// pi h / (2 max sigma') over the window.
double scan_spacing(const Potential& p, const EnergyWindow& win, double h);

/// Roots of f on [e_min, e_max]: sign changes on a grid of the given spacing, each refined
/// by TOMS 748 to |dE| <= tol. Grid values are computed on up to `threads` workers.
std::vector<double> find_roots(const std::function<double(double)>& f, double e_min, double e_max, double spacing,
                               double tol = 1e-11, unsigned threads = 1);

/// Nearest index of the leading-order ladder sigma(E) = k pi h.
long ladder_index(const Potential& p, double E, double h);

}  // namespace swkb
