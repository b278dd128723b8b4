#include "swkb/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "swkb/error.hpp"
#include "swkb/parallel.hpp"

namespace swkb {

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::BsLeading: return "bs_leading";
    case Method::Matched: return "matched";
    case Method::Oracle: return "oracle";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "bs_leading") return Method::BsLeading;
  if (name == "matched") return Method::Matched;
  if (name == "oracle") return Method::Oracle;
  fail(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
}

long SpectralResult::find(long k) const {
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues[i].k == k) return static_cast<long>(i);
  return -1;
}

double scan_spacing(const Potential& p, const EnergyWindow& win, double h) {
  // sigma' = (1/2) int (E - V)^{-1/2} decreases with E, so its maximum sits at e_min.
  double sp = std::max(sigma_prime(p, win.e_min), sigma_prime(p, win.e_max));
  return std::numbers::pi * h / (2.0 * sp);
}

std::vector<double> find_roots(const std::function<double(double)>& f, double e_min, double e_max, double spacing,
                               double tol, unsigned threads) {
  if (!(e_max > e_min) || !(spacing > 0.0)) fail(ErrorCode::InvalidArgument, "empty scan interval");
  const auto cells = static_cast<std::size_t>(std::ceil((e_max - e_min) / spacing));
  std::vector<double> es(cells + 1), fs(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) es[i] = i == cells ? e_max : e_min + static_cast<double>(i) * spacing;
  parallel_for(cells + 1, threads, [&](std::size_t i) { fs[i] = f(es[i]); });

  std::vector<std::size_t> brackets;
  for (std::size_t i = 0; i < cells; ++i)
    if (fs[i] != 0.0 && fs[i] * fs[i + 1] < 0.0) brackets.push_back(i);
  std::vector<double> roots(brackets.size());
  parallel_for(brackets.size(), threads, [&](std::size_t j) {
    const std::size_t i = brackets[j];
    std::uintmax_t iters = 200;
    auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
    const auto [lo, hi] = boost::math::tools::toms748_solve(f, es[i], es[i + 1], fs[i], fs[i + 1], stop, iters);
    roots[j] = 0.5 * (lo + hi);
  });
  for (std::size_t i = 0; i <= cells; ++i)
    if (fs[i] == 0.0) roots.push_back(es[i]);
  std::sort(roots.begin(), roots.end());
  return roots;
}

long ladder_index(const Potential& p, double E, double h) {
  return std::lround(sigma(p, E) / (std::numbers::pi * h));
}

}  // namespace swkb
