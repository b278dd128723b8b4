#include "swkb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include <boost/math/tools/roots.hpp>

#include "swkb/error.hpp"

namespace swkb {
namespace {

// Roots refine to 1e-11 each; two such lists cannot agree much better than this.
constexpr double kFloor = 1e-10;

bool ladder_consistent(const std::vector<Eigenpair>& ev) {
  for (std::size_t i = 1; i < ev.size(); ++i)
    if (ev[i].k - ev[i - 1].k != 1) return false;
  return true;
}

double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

SpectralResult bs_leading(const Potential& p, const EnergyWindow& win, double h) {
  if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "h must be positive");
  SpectralResult res;
  res.h = h;
  res.method = Method::BsLeading;
  res.window = win;
  const double unit = std::numbers::pi * h;
  const double s_lo = sigma(p, win.e_min), s_hi = sigma(p, win.e_max);
  const auto k_lo = static_cast<long>(std::ceil(s_lo / unit));
  const auto k_hi = static_cast<long>(std::floor(s_hi / unit));
  for (long k = k_lo; k <= k_hi; ++k) {
    const double target = static_cast<double>(k) * unit;
    auto f = [&](double E) { return sigma(p, E) - target; };
    const double f_lo = s_lo - target, f_hi = s_hi - target;
    double E;
    if (f_lo == 0.0) {
      E = win.e_min;
    } else if (f_hi == 0.0) {
      E = win.e_max;
    } else {
      std::uintmax_t iters = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(f, win.e_min, win.e_max, f_lo, f_hi,
                                                            boost::math::tools::eps_tolerance<double>(50), iters);
      E = std::abs(f(a)) <= std::abs(f(b)) ? a : b;
    }
    res.eigenvalues.push_back({k, E});
  }
  return res;
}

double quantization_function(const Potential& p, double E, double h, const MatchingConfig& cfg) {
  return connect(p, E, h, cfg).entries(0, 1);
}

SpectralResult eigenvalues_matched(const Potential& p, const EnergyWindow& win, double h, const MatchingConfig& cfg,
                                   unsigned threads) {
  SpectralResult res;
  res.h = h;
  res.method = Method::Matched;
  res.window = win;
  auto f = [&](double E) { return quantization_function(p, E, h, cfg); };
  double spacing = scan_spacing(p, win, h);
  for (int attempt = 0; attempt < 2; ++attempt, spacing *= 0.5) {
    res.eigenvalues.clear();
    for (double E : find_roots(f, win.e_min, win.e_max, spacing, 1e-11, threads))
      res.eigenvalues.push_back({ladder_index(p, E, h), E});
    if (ladder_consistent(res.eigenvalues)) return res;
  }
  fail(ErrorCode::BracketLost, "roots of the quantization function skip or repeat a ladder index after refining");
}

SpectralResult compute_spectrum(const Potential& p, const EnergyWindow& win, double h, Method method,
                                const SpectralConfig& cfg) {
  switch (method) {
    case Method::BsLeading: return bs_leading(p, win, h);
    case Method::Matched: return eigenvalues_matched(p, win, h, cfg.matching, cfg.threads);
    case Method::Oracle: return oracle_eigenvalues(p, win, h, cfg.oracle, cfg.threads);
  }
  fail(ErrorCode::InvalidArgument, "unknown method");
}

Alignment align(const SpectralResult& result, const SpectralResult& reference) {
  Alignment a;
  auto repeats = [](const SpectralResult& r) {
    std::set<long> seen;
    for (const auto& e : r.eigenvalues)
      if (!seen.insert(e.k).second) return true;
    return false;
  };
  a.ambiguous = repeats(result) || repeats(reference);
  for (const auto& e : result.eigenvalues) {
    const long j = reference.find(e.k);
    if (j < 0) continue;
    a.max_err = std::max(a.max_err, std::abs(e.E - reference.eigenvalues[static_cast<std::size_t>(j)].E));
    ++a.aligned;
  }
  if (a.aligned == 0) a.ambiguous = true;
  return a;
}

std::optional<StudySlope> StudyReport::slope(Method m) const {
  for (const auto& s : slopes)
    if (s.method == m) return s;
  return std::nullopt;
}

StudyReport convergence_study(const Potential& p, const EnergyWindow& win, const std::vector<double>& h_grid,
                              const std::vector<Method>& methods, const SpectralConfig& cfg) {
  if (h_grid.empty()) fail(ErrorCode::InvalidArgument, "empty h grid");
  StudyReport report;
  for (double h : h_grid) {
    const SpectralResult ref = oracle_eigenvalues(p, win, h, cfg.oracle, cfg.threads);
    for (Method m : methods) {
      const SpectralResult r = m == Method::Oracle ? ref : compute_spectrum(p, win, h, m, cfg);
      const Alignment a = align(r, ref);
      report.rows.push_back({h, m, a.max_err, a.aligned, a.ambiguous});
    }
  }
  for (Method m : methods) {
    std::vector<double> hs, errs;
    bool floor = true;
    for (const auto& row : report.rows) {
      if (row.method != m || row.alignment_failure) continue;
      if (row.max_err > kFloor) floor = false;
      if (row.max_err > 0.0) {
        hs.push_back(row.h);
        errs.push_back(row.max_err);
      }
    }
    StudySlope s;
    s.method = m;
    s.floor = floor;
    s.slope = hs.size() >= 2 ? slope_of(hs, errs) : 0.0;
    report.slopes.push_back(s);
  }
  return report;
}

void write_spectrum(std::ostream& out, const SpectralResult& r) {
  char buf[256];
  for (const auto& e : r.eigenvalues) {
    std::snprintf(buf, sizeof buf, "%.17g,%s,%ld,%.17g\n", r.h, to_string(r.method), e.k, e.E);
    out << buf;
  }
}

void write_study(std::ostream& out, const StudyReport& r) {
  char buf[256];
  for (const auto& row : r.rows) {
    const auto s = r.slope(row.method);
    if (!s || s->floor)
      std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,floor\n", row.h, to_string(row.method), row.max_err);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g\n", row.h, to_string(row.method), row.max_err, s->slope);
    out << buf;
  }
}

}  // namespace swkb
