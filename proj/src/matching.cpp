#include "swkb/matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

#include "swkb/error.hpp"
#include "swkb/parallel.hpp"

namespace swkb {
namespace {

using CMat = Eigen::Matrix2cd;

double condition_number(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  const auto& s = svd.singularValues();
  if (!(s(1) > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / s(1);
}

CMat columns(const CauchyDatum& a, const CauchyDatum& b) {
  CMat m;
  m << a.value, b.value, a.h_derivative, b.h_derivative;
  return m;
}

// h^{N+1} int_{x_h}^b |a_N''| a_0 dx, in the variable t = log x.
double exterior_budget(const Quasimode& q, double h, double x_h) {
  const int N = q.N();
  const double t0 = std::log(x_h), t1 = std::log(q.b());
  constexpr int panels = 64;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = t0 + (t1 - t0) * i / panels;
    const double b = t0 + (t1 - t0) * (i + 1) / panels;
    total += boost::math::quadrature::gauss<double, 10>::integrate(
        [&](double t) {
          const double x = std::min(std::exp(t), q.b());
          return std::abs(q.amplitude(N, x, 2)) * q.amplitude(0, x) * x;
        },
        a, b);
  }
  return std::pow(h, N + 1) * total;
}

double delta_of(const Potential& p, const MatchingConfig& cfg) {
  return cfg.delta_int > 0.0 ? cfg.delta_int : 0.5 * p.gamma();
}

}  // namespace

Eigen::Matrix2d free_rotation(double sigma, double h) {
  const double c = std::cos(sigma / h), s = std::sin(sigma / h);
  Eigen::Matrix2d d;
  d << c, -s, s, c;
  return d;
}

double matching_point(const Potential& p, double h, const MatchingConfig& cfg) {
  const double g = p.gamma();
  const double eps = (g - delta_of(p, cfg)) / (g + 1.0);
  return std::pow(h, 1.0 - eps);
}

TransferMatrix connect(const Potential& p, double E, double h, const MatchingConfig& cfg,
                       const Quasimode* prebuilt) {
  if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "h must be positive");
  if (!(cfg.imag_tol > 0.0) || !(cfg.condition_limit > 1.0))
    fail(ErrorCode::InvalidArgument, "matching tolerances must be positive");

  InteriorConfig icfg = interior_config(p, E, h, delta_of(p, cfg));
  icfg.richardson_tol = cfg.interior_richardson_tol;
  const double x_h = icfg.x_match();

  std::optional<Quasimode> own;
  const Quasimode* q = prebuilt;
  if (q) {
    if (q->E() != E || q->N() != cfg.N)
      fail(ErrorCode::InvalidArgument, "prebuilt quasimode has a different energy or order");
    if (q->x_lo() > x_h * (1.0 + 1e-12))
      fail(ErrorCode::OutOfDomain, "matching point lies below the quasimode grid");
  } else {
    own.emplace(build_quasimode(p, E, cfg.N, x_h, cfg.quasimode));
    q = &*own;
  }
  const double x_eval = std::max(x_h, q->x_lo());

  const auto [psi_p, psi_m] = solve_basis(p, icfg);
  const CMat Psi = columns(cauchy_at_matching(psi_p, icfg), cauchy_at_matching(psi_m, icfg));
  const CMat Uh = columns(evaluate_quasimode(*q, 1, h, x_eval), evaluate_quasimode(*q, -1, h, x_eval));
  const CMat Ub = columns(evaluate_quasimode(*q, 1, h, q->b()), evaluate_quasimode(*q, -1, h, q->b()));

  if (condition_number(Psi) > cfg.condition_limit)
    fail(ErrorCode::IllConditionedBasis, "interior basis is nearly degenerate at the matching point");
  if (condition_number(Ub) > cfg.condition_limit)
    fail(ErrorCode::IllConditionedBasis, "exterior basis is nearly degenerate at b");

  const double rE = std::sqrt(E);
  CMat Z0;
  Z0 << 1.0, 1.0, cplx(0.0, rE), cplx(0.0, -rE);
  const double qb = E - p.v(p.b());
  const CMat left = Eigen::Vector2cd(std::pow(E, 0.25), std::pow(E, -0.25)).asDiagonal();
  const CMat right = Eigen::Vector2cd(std::pow(qb, -0.25), std::pow(qb, 0.25)).asDiagonal();

  const CMat M = left * Z0 * Psi.partialPivLu().solve(Uh) * Ub.partialPivLu().solve(right);

  TransferMatrix out;
  out.entries = M.real();
  out.imag_defect = M.imag().cwiseAbs().maxCoeff();
  out.E = E;
  out.h = h;
  out.sigma = q->sigma();
  out.x_match = x_h;
  out.exterior_budget = exterior_budget(*q, h, x_eval);
  out.interior_budget = std::max(psi_p.error_estimate, psi_m.error_estimate) * std::max(1.0, rE);
  if (out.imag_defect > cfg.imag_tol)
    fail(ErrorCode::ToleranceExceeded,
         "imaginary part " + std::to_string(out.imag_defect) + " exceeds the configured bound");
  return out;
}

std::vector<TransferMatrix> transfer_sweep(const Potential& p, double E, const std::vector<double>& hs,
                                           const MatchingConfig& cfg, unsigned threads) {
  if (hs.empty()) return {};
  double x_lo = p.b();
  for (double h : hs) {
    if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "h must be positive");
    x_lo = std::min(x_lo, matching_point(p, h, cfg));
  }
  const Quasimode q = build_quasimode(p, E, cfg.N, x_lo, cfg.quasimode);
  std::vector<TransferMatrix> out(hs.size());
  parallel_for(hs.size(), threads, [&](std::size_t i) { out[i] = connect(p, E, hs[i], cfg, &q); });
  return out;
}

std::vector<CorrectionTerm> correction_basis(double gamma, int max_m, int max_n) {
  if (max_m < 0 || max_n < 0) fail(ErrorCode::InvalidArgument, "lattice bounds must be nonnegative");
  std::vector<CorrectionTerm> terms;
  for (int m = 0; m <= max_m; ++m) {
    for (int n = 0; n <= max_n; ++n) {
      if (m == 0 && n == 0) continue;
      const double e = m * gamma + n;
      const bool seen = std::any_of(terms.begin(), terms.end(),
                                    [&](const CorrectionTerm& t) { return std::abs(t.exponent - e) < 1e-12; });
      if (!seen) terms.push_back({0, m, n, e, 0.0, 0.0});
    }
  }
  std::sort(terms.begin(), terms.end(),
            [](const CorrectionTerm& a, const CorrectionTerm& b) { return a.exponent < b.exponent; });
  return terms;
}

namespace {

struct LsqResult {
  Eigen::VectorXd coeffs;
  double relative = 0.0;
  double rms = 0.0;
};

LsqResult least_squares(Eigen::MatrixXd A, const Eigen::VectorXd& rhs) {
  const Eigen::VectorXd scale = A.colwise().norm().transpose().cwiseMax(1e-300);
  for (Eigen::Index j = 0; j < A.cols(); ++j) A.col(j) /= scale(j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > 1e-12 * s(0)))
    fail(ErrorCode::RankDeficient, "correction design matrix is numerically singular; widen the h grid");
  LsqResult r;
  const Eigen::VectorXd y = svd.solve(rhs);
  const double res = (A * y - rhs).norm();
  r.coeffs = y.cwiseQuotient(scale);
  const double norm = rhs.norm();
  r.relative = norm > 0.0 ? res / norm : 0.0;
  r.rms = res / std::sqrt(static_cast<double>(rhs.size()));
  return r;
}

Eigen::MatrixXd design(const std::vector<TransferMatrix>& sweep, const std::vector<double>& exponents) {
  const auto rows = static_cast<Eigen::Index>(sweep.size());
  Eigen::MatrixXd A(rows, 2 * static_cast<Eigen::Index>(exponents.size()));
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& t = sweep[static_cast<std::size_t>(i)];
    const double c = std::cos(t.sigma / t.h), s = std::sin(t.sigma / t.h);
    for (std::size_t j = 0; j < exponents.size(); ++j) {
      const double hp = std::pow(t.h, exponents[j]);
      A(i, static_cast<Eigen::Index>(2 * j)) = c * hp;
      A(i, static_cast<Eigen::Index>(2 * j + 1)) = s * hp;
    }
  }
  return A;
}

Eigen::VectorXd entry_rhs(const std::vector<TransferMatrix>& sweep, int entry) {
  Eigen::VectorXd b(static_cast<Eigen::Index>(sweep.size()));
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const Eigen::Matrix2d diff = sweep[i].entries - free_rotation(sweep[i].sigma, sweep[i].h);
    b(static_cast<Eigen::Index>(i)) = diff(entry / 2, entry % 2);
  }
  return b;
}

}  // namespace

CorrectionFit fit_corrections(const std::vector<TransferMatrix>& sweep, double gamma, int max_m, int max_n) {
  const auto basis = correction_basis(gamma, max_m, max_n);
  if (basis.empty()) fail(ErrorCode::InvalidArgument, "empty correction lattice");
  if (sweep.size() < 4 * basis.size())
    fail(ErrorCode::InvalidArgument, "need at least twice as many h points as fitted coefficients");
  std::vector<double> exponents;
  for (const auto& t : basis) exponents.push_back(t.exponent);
  const Eigen::MatrixXd A = design(sweep, exponents);

  CorrectionFit fit;
  for (const auto& t : sweep) fit.h_grid.push_back(t.h);
  for (int entry = 0; entry < 4; ++entry) {
    const auto r = least_squares(A, entry_rhs(sweep, entry));
    fit.residual = std::max(fit.residual, r.relative);
    fit.rms_residual = std::max(fit.rms_residual, r.rms);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      CorrectionTerm term = basis[j];
      term.entry = entry;
      term.a_plus = r.coeffs(static_cast<Eigen::Index>(2 * j));
      term.a_minus = r.coeffs(static_cast<Eigen::Index>(2 * j + 1));
      fit.terms.push_back(term);
    }
  }
  return fit;
}

std::optional<double> CorrectionFit::smallest_active(double factor, double abs_floor) const {
  std::optional<double> best;
  const double floor = std::max(abs_floor, factor * rms_residual);
  const double h_max = h_grid.empty() ? 1.0 : *std::max_element(h_grid.begin(), h_grid.end());
  for (const auto& t : terms) {
    const double mag = std::max(std::abs(t.a_plus), std::abs(t.a_minus)) * std::pow(h_max, t.exponent);
    if (mag > floor && (!best || t.exponent < *best)) best = t.exponent;
  }
  return best;
}

ExponentProfile fit_leading_exponent(const std::vector<TransferMatrix>& sweep, const std::vector<double>& others,
                                     double lo, double hi) {
  if (!(lo < hi)) fail(ErrorCode::InvalidArgument, "exponent interval is empty");
  if (sweep.size() < 4 * (others.size() + 1))
    fail(ErrorCode::InvalidArgument, "need at least twice as many h points as fitted coefficients");
  auto residual = [&](double alpha) {
    std::vector<double> exponents{alpha};
    exponents.insert(exponents.end(), others.begin(), others.end());
    const Eigen::MatrixXd A = design(sweep, exponents);
    double total = 0.0, norm = 0.0;
    for (int entry = 0; entry < 4; ++entry) {
      const Eigen::VectorXd b = entry_rhs(sweep, entry);
      const auto r = least_squares(A, b);
      total += std::pow(r.relative * b.norm(), 2);
      norm += b.squaredNorm();
    }
    return norm > 0.0 ? std::sqrt(total / norm) : 0.0;
  };
  // coarse scan first: the profile need not be unimodal over the whole interval
  constexpr int n = 40;
  double best = lo, best_r = residual(lo);
  for (int i = 1; i <= n; ++i) {
    const double a = lo + (hi - lo) * i / n;
    const double r = residual(a);
    if (r < best_r) best = a, best_r = r;
  }
  const double step = (hi - lo) / n;
  const auto [a, r] = boost::math::tools::brent_find_minima(residual, std::max(lo, best - step),
                                                            std::min(hi, best + step), 40);
  return {a, r};
}

void write_transfer_row(std::ostream& out, const TransferMatrix& m) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", m.h, m.E, m.entries(0, 0),
                m.entries(0, 1), m.entries(1, 0), m.entries(1, 1), m.det(), m.imag_defect);
  out << buf;
}

void write_fit(std::ostream& out, const CorrectionFit& fit) {
  static const char* names[] = {"m11", "m12", "m21", "m22"};
  char buf[256];
  for (const auto& t : fit.terms) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%.17g,%.17g\n", names[t.entry], t.m, t.n, t.a_plus, t.a_minus);
    out << buf;
  }
}

}  // namespace swkb
