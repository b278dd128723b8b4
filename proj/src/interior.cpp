#include "swkb/interior.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "swkb/error.hpp"

namespace swkb {

namespace {

struct Weights {
  std::vector<double> left, right;
};

/// Product-trapezoid weights for t^a on a uniform grid of n intervals of width dz:
/// int_{z_k}^{z_{k+1}} t^a phi = left_k phi_k + right_k phi_{k+1} for linear phi.
/// The moments int_0^1 (k+s)^a ds and int_0^1 (k+s)^a s ds are cached per exponent.
Weights product_weights(double a, double dz, std::size_t n) {
  static std::mutex mutex;
  static std::map<double, std::pair<std::vector<double>, std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& [i0, i1] = cache[a];
  for (std::size_t k = i0.size(); k < n; ++k) {
    if (k == 0) {
      i0.push_back(1.0 / (a + 1.0));
      i1.push_back(1.0 / (a + 2.0));
      continue;
    }
    const double kk = static_cast<double>(k);
    using Gauss = boost::math::quadrature::gauss<double, 20>;
    i0.push_back(Gauss::integrate([&](double s) { return std::pow(kk + s, a); }, 0.0, 1.0));
    i1.push_back(Gauss::integrate([&](double s) { return std::pow(kk + s, a) * s; }, 0.0, 1.0));
  }
  Weights w{std::vector<double>(n), std::vector<double>(n)};
  const double scale = std::pow(dz, a + 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    w.left[k] = scale * (i0[k] - i1[k]);
    w.right[k] = scale * i1[k];
  }
  return w;
}

struct Grid {
  std::vector<double> z, c, s;
  double dz;
  Grid(double z_max, std::size_t n) : z(n + 1), c(n + 1), s(n + 1), dz(z_max / static_cast<double>(n)) {
    for (std::size_t i = 0; i <= n; ++i) {
      z[i] = i == n ? z_max : dz * static_cast<double>(i);
      c[i] = std::cos(z[i]);
      s[i] = std::sin(z[i]);
    }
  }
  std::size_t intervals() const { return z.size() - 1; }
};

/// Smooth factor of f on the grid: kappa W(h z / sqrt E).
std::vector<double> smooth_factor(const Potential& p, const InteriorConfig& cfg, const Grid& g) {
  const double gamma = p.gamma();
  const double kappa = std::pow(cfg.h, gamma) * std::pow(cfg.E, -1.0 - 0.5 * gamma);
  const double scale = cfg.h / std::sqrt(cfg.E);
  std::vector<double> f(g.z.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = p.degenerate() ? 0.0 : kappa * p.w_at(std::min(scale * g.z[i], p.b()));
  return f;
}

/// Solves v = e + K v (phi == nullptr) or evaluates K phi, with v' alongside.
void march(const Grid& g, const Weights& w, const std::vector<double>& f, int sign, const std::vector<cplx>* phi,
           std::vector<cplx>& v, std::vector<cplx>& vd) {
  const std::size_t n = g.intervals();
  v.resize(n + 1);
  vd.resize(n + 1);
  const bool solve = phi == nullptr;
  auto e = [&](std::size_t i) { return solve ? cplx(g.c[i], sign * g.s[i]) : cplx(0.0); };
  // derivative of e: i sign e^{i sign z}
  auto e_dot = [&](std::size_t i) { return solve ? cplx(-g.s[i], sign * g.c[i]) : cplx(0.0); };
  auto val = [&](std::size_t i) { return solve ? v[i] : (*phi)[i]; };
  v[0] = e(0);
  vd[0] = e_dot(0);
  cplx C = 0.0, S = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t k = i - 1;
    const cplx left = w.left[k] * f[k] * val(k);
    C += g.c[k] * left;
    S += g.s[k] * left;
    // the right-end term has kernel sin(0) = 0, so v_i is explicit
    v[i] = e(i) + g.s[i] * C - g.c[i] * S;
    const cplx right = w.right[k] * f[i] * val(i);
    C += g.c[i] * right;
    S += g.s[i] * right;
    vd[i] = e_dot(i) + g.c[i] * C + g.s[i] * S;
  }
}

double sup_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double norm_on(const Grid& g, const Weights& w, const std::vector<double>& f) {
  double total = 0.0;
  for (std::size_t k = 0; k < g.intervals(); ++k) total += w.left[k] * std::abs(f[k]) + w.right[k] * std::abs(f[k + 1]);
  return total;
}

}  // namespace

double InteriorConfig::x_match() const { return std::pow(h, 1.0 - eps); }

double delta_for_eps(double gamma, double eps) { return gamma - eps * (gamma + 1.0); }

InteriorConfig interior_config(const Potential& p, double E, double h, double delta_int, double max_dz) {
  const double gamma = p.gamma();
  if (!(E > 0.0)) fail(ErrorCode::NonPositiveEnergy, "interior problem needs E > 0");
  if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "h must be positive");
  if (delta_int <= 0.0) delta_int = 0.5 * gamma;
  if (!(delta_int < gamma)) fail(ErrorCode::InvalidArgument, "delta_int must lie in (0, gamma)");
  InteriorConfig cfg;
  cfg.h = h;
  cfg.E = E;
  cfg.delta_int = delta_int;
  cfg.eps = (gamma - delta_int) / (gamma + 1.0);
  cfg.z_max = std::sqrt(E) * std::pow(h, -cfg.eps);
  if (!(cfg.x_match() < p.b())) fail(ErrorCode::InvalidArgument, "matching point h^(1-eps) is not inside (0, b)");
  const double dz = std::min(max_dz, cfg.z_max / 2000.0);
  const double n = std::ceil(cfg.z_max / dz - 1e-9);
  if (n > 1e6) fail(ErrorCode::InvalidArgument, "interior grid would exceed 1e6 points");
  cfg.n_grid = static_cast<std::size_t>(n);
  return cfg;
}

std::pair<cplx, cplx> InteriorSolution::at(double zz) const {
  const std::size_t n = z.size() - 1;
  if (!(zz >= 0.0 && zz <= z[n] * (1.0 + 1e-12))) fail(ErrorCode::OutOfDomain, "z outside the interior grid");
  const double dz = z[n] / static_cast<double>(n);
  auto i = static_cast<std::size_t>(std::floor(zz / dz));
  i = std::min(i, n - 1);
  const double hgt = z[i + 1] - z[i];
  const double t = std::clamp((zz - z[i]) / hgt, 0.0, 1.0);
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double p0 = 1 - 10 * t3 + 15 * t4 - 6 * t5, p1 = 10 * t3 - 15 * t4 + 6 * t5;
  const double d0 = t - 6 * t3 + 8 * t4 - 3 * t5, d1 = -4 * t3 + 7 * t4 - 3 * t5;
  const double s0 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5), s1 = 0.5 * (t3 - 2 * t4 + t5);
  const double p0p = -30 * t2 + 60 * t3 - 30 * t4;
  const double d0p = 1 - 18 * t2 + 32 * t3 - 15 * t4, d1p = -12 * t2 + 28 * t3 - 15 * t4;
  const double s0p = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4), s1p = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
  const cplx value = p0 * v[i] + p1 * v[i + 1] + hgt * (d0 * v_dot[i] + d1 * v_dot[i + 1]) +
                     hgt * hgt * (s0 * v_ddot[i] + s1 * v_ddot[i + 1]);
  const cplx deriv = p0p * (v[i] - v[i + 1]) / hgt + d0p * v_dot[i] + d1p * v_dot[i + 1] +
                     hgt * (s0p * v_ddot[i] + s1p * v_ddot[i + 1]);
  return {value, deriv};
}

double operator_norm(const Potential& p, const InteriorConfig& cfg) {
  const Grid g(cfg.z_max, cfg.n_grid);
  return norm_on(g, product_weights(p.gamma(), g.dz, g.intervals()), smooth_factor(p, cfg, g));
}

namespace {

/// Grids n, 2n, 4n with their weights and smooth factors, shared by both branches.
struct Levels {
  std::vector<Grid> grids;
  std::vector<Weights> weights;
  std::vector<std::vector<double>> f;
  double norm = 0.0;

  Levels(const Potential& p, const InteriorConfig& cfg) {
    for (int level = 0; level < 3; ++level) {
      grids.emplace_back(cfg.z_max, cfg.n_grid << level);
      weights.push_back(product_weights(p.gamma(), grids.back().dz, grids.back().intervals()));
      f.push_back(smooth_factor(p, cfg, grids.back()));
    }
    norm = norm_on(grids[0], weights[0], f[0]);
    if (norm >= cfg.contraction_limit) {
      std::ostringstream msg;
      msg << "Volterra norm bound " << norm << " >= " << cfg.contraction_limit;
      fail(ErrorCode::ContractionFailure, msg.str());
    }
  }
};

// three levels n, 2n, 4n; Richardson on the O(dz^2) error at the base nodes
InteriorSolution solve_on(const Potential& p, const InteriorConfig& cfg, const Levels& lv, int sign) {
  InteriorSolution sol;
  sol.sign = sign;
  sol.norm = lv.norm;
  std::vector<std::vector<cplx>> vs(3), vds(3);
  for (int level = 0; level < 3; ++level) march(lv.grids[level], lv.weights[level], lv.f[level], sign, nullptr, vs[level], vds[level]);
  const Grid& base = lv.grids[0];
  sol.z = base.z;
  sol.v.resize(base.z.size());
  sol.v_dot.resize(base.z.size());
  for (std::size_t i = 0; i < base.z.size(); ++i) {
    const cplx r1 = (4.0 * vs[1][2 * i] - vs[0][i]) / 3.0;
    const cplx r2 = (4.0 * vs[2][4 * i] - vs[1][2 * i]) / 3.0;
    const cplx d1 = (4.0 * vds[1][2 * i] - vds[0][i]) / 3.0;
    const cplx d2 = (4.0 * vds[2][4 * i] - vds[1][2 * i]) / 3.0;
    sol.v[i] = r2;
    sol.v_dot[i] = d2;
    sol.error_estimate = std::max({sol.error_estimate, std::abs(r2 - r1), std::abs(d2 - d1)});
    sol.trapezoid_error = std::max({sol.trapezoid_error, 4.0 / 3.0 * std::abs(vs[1][2 * i] - vs[0][i]),
                                    4.0 / 3.0 * std::abs(vds[1][2 * i] - vds[0][i])});
  }
  const auto& f = lv.f[0];
  sol.v_ddot.resize(base.z.size());
  for (std::size_t i = 0; i < base.z.size(); ++i)
    sol.v_ddot[i] = (f[i] * std::pow(base.z[i], p.gamma()) - 1.0) * sol.v[i];
  if (sol.error_estimate > cfg.richardson_tol) {
    std::ostringstream msg;
    msg << "Richardson disagreement " << sol.error_estimate << " exceeds " << cfg.richardson_tol;
    fail(ErrorCode::GridTooCoarse, msg.str());
  }
  return sol;
}

}  // namespace

InteriorSolution solve_branch(const Potential& p, const InteriorConfig& cfg, int sign) {
  if (sign != 1 && sign != -1) fail(ErrorCode::InvalidArgument, "sign must be +1 or -1");
  return solve_on(p, cfg, Levels(p, cfg), sign);
}

std::pair<InteriorSolution, InteriorSolution> solve_basis(const Potential& p, const InteriorConfig& cfg) {
  const Levels lv(p, cfg);
  return {solve_on(p, cfg, lv, 1), solve_on(p, cfg, lv, -1)};
}

CauchyDatum cauchy_at_matching(const InteriorSolution& sol, const InteriorConfig& cfg) {
  return {sol.v.back(), std::sqrt(cfg.E) * sol.v_dot.back(), cfg.x_match(), cfg.h};
}

CauchyDatum cauchy_at(const InteriorSolution& sol, const InteriorConfig& cfg, double x) {
  const auto [v, vd] = sol.at(std::sqrt(cfg.E) * x / cfg.h);
  return {v, std::sqrt(cfg.E) * vd, x, cfg.h};
}

std::pair<cplx, cplx> asymptotic_coefficients(const InteriorSolution& sol, const InteriorConfig& cfg) {
  const cplx v = sol.v.back(), vd = sol.v_dot.back();
  const cplx i(0.0, 1.0);
  const cplx plus = 0.5 * (v - i * vd) * std::polar(1.0, -cfg.z_max);
  const cplx minus = 0.5 * (v + i * vd) * std::polar(1.0, cfg.z_max);
  return {plus, minus};
}

std::pair<std::vector<cplx>, std::vector<cplx>> apply_volterra(const Potential& p, const InteriorConfig& cfg,
                                                               const std::vector<cplx>& phi) {
  const Grid g(cfg.z_max, cfg.n_grid);
  if (phi.size() != g.z.size()) fail(ErrorCode::InvalidArgument, "phi must be sampled on the base grid");
  std::vector<cplx> out, deriv;
  march(g, product_weights(p.gamma(), g.dz, g.intervals()), smooth_factor(p, cfg, g), 1, &phi, out, deriv);
  return {out, deriv};
}

namespace {

double taylor_coefficient(const Potential& p, int j) {
  const auto& w = p.w_taylor();
  if (static_cast<std::size_t>(j) < w.size()) return w[static_cast<std::size_t>(j)];
  if (p.w().taylor_exact() || p.degenerate()) return 0.0;
  std::ostringstream msg;
  msg << "Taylor coefficient w_" << j << " of W is not available";
  fail(ErrorCode::TaylorOrderInsufficient, msg.str());
}

std::vector<cplx> apply_l_on(const Potential& p, const InteriorConfig& cfg, const Grid& g, int j,
                             const std::vector<cplx>& phi) {
  const double gamma = p.gamma();
  const double c = p.degenerate() ? 0.0
                                  : taylor_coefficient(p, j) * std::pow(cfg.h, gamma + j) *
                                        std::pow(cfg.E, -1.0 - 0.5 * gamma - 0.5 * j);
  const std::vector<double> f(g.z.size(), c);
  std::vector<cplx> out, deriv;
  march(g, product_weights(gamma + j, g.dz, g.intervals()), f, 1, &phi, out, deriv);
  return out;
}

}  // namespace

std::vector<cplx> apply_l(const Potential& p, const InteriorConfig& cfg, int j, const std::vector<cplx>& phi) {
  const Grid g(cfg.z_max, cfg.n_grid);
  if (phi.size() != g.z.size()) fail(ErrorCode::InvalidArgument, "phi must be sampled on the base grid");
  return apply_l_on(p, cfg, g, j, phi);
}

namespace {

/// n_j for j = 0, 1, ... while positive.
std::vector<int> neumann_counts(const Potential& p, const InteriorConfig& cfg, double D) {
  const double gamma = p.gamma();
  const double d = (1.0 + cfg.delta_int) / (1.0 + gamma);
  std::vector<int> counts;
  for (int j = 0;; ++j) {
    const double dj = cfg.delta_int + j * d;
    const int n = std::max(0, static_cast<int>(std::ceil(D / dj - 1e-12)) - 1);
    if (n == 0) break;
    counts.push_back(n);
  }
  return counts;
}

}  // namespace

std::vector<std::vector<int>> neumann_tuples(const Potential& p, const InteriorConfig& cfg, double D) {
  auto counts = neumann_counts(p, cfg, D);
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  std::function<void()> visit = [&] {
    out.push_back(current);
    if (out.size() > 100000) fail(ErrorCode::InvalidArgument, "Neumann truncation has too many tuples");
    for (std::size_t j = 0; j < counts.size(); ++j) {
      if (counts[j] == 0) continue;
      --counts[j];
      current.push_back(static_cast<int>(j));
      visit();
      current.pop_back();
      ++counts[j];
    }
  };
  visit();
  return out;
}

double neumann_compare(const Potential& p, const InteriorConfig& cfg, double D) {
  auto counts = neumann_counts(p, cfg, D);
  for (std::size_t j = 0; j < counts.size(); ++j) taylor_coefficient(p, static_cast<int>(j));
  const Grid g(cfg.z_max, cfg.n_grid);
  const auto [plus, minus] = solve_basis(p, cfg);
  double worst = 0.0;
  for (const auto* sol : {&plus, &minus}) {
    std::vector<cplx> e(g.z.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::polar(1.0, sol->sign * g.z[i]);
    // T_D e = sum over tuples of L_{j1} ... L_{jr} e, built by prepending indices
    std::vector<cplx> total = e;
    std::function<void(const std::vector<cplx>&)> visit = [&](const std::vector<cplx>& phi) {
      for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] == 0) continue;
        --counts[j];
        const auto next = apply_l_on(p, cfg, g, static_cast<int>(j), phi);
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += next[i];
        visit(next);
        ++counts[j];
      }
    };
    visit(e);
    worst = std::max(worst, sup_diff(sol->v, total));
  }
  return worst;
}

std::vector<double> picard_increments(const Potential& p, const InteriorConfig& cfg, int sign, int iterations) {
  const Grid g(cfg.z_max, cfg.n_grid);
  const auto w = product_weights(p.gamma(), g.dz, g.intervals());
  const auto f = smooth_factor(p, cfg, g);
  std::vector<cplx> e(g.z.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::polar(1.0, sign * g.z[i]);
  std::vector<cplx> current = e, kv, kvd;
  std::vector<double> out;
  for (int it = 0; it < iterations; ++it) {
    march(g, w, f, 1, &current, kv, kvd);
    std::vector<cplx> next(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) next[i] = e[i] + kv[i];
    out.push_back(sup_diff(next, current));
    current = std::move(next);
  }
  return out;
}

void dump_interior(std::ostream& out, const InteriorSolution& sol) {
  out << "z,re_v,im_v,re_v_dot,im_v_dot\n";
  char buf[160];
  for (std::size_t i = 0; i < sol.z.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", sol.z[i], sol.v[i].real(), sol.v[i].imag(),
                  sol.v_dot[i].real(), sol.v_dot[i].imag());
    out << buf;
  }
}

}  // namespace swkb
