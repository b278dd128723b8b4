#include <doctest.h>

#include <cmath>
#include <sstream>

#include "swkb/error.hpp"
#include "swkb/interior.hpp"
#include "swkb/oracle.hpp"
#include "test_support.hpp"

using namespace swkb;
using test_support::error_code_of;
using test_support::loglog_slope;

namespace {

Potential free_particle() { return Potential(1.0, 1.0, WFunction::constant(0.0), true); }
Potential poly(double gamma, std::vector<double> w) { return Potential(gamma, 1.0, WFunction::polynomial(std::move(w))); }

double sup_dist(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("interior config") {
  const auto cfg = interior_config(poly(1.0, {1.0}), 1.0, 1e-2);
  CHECK(cfg.delta_int == doctest::Approx(0.5));
  CHECK(cfg.eps == doctest::Approx(0.25));
  CHECK(cfg.z_max == doctest::Approx(std::pow(1e-2, -0.25)));
  CHECK(cfg.z_max / cfg.n_grid <= 0.05);
  CHECK(cfg.x_match() == doctest::Approx(std::pow(1e-2, 0.75)));
  CHECK(delta_for_eps(1.0, 0.25) == doctest::Approx(0.5));
  const auto wide = interior_config(poly(1.5, {1.0}), 2.0, 1e-4, 0.1);
  CHECK(wide.z_max / wide.n_grid <= 0.05 + 1e-15);
  CHECK(error_code_of([] { interior_config(poly(1.0, {1.0}), 1.0, 1e-2, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("free interior solutions are plane waves") {
  const double E = 1.0;
  const auto cfg = interior_config(free_particle(), E, 1e-2);
  const auto [plus, minus] = solve_basis(free_particle(), cfg);
  for (std::size_t i = 0; i < plus.z.size(); i += 97) {
    CHECK(std::abs(plus.v[i] - std::polar(1.0, plus.z[i])) < 1e-14);
    CHECK(std::abs(minus.v_dot[i] - cplx(0, -1) * std::polar(1.0, -minus.z[i])) < 1e-14);
  }
  CHECK(operator_norm(free_particle(), cfg) == 0.0);
  const auto d = cauchy_at_matching(plus, cfg);
  CHECK(std::abs(d.value - std::polar(1.0, cfg.z_max)) < 1e-14);
  CHECK(std::abs(d.h_derivative - cplx(0, 1) * std::polar(1.0, cfg.z_max)) < 1e-14);
  const auto [cp, cm] = asymptotic_coefficients(plus, cfg);
  CHECK(std::abs(cp - 1.0) < 1e-14);
  CHECK(std::abs(cm) < 1e-14);
}

TEST_CASE("plug-back residual and Wronskian") {
  const double h = 1e-2, E = 1.0;
  const auto p = poly(1.0, {1.0});
  const auto cfg = interior_config(p, E, h, 0.5);
  const auto [plus, minus] = solve_basis(p, cfg);
  REQUIRE(plus.v[0] == cplx(1.0));
  CHECK(std::abs(plus.v_dot[0] - cplx(0, 1)) < 1e-15);
  CHECK(std::abs(minus.v_dot[0] - cplx(0, -1)) < 1e-15);
  const double dz = plus.z[1] - plus.z[0];
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < plus.z.size(); ++i) {
    const cplx vpp = (plus.v[i + 1] - 2.0 * plus.v[i] + plus.v[i - 1]) / (dz * dz);
    worst = std::max(worst, std::abs(vpp + plus.v[i] - h * plus.z[i] * plus.v[i]));
  }
  CHECK(worst <= 1e-6);
  for (std::size_t i = 0; i < plus.z.size(); ++i) {
    const cplx w = plus.v[i] * minus.v_dot[i] - plus.v_dot[i] * minus.v[i];
    CHECK(std::abs(w - cplx(0, -2)) < 2e-8);
  }
  // original variables: psi+ psi-' - psi+' psi- = -2i sqrt(E)/h
  const auto a = cauchy_at(plus, cfg, 0.3 * cfg.x_match());
  const auto b = cauchy_at(minus, cfg, 0.3 * cfg.x_match());
  const cplx w = (a.value * b.h_derivative - a.h_derivative * b.value) / h;
  CHECK(std::abs(w - cplx(0, -2.0 * std::sqrt(E) / h)) < 1e-8 * 2.0 * std::sqrt(E) / h);
}

TEST_CASE("operator norm") {
  const auto p = poly(1.0, {1.0});
  const double h = 1e-2;
  const auto cfg = interior_config(p, 1.0, h, 0.5);
  const double exact = h * cfg.z_max * cfg.z_max / 2.0;
  CHECK(operator_norm(p, cfg) == doctest::Approx(exact).epsilon(1e-12));
  const double ratio = operator_norm(p, cfg) / std::sqrt(h);
  CHECK(ratio >= 0.1);
  CHECK(ratio <= 10.0);

  std::vector<double> hs, norms;
  for (double hh = 1e-1; hh > 5e-4; hh /= 2) {
    hs.push_back(hh);
    norms.push_back(operator_norm(p, interior_config(p, 1.0, hh, 0.5)));
  }
  CHECK(std::abs(loglog_slope(hs, norms) - 0.5) <= 0.05);

  for (double gamma : {0.5, 1.0, 1.5}) {
    const auto q = poly(gamma, {1.0, 0.5});
    const double E = 2.5;
    const auto c = interior_config(q, E, 1e-2);
    const double kappa = std::pow(1e-2, gamma) * std::pow(E, -1.0 - gamma / 2.0);
    const double bound = kappa * std::pow(c.z_max, gamma + 1.0) / (gamma + 1.0);
    const double w_max = 1.0 + 0.5 * c.x_match() / std::sqrt(E) * std::sqrt(E);
    const double norm = operator_norm(q, c);
    CHECK(norm <= 1.1 * w_max * bound);
    CHECK(norm >= 0.9 * bound);
  }
}

TEST_CASE("Volterra identity, contraction and oracle agreement") {
  for (double gamma : {0.5, 1.0, 1.5}) {
    const auto p = poly(gamma, {1.0, 0.5});
    const double E = 2.5, h = 1e-2;
    const auto cfg = interior_config(p, E, h);
    for (int sign : {1, -1}) {
      const auto sol = solve_branch(p, cfg, sign);
      std::vector<cplx> e(sol.z.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::polar(1.0, sign * sol.z[i]);
      const auto kv = apply_volterra(p, cfg, sol.v).first;
      std::vector<cplx> rhs(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) rhs[i] = e[i] + kv[i];
      CHECK(sup_dist(sol.v, rhs) <= 2.0 * sol.trapezoid_error);

      const auto inc = picard_increments(p, cfg, sign, 8);
      for (std::size_t i = 1; i < inc.size() && inc[i] > 1e-13; ++i) CHECK(inc[i] / inc[i - 1] <= 1.5 * sol.norm);

      const auto d = cauchy_at_matching(sol, cfg);
      CHECK(std::abs(d.value) >= 1.0 - 2.0 * sol.norm);
      CHECK(std::abs(d.value) <= 1.0 + 2.0 * sol.norm);
      OracleConfig oc;
      oc.rtol = 1e-13;
      oc.atol = 1e-15;
      const auto exact = propagate(p, E, h, 0.0, cfg.x_match(), {1.0, cplx(0, sign * std::sqrt(E)), 0.0, h}, oc);
      const double tol = 10.0 * sol.trapezoid_error + 10.0 * oc.rtol;
      CHECK(std::abs(d.value - exact.value) <= tol);
      CHECK(std::abs(d.h_derivative - exact.h_derivative) <= tol * std::sqrt(E));

      const auto [cp, cm] = asymptotic_coefficients(sol, cfg);
      if (sign > 0) {
        CHECK(std::abs(cp - 1.0) <= 2.0 * sol.norm);
        CHECK(std::abs(cm) <= 2.0 * sol.norm);
      }
    }
  }
}

TEST_CASE("reflection coefficient decays at the exponent-set rate") {
  for (double gamma : {0.5, 1.0, 1.5}) {
    const auto p = poly(gamma, {1.0, 0.5});
    std::vector<double> hs, cms;
    double eps = 0.0;
    for (double h : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
      const auto cfg = interior_config(p, 2.5, h);
      eps = cfg.eps;
      hs.push_back(h);
      cms.push_back(std::abs(asymptotic_coefficients(solve_branch(p, cfg, 1), cfg).second));
    }
    // smallest positive element of {m gamma + n} and {eps l + (1 - eps)(m gamma + n)}
    double smallest = INFINITY;
    for (int l = 0; l <= 4; ++l)
      for (int m = 0; m <= 4; ++m)
        for (int n = 0; n <= 4; ++n) {
          const double base = m * gamma + n;
          if (base > 0) smallest = std::min(smallest, base);
          const double mixed = eps * l + (1 - eps) * base;
          if (mixed > 0) smallest = std::min(smallest, mixed);
        }
    CHECK(loglog_slope(hs, cms) >= smallest - 0.2);
  }
}

TEST_CASE("Neumann truncation") {
  const auto p = poly(1.0, {1.0, 1.0});
  SUBCASE("empty tuple") {
    const auto cfg = interior_config(p, 1.0, 1e-2);
    const auto tuples = neumann_tuples(p, cfg, 0.4);
    REQUIRE(tuples.size() == 1);
    CHECK(tuples[0].empty());
    const auto sol = solve_branch(p, cfg, 1);
    double dist = 0.0;
    for (std::size_t i = 0; i < sol.z.size(); ++i) dist = std::max(dist, std::abs(sol.v[i] - std::polar(1.0, sol.z[i])));
    CHECK(neumann_compare(p, cfg, 0.4) >= dist);
    CHECK(dist <= 2.0 * sol.norm);
  }
  SUBCASE("D = 2 delta decays at rate D") {
    std::vector<double> hs, ds;
    double D = 0.0;
    for (double h : {1e-1, 3e-2, 1e-2}) {
      const auto cfg = interior_config(p, 1.0, h);
      D = 2.0 * cfg.delta_int;
      const auto tuples = neumann_tuples(p, cfg, D);
      CHECK(tuples.size() == 2);
      hs.push_back(h);
      ds.push_back(neumann_compare(p, cfg, D));
    }
    CHECK(loglog_slope(hs, ds) >= D - 0.2);
  }
  SUBCASE("L_0 equals K for constant W") {
    const auto c = poly(0.5, {1.7});
    const auto cfg = interior_config(c, 2.0, 1e-2);
    const auto g = solve_branch(c, cfg, 1).z;
    std::vector<cplx> e(g.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::polar(1.0, g[i]);
    CHECK(sup_dist(apply_l(c, cfg, 0, e), apply_volterra(c, cfg, e).first) < 1e-10);
  }
  SUBCASE("tuple counting") {
    const auto cfg = interior_config(p, 1.0, 1e-2);
    // delta = 1/2, d = 3/4: n_0 = 2 and n_1 = 1 for D = 1.3
    const auto tuples = neumann_tuples(p, cfg, 1.3);
    CHECK(tuples.size() == 1 + 2 + 3 + 3);
  }
  SUBCASE("Taylor order") {
    const Potential custom(1.0, 1.0, WFunction::custom([](double x) { return std::exp(x); }, {1.0}));
    const auto cfg = interior_config(custom, 1.0, 1e-2);
    CHECK(error_code_of([&] { neumann_compare(custom, cfg, 1.5); }) == ErrorCode::TaylorOrderInsufficient);
  }
}

TEST_CASE("halving eps gives the same datum at a common point") {
  const auto p = poly(1.0, {1.0, 0.5});
  const double h = 1e-2, E = 2.5;
  const auto a = interior_config(p, E, h);
  const auto b = interior_config(p, E, h, delta_for_eps(1.0, a.eps / 2.0));
  CHECK(b.x_match() < a.x_match());
  const auto sa = solve_branch(p, a, 1);
  const auto sb = solve_branch(p, b, 1);
  const auto da = cauchy_at(sa, a, b.x_match());
  const auto db = cauchy_at_matching(sb, b);
  CHECK(std::abs(da.value - db.value) < 1e-10);
  CHECK(std::abs(da.h_derivative - db.h_derivative) < 1e-10);
}

TEST_CASE("interior errors and dump") {
  const auto strong = poly(1.0, {200.0});
  CHECK(error_code_of([&] { solve_branch(strong, interior_config(strong, 1.0, 1e-1), 1); }) ==
        ErrorCode::ContractionFailure);
  const auto p = poly(1.0, {1.0});
  auto cfg = interior_config(p, 1.0, 1e-2);
  cfg.richardson_tol = 1e-30;
  CHECK(error_code_of([&] { solve_branch(p, cfg, 1); }) == ErrorCode::GridTooCoarse);
  cfg.richardson_tol = 1e-8;
  cfg.n_grid = 40;
  std::ostringstream out;
  dump_interior(out, solve_branch(p, cfg, 1));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "z,re_v,im_v,re_v_dot,im_v_dot");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 41);
}
