#include <doctest.h>

#include <cmath>
#include <sstream>

#include "swkb/error.hpp"
#include "swkb/oracle.hpp"
#include "swkb/wkb.hpp"
#include "test_support.hpp"

using namespace swkb;
using test_support::error_code_of;
using test_support::loglog_slope;

namespace {

Potential free_particle() { return Potential(1.0, 1.0, WFunction::constant(0.0), true); }
Potential linear() { return Potential(1.0, 1.0, WFunction::constant(1.0)); }

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return xs;
}

}  // namespace

TEST_CASE("free particle quasimode is exact") {
  const auto q = build_quasimode(free_particle(), 1.0, 3, 0.01);
  for (double x : {0.01, 0.1, 0.5, 1.0}) {
    CHECK(std::abs(q.amplitude(0, x) - 1.0) < 1e-14);
    for (int k = 1; k <= 3; ++k) CHECK(std::abs(q.amplitude(k, x)) < 1e-14);
    CHECK(std::abs(q.S(x) - (x - 1.0)) < 1e-13);
    for (double h : {0.1, 0.01}) {
      for (int sign : {1, -1}) {
        const auto d = evaluate_quasimode(q, sign, h, x);
        const cplx expected = std::polar(1.0, sign * (x - 1.0) / h);
        CHECK(std::abs(d.value - expected) < 1e-11);
        CHECK(std::abs(d.h_derivative - cplx(0, sign) * expected) < 1e-11);
      }
      CHECK(residual(q, h, x) < 1e-14);
    }
  }
  CHECK(wronskian_defect(q, 0.01, log_grid(0.01, 1.0, 20)) < 1e-14);
}

TEST_CASE("linear potential amplitudes") {
  const double E = 2.0, x_lo = 1e-6;
  const auto q = build_quasimode(linear(), E, 2, x_lo);
  for (double x : {x_lo, 0.3, 1.0}) CHECK(q.amplitude(0, x) == doctest::Approx(std::pow(E - x, -0.25)).epsilon(1e-13));
  CHECK(std::abs(q.amplitude(1, 1.0)) < 1e-15);
  CHECK(std::abs(q.amplitude(2, 1.0)) < 1e-15);
  // a_1(x) = -(1/2) A_0(x) int_x^1 a_0'' A_0 with a_0'' A_0 = (5/16)(2 - y)^(-5/2)
  const double integral =
      test_support::simpson([&](double y) { return 5.0 / 16.0 * std::pow(E - y, -2.5); }, x_lo, 1.0, 100000);
  const double expected = -0.5 * std::pow(E - x_lo, -0.25) * integral;
  CHECK(std::abs(q.amplitude(1, x_lo) - expected) < 1e-8);
  CHECK(q.A(1, 0.5).real() == 0.0);
  CHECK(q.A(1, 0.5).imag() == doctest::Approx(q.amplitude(1, 0.5)));
}

TEST_CASE("A_1 series starts at gamma - 1") {
  const auto q = build_quasimode(Potential(0.5, 1.0, WFunction::constant(1.0)), 2.0, 2, 0.01);
  const auto& s = q.series(1);
  REQUIRE(!s.terms().empty());
  CHECK(s.lowest() == doctest::Approx(-0.5));
  CHECK(std::abs(s.coefficient({1, -1})) > 1e-6);
}

TEST_CASE("quasimode agrees with the propagated exact solution") {
  const double h = 1e-2, E = 2.0;
  const auto p = linear();
  const auto q = build_quasimode(p, E, 4, 0.05);
  const auto at_b = evaluate_quasimode(q, 1, h, 1.0);
  const auto exact = propagate(p, E, h, 1.0, 0.5, at_b);
  const auto wkb = evaluate_quasimode(q, 1, h, 0.5);
  CHECK(std::abs(wkb.value - exact.value) < 1e-7);
  CHECK(std::abs(wkb.h_derivative - exact.h_derivative) < 1e-7);
}

TEST_CASE("Wronskian at b") {
  // free particle: exactly 2ih
  const auto q0 = build_quasimode(free_particle(), 1.0, 2, 0.1);
  CHECK(wronskian_defect(q0, 0.05, {1.0}) < 1e-14);
  // in general h^2 W(b) = 2ih + i h^3 A_0(b)^3 A_0''(b) + O(h^5)
  const auto q = build_quasimode(Potential(1.0, 1.0, WFunction::polynomial({1.0, 0.5})), 2.5, 4, 0.1);
  const double a0 = q.amplitude(0, 1.0), a0pp = q.amplitude(0, 1.0, 2);
  std::vector<double> hs, rest;
  for (double h : {0.1, 0.05, 0.025}) {
    const auto up = evaluate_quasimode(q, 1, h, 1.0);
    const auto um = evaluate_quasimode(q, -1, h, 1.0);
    const cplx h2w = h * (up.h_derivative * um.value - up.value * um.h_derivative);
    const cplx predicted(0.0, 2.0 * h + h * h * h * a0 * a0 * a0 * a0pp);
    hs.push_back(h);
    rest.push_back(std::abs(h2w - predicted));
    CHECK(std::abs(h2w - cplx(0.0, 2.0 * h)) > 0.5 * h * h * h * std::abs(a0 * a0 * a0 * a0pp));
  }
  CHECK(loglog_slope(hs, rest) > 4.7);
}

TEST_CASE("Wronskian defect rate and monotonicity in N") {
  const auto p = linear();
  const double E = 2.0, eps = 0.2;
  std::vector<double> hs, defects;
  for (double h : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
    const double x_lo = std::pow(h, 1.0 - eps);
    const auto q = build_quasimode(p, E, 2, x_lo);
    hs.push_back(h);
    defects.push_back(wronskian_defect(q, h, log_grid(x_lo, 1.0, 40)));
  }
  CHECK(loglog_slope(hs, defects) >= eps * 4 - 0.3);

  // The defect is pinned by its value at b, i h^3 A_0^3 A_0''(b) + O(h^5), for every N.
  // What improves with N is the drift of h^2 W away from its value at b, two orders at a time.
  const double h = 1e-2, x_lo = std::pow(h, 1.0 - eps);
  std::vector<double> drift;
  for (int N = 1; N <= 4; ++N) {
    const auto q = build_quasimode(p, E, N, x_lo);
    const auto grid = log_grid(x_lo, 1.0, 40);
    const double a0 = q.amplitude(0, 1.0), a0pp = q.amplitude(0, 1.0, 2);
    CHECK(std::abs(wronskian_defect(q, h, grid) - std::pow(h, 3) * std::pow(a0, 3) * a0pp) < 1e-9);
    drift.push_back(wronskian_drift(q, h, grid));
  }
  CHECK(drift[2] < drift[0]);
  CHECK(drift[3] < drift[1]);
  CHECK(drift[1] < drift[0]);
}

TEST_CASE("residual rate at the matching point") {
  const auto p = Potential(0.5, 1.0, WFunction::polynomial({1.0, 0.5}));
  const double eps = 0.2;
  const int N = 2;
  std::vector<double> hs, rs;
  for (double h : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
    const double x = std::pow(h, 1.0 - eps);
    const auto q = build_quasimode(p, 2.5, N, x);
    hs.push_back(h);
    rs.push_back(residual(q, h, x));
  }
  CHECK(loglog_slope(hs, rs) >= eps * (N + 2) - 0.3);
}

TEST_CASE("residual at b matches a finite-difference residual") {
  const double E = 2.0, h = 0.2;
  const int N = 1;
  const auto q = build_quasimode(linear(), E, N, 0.05);
  // closed-form phase for V = x keeps quadrature noise out of the second difference
  auto S = [&](double x) { return -2.0 / 3.0 * (std::pow(E - x, 1.5) - std::pow(E - 1.0, 1.5)); };
  auto u = [&](double x) {
    cplx B = 0.0;
    for (int k = 0; k <= N; ++k) B += std::pow(h, k) * q.A(k, x);
    return std::polar(1.0, S(x) / h) * B;
  };
  // one-sided six-point second difference, Richardson-extrapolated in the spacing
  const double w[] = {15.0 / 4.0, -77.0 / 6.0, 107.0 / 6.0, -13.0, 61.0 / 12.0, -5.0 / 6.0};
  auto second = [&](double d) {
    cplx s = 0.0;
    for (int j = 0; j < 6; ++j) s += w[j] * u(1.0 - j * d);
    return s / (d * d);
  };
  const cplx upp = (16.0 * second(1e-3) - second(2e-3)) / 15.0;
  const double fd = std::abs(h * h * upp + (E - 1.0) * u(1.0));
  CHECK(std::abs(fd - residual(q, h, 1.0)) < 1e-6 * residual(q, h, 1.0));
}

TEST_CASE("amplitude bounds on a log grid down to 1e-6") {
  const double gamma = 0.5;
  const auto q = build_quasimode(Potential(gamma, 1.0, WFunction::polynomial({1.0, 0.5})), 2.5, 3, 1e-6);
  for (int k = 0; k <= 3; ++k) {
    auto worst = [&](double lo) {
      double value = 0.0, slope = 0.0;
      for (double x : log_grid(lo, 1.0, 60)) {
        value = std::max(value, std::abs(q.amplitude(k, x)) / (1.0 + std::pow(x, gamma - k)));
        slope = std::max(slope, std::abs(q.amplitude(k, x, 1)) * std::pow(x, k + 1 - gamma));
      }
      return std::make_pair(value, slope);
    };
    const auto coarse = worst(1e-4);
    const auto fine = worst(1e-6);
    CHECK(std::isfinite(fine.first));
    CHECK(fine.first <= 1.5 * coarse.first);
    CHECK(fine.second <= 1.5 * coarse.second + 1e-12);
  }
}

TEST_CASE("structural identities") {
  const auto q = build_quasimode(Potential(1.5, 1.0, WFunction::polynomial({1.0, 0.5})), 2.5, 4, 0.003);
  for (int k = 1; k <= 4; ++k) CHECK(std::abs(q.A(k, 1.0)) < 1e-12);
  for (double x : {0.003, 0.01, 0.4}) {
    const auto up = evaluate_quasimode(q, 1, 0.02, x);
    const auto um = evaluate_quasimode(q, -1, 0.02, x);
    CHECK(um.value == std::conj(up.value));
    CHECK(um.h_derivative == std::conj(up.h_derivative));
    CHECK(q.S_prime(x) > 0.0);
  }
  for (double gamma : {0.5, 1.0, 1.5}) {
    const double x_lo = 0.004;
    const auto qq = build_quasimode(Potential(gamma, 1.0, WFunction::polynomial({1.0, 0.5})), 2.5, 4, x_lo);
    for (double x : log_grid(x_lo, 4 * x_lo, 9)) {
      for (int k = 0; k <= 4; ++k) {
        const double g = qq.amplitude_grid(k, x), s = qq.amplitude_series(k, x);
        CHECK(std::abs(g - s) <= 1e-6 * std::abs(g));
      }
    }
  }
}

TEST_CASE("amplitude dump") {
  const auto q = build_quasimode(linear(), 2.0, 1, 0.1);
  std::ostringstream out;
  dump_amplitudes(out, q, {0.5, 1.0});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,k,re,im");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  CHECK(default_epsilon(1.0) == doctest::Approx(0.25));
}

TEST_CASE("quasimode errors") {
  const auto p = linear();
  const auto q = build_quasimode(p, 2.0, 1, 0.1);
  CHECK(error_code_of([&] { evaluate_quasimode(q, 1, 0.01, 0.05); }) == ErrorCode::OutOfDomain);
  QuasimodeOptions strict;
  strict.differentiation_tol = 1e-30;
  CHECK(error_code_of([&] { build_quasimode(p, 2.0, 2, 0.1, strict); }) == ErrorCode::DifferentiationUnstable);
  QuasimodeOptions short_series;
  short_series.series_order = 1.5;
  short_series.crossover_tol = 1e-12;
  CHECK(error_code_of([&] { build_quasimode(Potential(0.5, 1.0, WFunction::polynomial({1.0, 0.5})), 2.5, 2, 0.1, short_series); }) ==
        ErrorCode::RepresentationMismatch);
}
