#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/airy.hpp>

#include "swkb/error.hpp"
#include "swkb/oracle.hpp"
#include "test_support.hpp"

using namespace swkb;
using test_support::error_code_of;

namespace {

Potential free_particle() { return Potential(1.0, 1.0, WFunction::constant(0.0), true); }
Potential linear() { return Potential(1.0, 1.0, WFunction::constant(1.0)); }

cplx wronskian(const CauchyDatum& a, const CauchyDatum& b) {
  return a.value * b.h_derivative - a.h_derivative * b.value;
}

}  // namespace

TEST_CASE("free propagation is a pure phase") {
  const double h = 1e-2;
  const auto d = propagate(free_particle(), 1.0, h, 1.0, 0.0, {1.0, cplx(0, 1), 1.0, h});
  const cplx expected = std::exp(cplx(0, -1.0 / h));
  CHECK(std::abs(std::abs(d.value) - 1.0) < 1e-9);
  CHECK(std::abs(d.value - expected) < 1e-9);
  CHECK(std::abs(d.h_derivative - cplx(0, 1) * expected) < 1e-9);
  CHECK(d.at == 0.0);
}

TEST_CASE("linear potential agrees with Airy functions") {
  for (double h : {1e-2, 3e-3}) {
    for (double E : {1.5, 2.0, 3.0}) {
      const double c = std::pow(h, -2.0 / 3.0);
      auto ai = [&](double x) { return boost::math::airy_ai(c * (x - E)); };
      auto aip = [&](double x) { return h * c * boost::math::airy_ai_prime(c * (x - E)); };
      auto bi = [&](double x) { return boost::math::airy_bi(c * (x - E)); };
      auto bip = [&](double x) { return h * c * boost::math::airy_bi_prime(c * (x - E)); };
      // u = Ai + i Bi stays O(1) in the allowed region
      const CauchyDatum start{cplx(ai(1.0), bi(1.0)), cplx(aip(1.0), bip(1.0)), 1.0, h};
      const auto d = propagate(linear(), E, h, 1.0, 0.0, start);
      CHECK(std::abs(d.value - cplx(ai(0.0), bi(0.0))) < 1e-7);
      CHECK(std::abs(d.h_derivative - cplx(aip(0.0), bip(0.0))) < 1e-7);
    }
  }
}

TEST_CASE("Wronskian of two propagations is constant across checkpoints") {
  const Potential p(0.5, 1.0, WFunction::polynomial({1.0, 0.5}));
  const double h = 5e-3, E = 2.5;
  CauchyDatum u{1.0, 0.0, 1.0, h}, v{0.0, 1.0, 1.0, h};
  const cplx w0 = wronskian(u, v);
  double x = 1.0;
  for (int i = 1; i <= 10; ++i) {
    const double next = 1.0 - 0.1 * i;
    u = propagate(p, E, h, x, std::max(next, 0.0), u);
    v = propagate(p, E, h, x, std::max(next, 0.0), v);
    x = std::max(next, 0.0);
    CHECK(std::abs(wronskian(u, v) - w0) / std::abs(w0) < 1e-8);
  }
}

TEST_CASE("propagation is reversible") {
  const Potential p(1.5, 1.0, WFunction::polynomial({1.0, 0.5}));
  OracleConfig cfg;
  const double h = 1e-2, E = 2.5;
  const CauchyDatum start{0.3, cplx(0.0, 1.2), 1.0, h};
  const auto there = propagate(p, E, h, 1.0, 0.0, start, cfg);
  const auto back = propagate(p, E, h, 0.0, 1.0, there, cfg);
  const double scale = std::abs(start.value) + std::abs(start.h_derivative);
  CHECK(std::abs(back.value - start.value) <= 10 * cfg.rtol * scale);
  CHECK(std::abs(back.h_derivative - start.h_derivative) <= 10 * cfg.rtol * scale);
}

TEST_CASE("graded mesh is needed near a Holder singularity") {
  const Potential p(0.5, 1.0, WFunction::constant(1.0));
  const double h = 1e-2, E = 2.0, a = 0.05;
  OracleConfig ref;
  ref.rtol = 1e-15;
  ref.atol = 1e-17;
  const CauchyDatum start{1.0, 0.0, a, h};
  const cplx exact = propagate(p, E, h, a, 0.0, start, ref).value;

  auto run = [&](int g, double tol, std::size_t& steps) {
    OracleConfig cfg;
    cfg.rtol = tol;
    cfg.atol = tol * 1e-2;
    cfg.grading_exponent = g;
    OracleStats st;
    const double err = std::abs(propagate(p, E, h, a, 0.0, start, cfg, &st).value - exact);
    steps = st.accepted + st.rejected;
    return err;
  };
  std::size_t steps = 0;
  CHECK(run(4, 1e-10, steps) < 1e-10);

  auto cheapest = [&](int g, double target) {
    for (double tol = 1e-6; tol > 1e-16; tol /= 1.5) {
      std::size_t n = 0;
      if (run(g, tol, n) <= target) return n;
    }
    return std::size_t(0);
  };
  const auto ungraded = cheapest(1, 1e-12);
  const auto graded = cheapest(4, 1e-12);
  REQUIRE(graded > 0);
  REQUIRE(ungraded > 0);
  MESSAGE("steps at 1e-12: ungraded ", ungraded, " graded ", graded);
  CHECK(2 * graded <= ungraded);
}

TEST_CASE("free-particle eigenvalues") {
  const double h = 1e-2;
  const auto res = oracle_eigenvalues(free_particle(), {1.0, 2.0}, h);
  REQUIRE(!res.eigenvalues.empty());
  CHECK(res.method == Method::Oracle);
  for (const auto& e : res.eigenvalues) {
    const double exact = std::pow(e.k * std::numbers::pi * h, 2);
    CHECK(std::abs(e.E - exact) < 1e-10);
  }
  const long first = static_cast<long>(std::ceil(1.0 / (std::numbers::pi * h)));
  const long last = static_cast<long>(std::floor(std::sqrt(2.0) / (std::numbers::pi * h)));
  CHECK(res.eigenvalues.size() == static_cast<std::size_t>(last - first + 1));
}

TEST_CASE("linear-potential eigenvalues match the Airy cross product") {
  for (double h : {1e-2, 5e-3}) {
    const auto res = oracle_eigenvalues(linear(), {2.0, 3.0}, h);
    const auto airy = test_support::airy_eigenvalues(h, 2.0, 3.0);
    REQUIRE(res.eigenvalues.size() == airy.size());
    for (std::size_t i = 0; i < airy.size(); ++i) CHECK(std::abs(res.eigenvalues[i].E - airy[i]) < 1e-7);
    // Weyl count from the closed-form action
    auto s = [](double E) { return 2.0 / 3.0 * (std::pow(E, 1.5) - std::pow(E - 1.0, 1.5)); };
    const double weyl = (s(3.0) - s(2.0)) / (std::numbers::pi * h);
    CHECK(std::abs(static_cast<double>(res.eigenvalues.size()) - weyl) <= 1.0);
    for (std::size_t i = 1; i < res.eigenvalues.size(); ++i) {
      CHECK(res.eigenvalues[i].E > res.eigenvalues[i - 1].E);
      CHECK(res.eigenvalues[i].k == res.eigenvalues[i - 1].k + 1);
    }
  }
}

TEST_CASE("eigenvalues are self-convergent in rtol") {
  const Potential p(0.5, 1.0, WFunction::polynomial({1.0, 0.5}));
  OracleConfig a, b;
  a.rtol = 1e-10;
  b.rtol = 0.5e-10;
  const auto ra = oracle_eigenvalues(p, {2.0, 2.3}, 1e-2, a);
  const auto rb = oracle_eigenvalues(p, {2.0, 2.3}, 1e-2, b);
  REQUIRE(ra.eigenvalues.size() == rb.eigenvalues.size());
  for (std::size_t i = 0; i < ra.eigenvalues.size(); ++i)
    CHECK(std::abs(ra.eigenvalues[i].E - rb.eigenvalues[i].E) <= 10 * a.rtol);
}

TEST_CASE("oracle errors") {
  const auto p = linear();
  CHECK(error_code_of([&] { propagate(p, 2.0, 5e-5, 1.0, 0.0, {1.0, 0.0, 1.0, 5e-5}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([&] { propagate(p, 2.0, 1e-2, 1.2, 0.0, {1.0, 0.0, 1.2, 1e-2}); }) ==
        ErrorCode::OutOfDomain);
  OracleConfig few;
  few.max_steps = 10;
  CHECK(error_code_of([&] { propagate(p, 2.0, 1e-2, 1.0, 0.0, {1.0, 0.0, 1.0, 1e-2}, few); }) ==
        ErrorCode::ToleranceNotMet);
  OracleConfig wide;
  wide.max_step_fraction = 0.5;
  CHECK(error_code_of([&] { propagate(p, 2.0, 1e-2, 1.0, 0.0, {1.0, 0.0, 1.0, 1e-2}, wide); }) ==
        ErrorCode::InvalidArgument);
  OracleConfig tiny;
  tiny.rtol = 1e-300;
  tiny.atol = 1e-300;
  CHECK(error_code_of([&] { propagate(p, 2.0, 1e-2, 1.0, 0.0, {1.0, 0.0, 1.0, 1e-2}, tiny); }) ==
        ErrorCode::StepUnderflow);
}
