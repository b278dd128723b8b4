#include "swkb/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "swkb/error.hpp"

namespace swkb {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 4>;  // re u, im u, re w, im w with w = h u'

void check_config(const OracleConfig& cfg, double h) {
  if (!(cfg.rtol > 0.0 && cfg.atol > 0.0))
    fail(ErrorCode::InvalidArgument, "oracle tolerances must be positive");
  if (!(cfg.max_step_fraction > 0.0 && cfg.max_step_fraction <= 0.2))
    fail(ErrorCode::InvalidArgument, "max_step_fraction must lie in (0, 0.2]");
  if (cfg.grading_exponent < 0) fail(ErrorCode::InvalidArgument, "grading_exponent must be >= 0");
  if (!(h >= 1e-4)) {
    std::ostringstream msg;
    msg << "h=" << h << " below the oracle guard 1e-4";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
}

int grading_for(const Potential& p, const OracleConfig& cfg) {
  if (cfg.grading_exponent > 0) return cfg.grading_exponent;
  if (p.gamma() >= 1.0) return 1;
  return static_cast<int>(std::ceil(2.0 / p.gamma() - 1e-12));
}

struct Mesh {
  int g;
  double b;
  double x(double s) const { return std::min(b, g == 1 ? s : std::pow(s, g)); }
  double dx(double s) const { return g == 1 ? 1.0 : g * std::pow(s, g - 1); }
  double s(double x) const { return g == 1 ? x : std::pow(x, 1.0 / g); }
};

}  // namespace

CauchyDatum propagate(const Potential& p, double E, double h, double from, double to,
                      const CauchyDatum& datum, const OracleConfig& cfg, OracleStats* stats) {
  check_config(cfg, h);
  auto inside = [&](double x) { return x >= 0.0 && x <= p.b(); };
  if (!inside(from) || !inside(to)) fail(ErrorCode::OutOfDomain, "propagation endpoints outside [0,b]");

  CauchyDatum out{datum.value, datum.h_derivative, to, h};
  if (from == to) return out;

  const Mesh mesh{grading_for(p, cfg), p.b()};
  const double s0 = mesh.s(from);
  const double s1 = mesh.s(to);
  const double dir = s1 > s0 ? 1.0 : -1.0;
  const double span = std::abs(s1 - s0);

  auto rhs = [&](const State& y, State& dy, double s) {
    double x = mesh.x(std::max(s, 0.0));
    double j = mesh.dx(std::max(s, 0.0));
    double q = E - p.v(x);
    dy[0] = j * y[2] / h;
    dy[1] = j * y[3] / h;
    dy[2] = -j * q * y[0] / h;
    dy[3] = -j * q * y[1] / h;
  };
  auto cap = [&](double s) {
    double x = mesh.x(std::max(s, 0.0));
    double root = std::sqrt(std::max(std::abs(E - p.v(x)), 1e-12));
    double j = mesh.dx(std::max(s, 0.0));
    double c = cfg.max_step_fraction * h / (root * std::max(j, 1e-300));
    return std::min(c, span / 8.0);
  };

  // rtol and atol are global targets; the per-step tolerance is shared out over the
  // number of wavelength-limited steps.
  const double n_est = 1.0 + std::abs(to - from) * std::sqrt(std::max(E, 0.0)) / (cfg.max_step_fraction * h);
  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(cfg.atol / n_est, cfg.rtol / n_est);
  State y{datum.value.real(), datum.value.imag(), datum.h_derivative.real(), datum.h_derivative.imag()};
  double s = s0;
  double ds = dir * cap(s0);
  std::size_t accepted = 0, rejected = 0;
  const double min_step = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s0) + std::abs(s1));

  while (dir * (s1 - s) > 0.0) {
    double remaining = s1 - s;
    if (std::abs(remaining) < min_step) break;
    if (accepted + rejected >= cfg.max_steps) {
      std::ostringstream msg;
      msg << "tolerance not met within " << cfg.max_steps << " steps";
      fail(ErrorCode::ToleranceNotMet, msg.str());
    }
    double limit = std::min(cap(s), cap(std::clamp(s + ds, std::min(s0, s1), std::max(s0, s1))));
    if (std::abs(ds) > limit) ds = dir * limit;
    bool last = std::abs(ds) >= std::abs(remaining);
    if (last) ds = remaining;
    double s_before = s;
    auto result = stepper.try_step(rhs, y, s, ds);
    if (result == odeint::success) {
      ++accepted;
      if (last) s = s1;
      continue;
    }
    ++rejected;
    s = s_before;
    if (std::abs(ds) < min_step) {
      std::ostringstream msg;
      msg << "step underflow near x=" << mesh.x(std::max(s, 0.0));
      fail(ErrorCode::StepUnderflow, msg.str());
    }
  }
  if (stats) {
    stats->accepted += accepted;
    stats->rejected += rejected;
  }
  for (double v : y)
    if (!std::isfinite(v)) fail(ErrorCode::ToleranceNotMet, "non-finite state");
  out.value = {y[0], y[1]};
  out.h_derivative = {y[2], y[3]};
  return out;
}

double shooting_function(const Potential& p, double E, double h, const OracleConfig& cfg) {
  CauchyDatum d{0.0, 1.0, p.b(), h};
  return propagate(p, E, h, p.b(), 0.0, d, cfg).value.real();
}

SpectralResult oracle_eigenvalues(const Potential& p, const EnergyWindow& win, double h,
                                  const OracleConfig& cfg, unsigned threads) {
  check_config(cfg, h);
  SpectralResult res;
  res.h = h;
  res.method = Method::Oracle;
  res.window = win;
  auto f = [&](double E) { return shooting_function(p, E, h, cfg); };
  for (double E : find_roots(f, win.e_min, win.e_max, scan_spacing(p, win, h), 1e-11, threads))
    res.eigenvalues.push_back({ladder_index(p, E, h), E});
  return res;
}

Eigen::Matrix2d oracle_transfer(const Potential& p, double E, double h, const OracleConfig& cfg) {
  const double qb = E - p.v(p.b());
  if (!(qb > 0.0)) fail(ErrorCode::NonPositiveGap, "E must exceed V(b)");
  const double b_lo = std::pow(qb, -0.25), b_hi = std::pow(qb, 0.25);
  const double e_lo = std::pow(E, 0.25), e_hi = std::pow(E, -0.25);
  Eigen::Matrix2d m;
  for (int j = 0; j < 2; ++j) {
    CauchyDatum d;
    d.value = j == 0 ? b_lo : 0.0;
    d.h_derivative = j == 1 ? b_hi : 0.0;
    d.at = p.b();
    d.h = h;
    const CauchyDatum r = propagate(p, E, h, p.b(), 0.0, d, cfg);
    m(0, j) = e_lo * r.value.real();
    m(1, j) = e_hi * r.h_derivative.real();
  }
  return m;
}

}  // namespace swkb
