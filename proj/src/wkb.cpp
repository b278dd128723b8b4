#include "swkb/wkb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "swkb/error.hpp"

namespace swkb {

namespace {

double series_order_for(double gamma, double x_lo) {
  const double base = gte::default_truncation_order(gamma);
  const double reach = std::min(4.0 * x_lo, 0.9);
  // enough terms that the dropped part is ~1e-10 relative on [x_lo, 4 x_lo]
  const double needed = gamma + 10.0 / std::log10(1.0 / reach);
  return std::clamp(std::ceil(needed), base, 40.0);
}

using Jet = std::vector<double>;

Jet jet_mul(const Jet& a, const Jet& b, std::size_t len) {
  Jet out(len, 0.0);
  for (std::size_t n = 0; n < len; ++n) {
    for (std::size_t j = 0; j <= n && j < a.size(); ++j) {
      if (n - j < b.size()) out[n] += a[j] * b[n - j];
    }
  }
  return out;
}

// Taylor coefficients of q^alpha from those of q (q_0 > 0).
Jet jet_pow(const Jet& q, double alpha, std::size_t len) {
  Jet g(len, 0.0);
  g[0] = std::pow(q[0], alpha);
  for (std::size_t n = 1; n < len; ++n) {
    double s = 0.0;
    for (std::size_t j = 1; j <= n && j < q.size(); ++j) {
      s += ((alpha + 1.0) * static_cast<double>(j) - static_cast<double>(n)) * q[j] * g[n - j];
    }
    g[n] = s / (static_cast<double>(n) * q[0]);
  }
  return g;
}

// Taylor coefficients of E - x^gamma W(x) at x > 0.
Jet q_jet(const Potential& p, double E, double x, std::size_t len) {
  Jet q(len, 0.0);
  q[0] = E;
  if (p.degenerate()) return q;
  Jet xg(len, 0.0);
  double binom = 1.0;
  for (std::size_t j = 0; j < len; ++j) {
    xg[j] = binom * std::pow(x, p.gamma() - static_cast<double>(j));
    binom *= (p.gamma() - static_cast<double>(j)) / static_cast<double>(j + 1);
  }
  const Jet v = jet_mul(xg, p.w().jet(x, static_cast<int>(len) - 1), len);
  for (std::size_t j = 0; j < len; ++j) q[j] -= v[j];
  return q;
}

cplx ipow(int k) {
  switch (k % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

Quasimode::Quasimode(Potential p, double E, int N, LogChebyshevGrid grid)
    : p_(std::move(p)), E_(E), N_(N), grid_(std::move(grid)) {}

void Quasimode::check_domain(double x) const {
  const double slack = 1e-12 * b();
  if (!(x >= x_lo() * (1.0 - 1e-12) && x <= b() + slack)) {
    std::ostringstream msg;
    msg << "x=" << x << " outside quasimode domain [" << x_lo() << "," << b() << "]";
    fail(ErrorCode::OutOfDomain, msg.str());
  }
}

double Quasimode::amplitude_grid(int k, double x, int which) const {
  check_domain(x);
  return grid_.evaluate(coeffs_.at(static_cast<std::size_t>(k)).at(static_cast<std::size_t>(which)),
                        std::min(x, b()));
}

double Quasimode::amplitude_series(int k, double x, int which) const {
  return gte::evaluate(series_.at(static_cast<std::size_t>(k)).at(static_cast<std::size_t>(which)), x);
}

double Quasimode::amplitude(int k, double x, int which) const {
  check_domain(x);
  if (x < crossover_) return amplitude_series(k, x, which);
  return amplitude_grid(k, x, which);
}

cplx Quasimode::A(int k, double x, int which) const { return ipow(k) * amplitude(k, x, which); }

double Quasimode::S(double x) const {
  check_domain(x);
  if (x >= b()) return 0.0;
  return phase(p_, E_, x, quad_tol_);
}

double Quasimode::S_prime(double x) const { return std::sqrt(E_ - p_.v(std::min(x, b()))); }

Quasimode build_quasimode(const Potential& p, double E, int N, double x_lo, const QuasimodeOptions& opts) {
  if (N < 0) fail(ErrorCode::InvalidArgument, "amplitude order must be nonnegative");
  if (!(x_lo > 0.0) || !(x_lo < p.b())) fail(ErrorCode::InvalidArgument, "x_lo must lie in (0, b)");
  if (opts.n_cheb < 64) fail(ErrorCode::InvalidArgument, "n_cheb must be at least 64");
  if (!(E - p.v(p.b()) > 0.0)) fail(ErrorCode::NonPositiveGap, "E must exceed V(b)");

  Quasimode qm(p, E, N, LogChebyshevGrid(x_lo, p.b(), opts.n_cheb));
  qm.quad_tol_ = opts.quad_tol;
  qm.sigma_ = sigma(p, E, opts.quad_tol);
  const auto& grid = qm.grid_;
  const auto& xs = grid.nodes();
  const std::size_t n = xs.size();

  // grid route: exact Taylor jets at every node, one numerical integral per level
  std::vector<Jet> a0(n), ak(n);
  const auto len0 = static_cast<std::size_t>(N) + 3;
  for (std::size_t i = 0; i < n; ++i) {
    const Jet q = q_jet(p, E, xs[i], len0);
    a0[i] = jet_pow(q, -0.25, len0);
  }
  ak = a0;
  std::vector<double> anchors;  // int_{x_lo}^b a_k'' A_0
  for (int k = 0;; ++k) {
    std::vector<double> v0(n), v1(n), v2(n);
    for (std::size_t i = 0; i < n; ++i) {
      v0[i] = ak[i][0];
      v1[i] = ak[i][1];
      v2[i] = 2.0 * ak[i][2];
    }
    std::vector<LogChebyshevGrid::Coeffs> level{grid.coefficients(v0), grid.coefficients(v1),
                                                grid.coefficients(v2)};
    for (const auto& c : level) qm.noise_ = std::max(qm.noise_, grid.tail_ratio(c));
    qm.coeffs_.push_back(std::move(level));
    if (k == N) break;
    const std::size_t len = ak[0].size() - 1;  // jet length of the next level
    std::vector<Jet> g(n);
    std::vector<double> g0(n);
    for (std::size_t i = 0; i < n; ++i) {
      Jet d2(len - 1, 0.0);
      for (std::size_t m = 0; m + 1 < len; ++m) {
        d2[m] = static_cast<double>((m + 1) * (m + 2)) * ak[i][m + 2];
      }
      g[i] = jet_mul(d2, a0[i], len - 1);
      g0[i] = g[i][0];
    }
    qm.noise_ = std::max(qm.noise_, grid.tail_ratio(grid.coefficients(g0)));
    const auto J = grid.integral_from_b(g0);
    anchors.push_back(J[grid.points_per_panel() - 1]);
    for (std::size_t i = 0; i < n; ++i) {
      Jet jj(len, 0.0);
      jj[0] = J[i];
      for (std::size_t m = 1; m < len; ++m) jj[m] = -g[i][m - 1] / static_cast<double>(m);
      Jet next = jet_mul(a0[i], jj, len);
      for (double& c : next) c *= -0.5;
      ak[i] = std::move(next);
    }
  }
  if (qm.noise_ > opts.differentiation_tol) {
    std::ostringstream msg;
    msg << "Chebyshev round-off estimate " << qm.noise_ << " exceeds " << opts.differentiation_tol;
    fail(ErrorCode::DifferentiationUnstable, msg.str());
  }

  // series route
  const double order = opts.series_order > 0.0 ? opts.series_order : series_order_for(p.gamma(), x_lo);
  const auto a0s = gte::compose_power(p, E, -0.25, order);
  gte::Expansion as = a0s;
  for (int k = 0; k <= N; ++k) {
    const auto d1 = gte::differentiate(as);
    const auto d2 = gte::differentiate(d1);
    qm.series_.push_back({as, d1, d2});
    if (k == N) break;
    const auto u = gte::mul(d2, a0s);
    const auto U0 = gte::antiderivative_from_b(u, 0.0, gte::LogPolicy::Allow);
    const double c = anchors[static_cast<std::size_t>(k)] - gte::evaluate(U0, x_lo);
    const auto U = gte::add(U0, gte::Expansion::constant(p.gamma(), U0.order(), c));
    as = gte::scale(gte::mul(a0s, U), -0.5);
  }

  qm.crossover_ = 2.0 * x_lo;
  if (qm.crossover_ < p.b()) {
    for (int k = 0; k <= N; ++k) {
      const double g = qm.amplitude_grid(k, qm.crossover_);
      const double s = qm.amplitude_series(k, qm.crossover_);
      if (std::abs(g - s) > opts.crossover_tol * std::max(std::abs(g), std::abs(s)) + 1e-300) {
        std::ostringstream msg;
        msg << "A_" << k << " at x=" << qm.crossover_ << ": grid " << g << " vs series " << s;
        fail(ErrorCode::RepresentationMismatch, msg.str());
      }
    }
  } else {
    qm.crossover_ = x_lo;
  }
  return qm;
}

CauchyDatum evaluate_quasimode(const Quasimode& q, int sign, double h, double x) {
  if (sign != 1 && sign != -1) fail(ErrorCode::InvalidArgument, "sign must be +1 or -1");
  cplx B = 0.0, dB = 0.0;
  double hk = 1.0;
  for (int k = 0; k <= q.N(); ++k) {
    B += hk * q.A(k, x, 0);
    dB += hk * q.A(k, x, 1);
    hk *= h;
  }
  const cplx e = std::polar(1.0, q.S(x) / h);
  const double sp = q.S_prime(x);
  CauchyDatum d;
  d.at = x;
  d.h = h;
  d.value = e * B;
  d.h_derivative = e * (cplx(0.0, sp) * B + h * dB);
  if (sign < 0) {
    d.value = std::conj(d.value);
    d.h_derivative = std::conj(d.h_derivative);
  }
  return d;
}

cplx scaled_wronskian(const Quasimode& q, double h, double x) {
  const auto up = evaluate_quasimode(q, 1, h, x);
  const auto um = evaluate_quasimode(q, -1, h, x);
  return h * (up.h_derivative * um.value - up.value * um.h_derivative);
}

double wronskian_defect(const Quasimode& q, double h, const std::vector<double>& grid) {
  double worst = 0.0;
  for (double x : grid) worst = std::max(worst, std::abs(scaled_wronskian(q, h, x) - cplx(0.0, 2.0 * h)));
  return worst;
}

double wronskian_drift(const Quasimode& q, double h, const std::vector<double>& grid) {
  const cplx at_b = scaled_wronskian(q, h, q.b());
  double worst = 0.0;
  for (double x : grid) worst = std::max(worst, std::abs(scaled_wronskian(q, h, x) - at_b));
  return worst;
}

double residual(const Quasimode& q, double h, double x) {
  return std::pow(h, q.N() + 2) * std::abs(q.amplitude(q.N(), x, 2));
}

double default_epsilon(double gamma) { return gamma / (2.0 * (gamma + 1.0)); }

void dump_amplitudes(std::ostream& out, const Quasimode& q, const std::vector<double>& xs) {
  out << "x,k,re,im\n";
  char buf[128];
  for (double x : xs) {
    for (int k = 0; k <= q.N(); ++k) {
      const cplx a = q.A(k, x);
      std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g\n", x, k, a.real(), a.imag());
      out << buf;
    }
  }
}

}  // namespace swkb
