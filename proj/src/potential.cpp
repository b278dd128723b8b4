#include "swkb/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "swkb/error.hpp"
#include "swkb/quadrature.hpp"

namespace swkb {

namespace {

double horner(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
  return s;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t j = 1; j < c.size(); ++j) d.push_back(static_cast<double>(j) * c[j]);
  return d;
}

}  // namespace

WFunction WFunction::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) fail(ErrorCode::InvalidArgument, "polynomial W needs coefficients");
  WFunction w;
  w.kind_ = WKind::Polynomial;
  w.coeffs_ = coeffs;
  w.taylor_ = std::move(coeffs);
  return w;
}

WFunction WFunction::exp_poly(std::vector<double> coeffs, int taylor_order) {
  if (coeffs.empty()) fail(ErrorCode::InvalidArgument, "exp_poly W needs coefficients");
  if (taylor_order < 1) fail(ErrorCode::InvalidArgument, "taylor order must be positive");
  WFunction w;
  w.kind_ = WKind::ExpPoly;
  w.coeffs_ = coeffs;
  // n w_n = sum_k k p_k w_{n-k}
  std::vector<double> t(static_cast<std::size_t>(taylor_order) + 1, 0.0);
  t[0] = std::exp(coeffs[0]);
  for (std::size_t n = 1; n < t.size(); ++n) {
    double s = 0.0;
    for (std::size_t k = 1; k <= n && k < coeffs.size(); ++k) s += k * coeffs[k] * t[n - k];
    t[n] = s / static_cast<double>(n);
  }
  w.taylor_ = std::move(t);
  return w;
}

WFunction WFunction::constant(double value) {
  WFunction w;
  w.kind_ = WKind::Constant;
  w.coeffs_ = {value};
  w.taylor_ = {value};
  return w;
}

WFunction WFunction::custom(std::function<double(double)> fn, std::vector<double> taylor) {
  if (!fn || taylor.empty()) fail(ErrorCode::InvalidArgument, "custom W needs a handle and Taylor data");
  WFunction w;
  w.kind_ = WKind::Custom;
  w.fn_ = std::move(fn);
  w.taylor_ = std::move(taylor);
  return w;
}

double WFunction::value(double x) const {
  switch (kind_) {
    case WKind::Polynomial: return horner(coeffs_, x);
    case WKind::ExpPoly: return std::exp(horner(coeffs_, x));
    case WKind::Constant: return coeffs_[0];
    case WKind::Custom: return fn_(x);
  }
  return 0.0;
}

double WFunction::derivative(double x, int n) const {
  if (n < 0) fail(ErrorCode::InvalidArgument, "negative derivative order");
  if (n == 0) return value(x);
  switch (kind_) {
    case WKind::Constant: return 0.0;
    case WKind::Polynomial: {
      std::vector<double> c = coeffs_;
      for (int k = 0; k < n; ++k) c = poly_derivative(c);
      return horner(c, x);
    }
    case WKind::ExpPoly: {
      // W^{(m+1)} = sum_k C(m,k) P^{(k+1)} W^{(m-k)}
      std::vector<std::vector<double>> pd{coeffs_};
      for (int k = 0; k < n; ++k) pd.push_back(poly_derivative(pd.back()));
      std::vector<double> wd{value(x)};
      for (int m = 0; m < n; ++m) {
        double s = 0.0;
        double binom = 1.0;
        for (int k = 0; k <= m; ++k) {
          s += binom * horner(pd[static_cast<std::size_t>(k) + 1], x) * wd[static_cast<std::size_t>(m - k)];
          binom = binom * (m - k) / (k + 1);
        }
        wd.push_back(s);
      }
      return wd.back();
    }
    case WKind::Custom: {
      const double d = std::max(1e-5, x / 100.0);
      // fourth-order central stencils, recursively for higher orders
      auto first = [&](const std::function<double(double)>& f, double y) {
        return (f(y - 2 * d) - 8 * f(y - d) + 8 * f(y + d) - f(y + 2 * d)) / (12 * d);
      };
      std::function<double(double)> f = fn_;
      for (int k = 0; k < n; ++k) {
        f = [f, first](double y) { return first(f, y); };
      }
      return f(x);
    }
  }
  return 0.0;
}

std::vector<double> WFunction::jet(double x, int order) const {
  std::vector<double> out(static_cast<std::size_t>(order) + 1, 0.0);
  if (kind_ == WKind::ExpPoly) {
    // jet of P at x, then the exponential recurrence n e_n = sum_k k p_k e_{n-k}
    std::vector<double> pj(out.size(), 0.0);
    std::vector<double> c = coeffs_;
    double fact = 1.0;
    for (std::size_t j = 0; j < pj.size() && !c.empty(); ++j) {
      pj[j] = horner(c, x) / fact;
      c = poly_derivative(c);
      fact *= static_cast<double>(j + 1);
    }
    out[0] = std::exp(pj[0]);
    for (std::size_t n = 1; n < out.size(); ++n) {
      double s = 0.0;
      for (std::size_t k = 1; k <= n; ++k) s += k * pj[k] * out[n - k];
      out[n] = s / static_cast<double>(n);
    }
    return out;
  }
  double fact = 1.0;
  for (int j = 0; j <= order; ++j) {
    out[static_cast<std::size_t>(j)] = derivative(x, j) / fact;
    fact *= j + 1;
  }
  return out;
}

bool WFunction::identically_zero() const {
  if (kind_ == WKind::Custom || kind_ == WKind::ExpPoly) return false;
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

Potential::Potential(double gamma, double b, WFunction w, bool allow_degenerate)
    : gamma_(gamma), b_(b), w_(std::move(w)), allow_degenerate_(allow_degenerate) {
  if (!(gamma > 0.0)) fail(ErrorCode::InvalidArgument, "gamma must be positive");
  if (!(b > 0.0)) fail(ErrorCode::InvalidArgument, "b must be positive");
  degenerate_ = w_.identically_zero();
  if (degenerate_ && !allow_degenerate_) {
    fail(ErrorCode::NonPositiveW, "W vanishes identically; set the degenerate flag to allow it");
  }
  const double w0 = w_.value(0.0);
  if (std::abs(w_.taylor()[0] - w0) > 1e-10 * std::max(1.0, std::abs(w0))) {
    fail(ErrorCode::InvalidArgument, "Taylor data does not match W(0)");
  }
}

double Potential::w_at(double x) const {
  if (!w_.taylor_exact() && x < 0.01 * b_) return horner(w_.taylor(), x);
  return w_.value(x);
}

double Potential::v(double x) const {
  if (x <= 0.0) return 0.0;
  return std::pow(x, gamma_) * w_at(x);
}

int Potential::grading_power() const {
  if (gamma_ >= 2.0) return 1;
  return static_cast<int>(std::ceil(2.0 / gamma_ - 1e-12));
}

double v_at(const Potential& p, double x) {
  if (!(x >= 0.0 && x <= p.b())) {
    std::ostringstream msg;
    msg << "x=" << x << " outside [0," << p.b() << "]";
    fail(ErrorCode::OutOfDomain, msg.str());
  }
  return p.v(x);
}

EnergyWindow validate(const Potential& p, EnergyWindow win, std::size_t grid_size) {
  if (grid_size < 16) fail(ErrorCode::InvalidArgument, "validation grid needs at least 16 points");
  if (win.e_min > win.e_max) fail(ErrorCode::InvalidArgument, "e_min exceeds e_max");
  constexpr double kRoundoff = 1e-12;
  double delta = std::numeric_limits<double>::infinity();
  double prev = 0.0;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double x = p.b() * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const double v = p.v(x);
    if (!p.allows_degenerate() || !p.degenerate()) {
      if (!(p.w_at(x) > 0.0)) {
        fail(ErrorCode::NonPositiveW, "W(" + std::to_string(x) + ") <= 0");
      }
    }
    if (i > 0 && v < prev - kRoundoff) {
      fail(ErrorCode::NotIncreasing, "V decreases near x=" + std::to_string(x));
    }
    if (x > 0.0 && p.w().kind() != WKind::Custom) {
      // V' = x^(gamma-1) (gamma W + x W')
      const double dv = p.gamma() * p.w_at(x) + x * p.w().derivative(x, 1);
      if (dv < -kRoundoff) fail(ErrorCode::NotIncreasing, "V' < 0 at x=" + std::to_string(x));
    }
    prev = v;
    delta = std::min(delta, win.e_min - v);
  }
  if (!(delta > 0.0)) {
    fail(ErrorCode::NonPositiveGap, "min(e_min - V) = " + std::to_string(delta));
  }
  win.delta = delta;
  return win;
}

double sigma(const Potential& p, double E, double tol) {
  auto f = [&](double x) { return std::sqrt(E - p.v(x)); };
  return integrate_graded(f, 0.0, p.b(), p.grading_power(), tol).value;
}

double sigma_prime(const Potential& p, double E, double tol) {
  auto f = [&](double x) { return 0.5 / std::sqrt(E - p.v(x)); };
  return integrate_graded(f, 0.0, p.b(), p.grading_power(), tol).value;
}

double t_correction(const Potential& p, double E, double x, double tol) {
  if (!(x >= 0.0 && x <= p.b())) fail(ErrorCode::OutOfDomain, "t_correction point outside [0,b]");
  const double se = std::sqrt(E);
  // sqrt(E-V) - sqrt(E) written without cancellation
  auto f = [&](double y) {
    const double v = p.v(y);
    return -v / (std::sqrt(E - v) + se);
  };
  return integrate_graded(f, 0.0, x, p.grading_power(), tol).value;
}

double phase(const Potential& p, double E, double x, double tol) {
  if (!(x >= 0.0 && x <= p.b())) fail(ErrorCode::OutOfDomain, "phase point outside [0,b]");
  auto f = [&](double y) { return std::sqrt(E - p.v(y)); };
  return -integrate_graded(f, x, p.b(), p.grading_power(), tol).value;
}

Potential parse_potential(const KeyValues& kv) {
  const double gamma = kv.number("gamma");
  const double b = kv.number("b", 1.0);
  const std::string kind = kv.find("w.kind").value_or("constant");
  const bool allow_zero = kv.flag("w.allow_zero", false);
  WFunction w = WFunction::constant(1.0);
  if (kind == "polynomial") {
    w = WFunction::polynomial(kv.numbers("w.coeffs"));
  } else if (kind == "exp_poly") {
    w = WFunction::exp_poly(kv.numbers("w.coeffs"), kv.integer("w.taylor_order", 40));
  } else if (kind == "constant") {
    w = WFunction::constant(kv.has("w.coeffs") ? kv.numbers("w.coeffs").front() : 1.0);
  } else {
    fail(ErrorCode::ConfigParse, "unknown w.kind '" + kind + "'");
  }
  if (!(gamma > 0.0) || !(b > 0.0)) fail(ErrorCode::ConfigParse, "gamma and b must be positive");
  return Potential(gamma, b, std::move(w), allow_zero);
}

EnergyWindow parse_window(const KeyValues& kv) {
  EnergyWindow win;
  win.e_min = kv.number("window.e_min");
  win.e_max = kv.number("window.e_max");
  return win;
}

}  // namespace swkb
