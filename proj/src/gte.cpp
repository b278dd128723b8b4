#include "swkb/gte.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <tuple>

#include "swkb/error.hpp"

namespace swkb::gte {

namespace {

constexpr double kPrune = 1e-15;

using Key = std::tuple<int, int, int>;

bool same_gamma(double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(a)); }

void require_same(const Expansion& u, const Expansion& v) {
  if (!same_gamma(u.gamma(), v.gamma())) {
    fail(ErrorCode::GammaMismatch, "expansions built for gamma " + std::to_string(u.gamma()) +
                                       " and " + std::to_string(v.gamma()));
  }
}

bool is_zero_exponent(const LatticeExponent& e) { return e.m == 0 && e.j == 0; }
bool is_minus_one(const LatticeExponent& e) { return e.m == 0 && e.j == -1; }

}  // namespace

Lattice::Lattice(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0)) fail(ErrorCode::InvalidArgument, "lattice needs gamma > 0");
  for (int q = 1; q <= 64; ++q) {
    const double pq = gamma * q;
    const double p = std::round(pq);
    if (std::abs(pq - p) <= 1e-12 * std::max(1.0, pq)) {
      const int pi = static_cast<int>(p);
      const int g = std::gcd(pi, q);
      rational_ = std::make_pair(pi / g, q / g);
      break;
    }
  }
}

LatticeExponent Lattice::canonical(LatticeExponent e) const {
  if (!rational_) return e;
  const auto [p, q] = *rational_;
  int mc = e.m % q;
  if (mc < 0) mc += q;
  e.j += (e.m - mc) / q * p;
  e.m = mc;
  return e;
}

double Lattice::value(const LatticeExponent& e) const { return e.m * gamma_ + e.j; }

bool Lattice::less(const LatticeExponent& a, const LatticeExponent& b) const {
  const LatticeExponent ca = canonical(a);
  const LatticeExponent cb = canonical(b);
  if (ca.m == cb.m && ca.j == cb.j) return ca.log_power > cb.log_power;
  return value(ca) < value(cb);
}

Expansion::Expansion(double gamma, double order) : lattice_(gamma), order_(order) {}

Expansion Expansion::from_terms(double gamma, double order, const std::vector<Term>& terms) {
  Expansion out(gamma, order);
  std::map<Key, double> acc;
  for (const auto& t : terms) {
    const LatticeExponent e = out.lattice_.canonical(t.exponent);
    if (out.lattice_.value(e) >= order - 1e-12) continue;
    acc[{e.m, e.j, e.log_power}] += t.coeff;
  }
  double biggest = 0.0;
  for (const auto& [k, c] : acc) biggest = std::max(biggest, std::abs(c));
  for (const auto& [k, c] : acc) {
    if (c == 0.0 || std::abs(c) < kPrune * biggest) continue;
    const LatticeExponent e{std::get<0>(k), std::get<1>(k), std::get<2>(k)};
    if (out.lattice_.value(e) < kExponentFloor) {
      fail(ErrorCode::InvalidArgument, "exponent below the module floor");
    }
    out.terms_.push_back({e, c});
  }
  std::sort(out.terms_.begin(), out.terms_.end(),
            [&](const Term& a, const Term& b) { return out.lattice_.less(a.exponent, b.exponent); });
  return out;
}

Expansion Expansion::constant(double gamma, double order, double c) {
  return from_terms(gamma, order, {{{0, 0, 0}, c}});
}

double Expansion::lowest() const {
  return terms_.empty() ? order_ : lattice_.value(terms_.front().exponent);
}

bool Expansion::has_logs() const {
  return std::any_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.exponent.log_power > 0; });
}

double Expansion::coefficient(LatticeExponent e) const {
  e = lattice_.canonical(e);
  for (const auto& t : terms_) {
    if (t.exponent == e) return t.coeff;
  }
  return 0.0;
}

Expansion add(const Expansion& u, const Expansion& v, double lambda, double mu) {
  require_same(u, v);
  std::vector<Term> terms;
  for (const auto& t : u.terms()) terms.push_back({t.exponent, lambda * t.coeff});
  for (const auto& t : v.terms()) terms.push_back({t.exponent, mu * t.coeff});
  return Expansion::from_terms(u.gamma(), std::min(u.order(), v.order()), terms);
}

Expansion scale(const Expansion& u, double c) {
  std::vector<Term> terms;
  for (const auto& t : u.terms()) terms.push_back({t.exponent, c * t.coeff});
  return Expansion::from_terms(u.gamma(), u.order(), terms);
}

Expansion mul(const Expansion& u, const Expansion& v) {
  require_same(u, v);
  double order = std::min(u.order(), v.order());
  if (!u.empty() && !v.empty()) {
    order = std::min({order, u.order() + v.lowest(), v.order() + u.lowest()});
  }
  std::vector<Term> terms;
  terms.reserve(u.terms().size() * v.terms().size());
  for (const auto& a : u.terms()) {
    for (const auto& b : v.terms()) {
      const LatticeExponent e{a.exponent.m + b.exponent.m, a.exponent.j + b.exponent.j,
                              a.exponent.log_power + b.exponent.log_power};
      terms.push_back({e, a.coeff * b.coeff});
    }
  }
  return Expansion::from_terms(u.gamma(), order, terms);
}

Expansion compose_power(const Potential& p, double E, double alpha, double order) {
  if (!(E > 0.0)) fail(ErrorCode::NonPositiveEnergy, "compose_power needs E > 0");
  const double gamma = p.gamma();
  const auto& w = p.w_taylor();
  if (!p.w().taylor_exact()) {
    order = std::min(order, gamma + static_cast<double>(w.size()));
  }
  std::vector<Term> xs;
  if (!p.degenerate()) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      xs.push_back({{1, static_cast<int>(j), 0}, w[j] / E});
    }
  }
  const Expansion x_over_e = Expansion::from_terms(gamma, order, xs);
  Expansion sum = Expansion::constant(gamma, order, 1.0);
  Expansion power = Expansion::constant(gamma, order, 1.0);
  double binom = 1.0;
  for (int m = 1; m * gamma < order && !x_over_e.empty(); ++m) {
    power = mul(power, x_over_e);
    binom *= (alpha - m + 1) / m;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    sum = add(sum, power, 1.0, sign * binom);
  }
  return scale(sum, std::pow(E, alpha));
}

Expansion differentiate(const Expansion& u) {
  std::vector<Term> terms;
  for (const auto& t : u.terms()) {
    const auto& e = t.exponent;
    const double alpha = u.lattice().value(e);
    if (!is_zero_exponent(e)) terms.push_back({{e.m, e.j - 1, e.log_power}, alpha * t.coeff});
    if (e.log_power > 0) terms.push_back({{e.m, e.j - 1, e.log_power - 1}, e.log_power * t.coeff});
  }
  return Expansion::from_terms(u.gamma(), u.order() - 1.0, terms);
}

Expansion antiderivative_from_b(const Expansion& u, double constant_term, LogPolicy policy) {
  std::vector<Term> terms{{{0, 0, 0}, constant_term}};
  for (const auto& t : u.terms()) {
    const auto& e = t.exponent;
    const int l = e.log_power;
    if (is_minus_one(e)) {
      if (policy == LogPolicy::Reject) {
        fail(ErrorCode::ExponentMinusOne, "x^-1 term has no power-law antiderivative");
      }
      terms.push_back({{0, 0, l + 1}, -t.coeff / (l + 1)});
      continue;
    }
    const double a1 = u.lattice().value(e) + 1.0;
    // int x^a log^l = x^(a+1) sum_i (-1)^i l!/(l-i)! log^(l-i) / (a+1)^(i+1)
    double falling = 1.0;
    for (int i = 0; i <= l; ++i) {
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      terms.push_back({{e.m, e.j + 1, l - i}, -t.coeff * sign * falling / std::pow(a1, i + 1)});
      falling *= (l - i);
    }
  }
  return Expansion::from_terms(u.gamma(), u.order() + 1.0, terms);
}

double evaluate(const Expansion& u, double x) {
  const double lx = std::log(x);
  double s = 0.0;
  for (const auto& t : u.terms()) {
    double term = t.coeff * std::pow(x, u.lattice().value(t.exponent));
    if (t.exponent.log_power > 0) term *= std::pow(lx, t.exponent.log_power);
    s += term;
  }
  return s;
}

std::string dump(const Expansion& u) {
  std::string out;
  char buf[96];
  for (const auto& t : u.terms()) {
    if (t.exponent.log_power > 0) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g %d\n", t.exponent.m, t.exponent.j, t.coeff,
                    t.exponent.log_power);
    } else {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", t.exponent.m, t.exponent.j, t.coeff);
    }
    out += buf;
  }
  return out;
}

double default_truncation_order(double gamma) { return 6.0 + 4.0 * gamma; }

}  // namespace swkb::gte
