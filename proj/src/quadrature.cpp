#include "swkb/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "swkb/error.hpp"

namespace swkb {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Piece {
  double a, b, value, error, l1;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece panel(const std::function<double(double)>& f, double a, double b) {
  Piece p{a, b, 0.0, 0.0, 0.0};
  p.value = GK::integrate(f, a, b, 0, 0.0, &p.error, &p.l1);
  return p;
}

// Global adaptive bisection: always split the piece with the largest error estimate.
QuadratureResult run(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return {};
  constexpr int kMaxPieces = 4000;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  std::priority_queue<Piece> heap;
  heap.push(panel(f, a, b));
  double value = heap.top().value;
  double error = heap.top().error;
  double l1 = heap.top().l1;
  int pieces = 1;
  while (error > tol && pieces < kMaxPieces) {
    const Piece worst = heap.top();
    if (worst.error <= 50.0 * kEps * worst.l1) break;
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Piece left = panel(f, worst.a, mid);
    const Piece right = panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
    ++pieces;
  }
  // recompute the sums to shed accumulated rounding from the running updates
  value = 0.0;
  error = 0.0;
  l1 = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    l1 += heap.top().l1;
    heap.pop();
  }
  const double floor = 512.0 * kEps * l1;
  if (!std::isfinite(value) || error > std::max(tol, floor)) {
    fail(ErrorCode::QuadratureFailure, "error estimate " + fmt_num(error) + " above tolerance " +
                                           fmt_num(tol) + " (L1 " + fmt_num(l1) + ")");
  }
  return {value, error};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  return run(f, a, b, tol);
}

QuadratureResult integrate_graded(const std::function<double(double)>& f, double a, double b, int p,
                                  double tol) {
  if (a < 0.0 || b < a) fail(ErrorCode::InvalidArgument, "graded quadrature needs 0 <= a <= b");
  if (p <= 1) return run(f, a, b, tol);
  const double ta = std::pow(a, 1.0 / p);
  const double tb = std::pow(b, 1.0 / p);
  auto g = [&](double t) {
    const double tp1 = std::pow(t, p - 1);
    return f(tp1 * t) * p * tp1;
  };
  return run(g, ta, tb, tol);
}

}  // namespace swkb
