#include "swkb/chebyshev.hpp"

#include <algorithm>
#include <cmath>

#include "swkb/error.hpp"

namespace swkb {

namespace {

double clenshaw(const std::vector<double>& c, double s) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double t = 2.0 * s * b1 - b2 + c[k];
    b2 = b1;
    b1 = t;
  }
  return s * b1 - b2 + c[0];
}

}  // namespace

LogChebyshevGrid::LogChebyshevGrid(double x_lo, double b, std::size_t n_total, double panel_width)
    : x_lo_(x_lo), b_(b) {
  if (!(x_lo > 0.0) || !(b > x_lo)) fail(ErrorCode::InvalidArgument, "grid needs 0 < x_lo < b");
  if (n_total < 64) fail(ErrorCode::InvalidArgument, "grid needs at least 64 nodes");
  const double span = std::log(b / x_lo);
  panels_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / panel_width - 1e-12)));
  n_ = std::max<std::size_t>(32, (n_total + panels_ - 1) / panels_);
  log_lo_ = std::log(x_lo);
  width_ = span / static_cast<double>(panels_);
  const double pi = std::acos(-1.0);
  cos_table_.resize(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < n_; ++k) {
      cos_table_[i * n_ + k] = std::cos(pi * static_cast<double>((i * k) % (2 * (n_ - 1))) / (n_ - 1));
    }
  }
  x_.resize(size());
  for (std::size_t p = 0; p < panels_; ++p) {
    for (std::size_t i = 0; i < n_; ++i) {
      const double s = cos_table_[i * n_ + 1];
      x_[p * n_ + i] = std::exp(log_lo_ + width_ * (p + 0.5 * (s + 1.0)));
    }
    x_[p * n_] = std::exp(log_lo_ + width_ * (p + 1));
    x_[p * n_ + n_ - 1] = std::exp(log_lo_ + width_ * p);
  }
  x_.front() = x_lo_ * std::exp(span / panels_);
  x_[(panels_ - 1) * n_] = b_;
  x_[n_ - 1] = x_lo_;
}

LogChebyshevGrid::Coeffs LogChebyshevGrid::coefficients(const Values& f) const {
  if (f.size() != size()) fail(ErrorCode::InvalidArgument, "value vector has the wrong length");
  Coeffs c(panels_, std::vector<double>(n_, 0.0));
  const double scale = 2.0 / static_cast<double>(n_ - 1);
  for (std::size_t p = 0; p < panels_; ++p) {
    const double* fp = f.data() + p * n_;
    for (std::size_t k = 0; k < n_; ++k) {
      double s = 0.5 * (fp[0] + fp[n_ - 1] * cos_table_[(n_ - 1) * n_ + k]);
      for (std::size_t i = 1; i + 1 < n_; ++i) s += fp[i] * cos_table_[i * n_ + k];
      c[p][k] = scale * s;
    }
    c[p][0] *= 0.5;
    c[p][n_ - 1] *= 0.5;
  }
  return c;
}

LogChebyshevGrid::Values LogChebyshevGrid::values(const Coeffs& c) const {
  Values f(size(), 0.0);
  for (std::size_t p = 0; p < panels_; ++p) {
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < n_; ++k) s += c[p][k] * cos_table_[i * n_ + k];
      f[p * n_ + i] = s;
    }
  }
  return f;
}

LogChebyshevGrid::Values LogChebyshevGrid::derivative(const Values& f) const {
  Coeffs c = coefficients(f);
  for (auto& cp : c) {
    std::vector<double> d(n_, 0.0);
    for (std::size_t k = n_ - 1; k-- > 1;) {
      d[k] = (k + 2 < n_ ? d[k + 2] : 0.0) + 2.0 * static_cast<double>(k + 1) * cp[k + 1];
    }
    d[0] = 0.5 * (n_ > 2 ? d[2] : 0.0) + cp[1];
    cp = std::move(d);
  }
  Values df = values(c);
  // x = exp(log_lo + width (p + (s+1)/2)), so dx/ds = x width / 2
  for (std::size_t i = 0; i < df.size(); ++i) df[i] /= 0.5 * width_ * x_[i];
  return df;
}

LogChebyshevGrid::Values LogChebyshevGrid::integral_from_b(const Values& f) const {
  Values g(size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = f[i] * 0.5 * width_ * x_[i];
  const Coeffs c = coefficients(g);
  Values out(size(), 0.0);
  double carried = 0.0;  // integral over panels to the right
  for (std::size_t p = panels_; p-- > 0;) {
    const auto& cp = c[p];
    std::vector<double> big(n_ + 1, 0.0);
    big[1] = cp[0] - (n_ > 2 ? 0.5 * cp[2] : 0.0);
    for (std::size_t k = 2; k <= n_; ++k) {
      const double prev = cp[k - 1];
      const double next = (k + 1 < n_) ? cp[k + 1] : 0.0;
      big[k] = (prev - next) / (2.0 * static_cast<double>(k));
    }
    double at_one = 0.0;
    for (std::size_t k = 1; k <= n_; ++k) at_one += big[k];
    big[0] = -at_one;  // antiderivative vanishes at the panel's right end
    for (std::size_t i = 0; i < n_; ++i) {
      const double s = (i == 0) ? 1.0 : cos_table_[i * n_ + 1];
      out[p * n_ + i] = carried - clenshaw(big, s);
    }
    out[p * n_] = carried;
    carried = out[p * n_ + n_ - 1];
  }
  return out;
}

std::size_t LogChebyshevGrid::panel_of(double x) const {
  const double t = (std::log(x) - log_lo_) / width_;
  const auto p = static_cast<long>(std::floor(t));
  return static_cast<std::size_t>(std::clamp<long>(p, 0, static_cast<long>(panels_) - 1));
}

double LogChebyshevGrid::local_s(std::size_t p, double x) const {
  return 2.0 * ((std::log(x) - log_lo_) / width_ - static_cast<double>(p)) - 1.0;
}

double LogChebyshevGrid::evaluate(const Coeffs& c, double x) const {
  const std::size_t p = panel_of(x);
  return clenshaw(c[p], std::clamp(local_s(p, x), -1.0, 1.0));
}

double LogChebyshevGrid::tail_ratio(const Coeffs& c) const {
  double worst = 0.0;
  for (const auto& cp : c) {
    double head = 0.0, tail = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      head = std::max(head, std::abs(cp[k]));
      if (k + 3 >= n_) tail = std::max(tail, std::abs(cp[k]));
    }
    if (head > 0.0) worst = std::max(worst, tail / head);
  }
  return worst;
}

}  // namespace swkb
