#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swkb/potential.hpp"

namespace swkb::gte {

/// Lower bound on stored exponent values.
inline constexpr double kExponentFloor = -64.0;

/// Exponent m*gamma + j, optionally multiplied by log(x)^log_power.
struct LatticeExponent {
  int m = 0;
  int j = 0;
  int log_power = 0;

  friend bool operator==(const LatticeExponent&, const LatticeExponent&) = default;
};

/// Exponent arithmetic for one value of gamma.
class Lattice {
 public:
  explicit Lattice(double gamma);

  double gamma() const { return gamma_; }
  /// (p, q) with gamma = p/q and q <= 64, if gamma is rational at that resolution.
  const std::optional<std::pair<int, int>>& rational() const { return rational_; }
  LatticeExponent canonical(LatticeExponent e) const;
  double value(const LatticeExponent& e) const;
  /// Strict order: by value, then larger log power first.
  bool less(const LatticeExponent& a, const LatticeExponent& b) const;

 private:
  double gamma_;
  std::optional<std::pair<int, int>> rational_;
};

struct Term {
  LatticeExponent exponent;
  double coeff = 0.0;
};

class Expansion {
 public:
  Expansion(double gamma, double order);

  /// Builds an expansion from arbitrary terms: canonicalizes, merges, truncates, prunes.
  static Expansion from_terms(double gamma, double order, const std::vector<Term>& terms);
  static Expansion constant(double gamma, double order, double c);

  double gamma() const { return lattice_.gamma(); }
  const Lattice& lattice() const { return lattice_; }
  double order() const { return order_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  /// Smallest exponent value present; order() when empty.
  double lowest() const;
  bool has_logs() const;
  /// Coefficient of the canonical form of e, 0 if absent.
  double coefficient(LatticeExponent e) const;

 private:
  Lattice lattice_;
  double order_;
  std::vector<Term> terms_;
};

enum class LogPolicy { Reject, Allow };

Expansion add(const Expansion& u, const Expansion& v, double lambda = 1.0, double mu = 1.0);
Expansion scale(const Expansion& u, double c);
Expansion mul(const Expansion& u, const Expansion& v);
/// Binomial series of (E - x^gamma W(x))^alpha with W replaced by its Taylor list.
Expansion compose_power(const Potential& p, double E, double alpha, double order);
Expansion differentiate(const Expansion& u);
/// U(x) = constant_term - sum a/(alpha+1) x^(alpha+1), i.e. int_x^b u up to the constant.
/// An x^-1 term raises ExponentMinusOne unless policy is Allow, in which case it
/// integrates to a log term.
Expansion antiderivative_from_b(const Expansion& u, double constant_term,
                                LogPolicy policy = LogPolicy::Reject);
double evaluate(const Expansion& u, double x);
/// One term per line: `m j coefficient`, plus the log power when nonzero.
std::string dump(const Expansion& u);

double default_truncation_order(double gamma);

}  // namespace swkb::gte
