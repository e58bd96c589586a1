#pragma once

// Exact multivariate polynomial coefficients over the rationals, in the five
// formal deformation parameters used throughout the engine:
//
//   h      the additive deformation step (hbar)
//   e     the loop/affine shift (epsilon)
//   alpha  the W-algebra level combination
//   e1,e2  the two equivariant parameters (epsilon_1, epsilon_2)
//
// The integer rank of an algebra instance is never a polynomial variable;
// rank-dependent coefficients are evaluated with the rank as a rational
// constant.  Scalars are immutable values and safe to share across threads.

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace ywsym {

enum class Param : int { h = 0, e = 1, alpha = 2, e1 = 3, e2 = 4 };

inline constexpr int n_params = 5;

// Exponent vector over (h, e, alpha, e1, e2); all entries non-negative.
using Monomial = std::array<int, n_params>;

inline constexpr Monomial unit_monomial{0, 0, 0, 0, 0};

const std::string& param_name(Param p);

class Scalar {
public:
  Scalar() = default;
  Scalar(long value);  // NOLINT: implicit by design, mirrors integer literals
  explicit Scalar(const mpq_class& value);

  static Scalar rational(long num, long den);
  static Scalar variable(Param p);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  // Coefficient of the trivial monomial (the polynomial's constant term).
  mpq_class constant_value() const;

  Scalar& operator+=(const Scalar& rhs);
  Scalar& operator-=(const Scalar& rhs);
  Scalar& operator*=(const Scalar& rhs);
  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  Scalar operator-() const;

  bool operator==(const Scalar& rhs) const { return terms_ == rhs.terms_; }
  bool operator!=(const Scalar& rhs) const { return !(*this == rhs); }
  // Total order used only for canonical containers; not a numeric order.
  bool operator<(const Scalar& rhs) const;

  // Simultaneous substitution of polynomials for parameters.  Bindings must
  // be acyclic: no bound parameter may be reachable from its own binding
  // through other bound parameters.  Throws std::invalid_argument otherwise.
  Scalar substituted(const std::map<Param, Scalar>& bindings) const;

  std::string to_string() const;
  static Scalar from_string(std::string_view text);

  const std::map<Monomial, mpq_class>& terms() const { return terms_; }

private:
  // Canonical sparse form: no zero coefficient is ever stored.
  std::map<Monomial, mpq_class> terms_;
};

// Convenience factories for the five parameters.
Scalar s_h();
Scalar s_e();
Scalar s_alpha();
Scalar s_e1();
Scalar s_e2();

}  // namespace ywsym
