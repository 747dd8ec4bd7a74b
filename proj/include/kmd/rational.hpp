#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "kmd/gf2m.hpp"

namespace kmd {

class Rat;

/// Dense univariate polynomial, lowest degree first, no trailing zeros.
/// Coefficients all share one level; the empty vector is the zero polynomial.
using Poly = std::vector<Rat>;

/// An element of GF(2^m)(t_1, ..., t_level), stored recursively as a reduced
/// fraction num/den of polynomials in t_level over GF(2^m)(t_1..t_{level-1}).
///
/// Canonical form: gcd(num, den) = 1 and den is monic. Level 0 values are
/// plain field elements. Two values at the same level are equal iff their
/// representations are identical.
class Rat {
 public:
  Rat() = default;

  int level() const { return level_; }
  bool is_zero() const { return level_ == 0 ? c_ == 0 : !f_; }
  std::uint32_t base_value() const { return c_; }
  const Poly& num() const { return f_->first; }
  const Poly& den() const { return f_->second; }

 private:
  friend class Arith;
  std::uint32_t c_ = 0;
  int level_ = 0;
  std::shared_ptr<const std::pair<Poly, Poly>> f_;
};

/// Exponent vector -> coefficient, used for flattened printing.
using MPoly = std::map<std::vector<int>, std::uint32_t>;

/// Arithmetic on Rat values over a fixed GF(2^m).
///
/// All binary operations require operands of equal level. Polynomial helpers
/// take the coefficient level explicitly because the zero polynomial carries
/// no level of its own.
class Arith {
 public:
  explicit Arith(std::shared_ptr<const GF2m> gf) : gf_(std::move(gf)) {}

  const GF2m& gf() const { return *gf_; }
  std::shared_ptr<const GF2m> gf_ptr() const { return gf_; }

  Rat zero(int level) const;
  Rat one(int level) const { return constant(1, level); }
  Rat constant(std::uint32_t c, int level) const;
  /// The variable t_j (1-based) viewed at `level` >= j.
  Rat var(int j, int level) const;
  /// Embed a value as a constant of a higher level.
  Rat lift(const Rat& x, int level) const;

  Rat add(const Rat& a, const Rat& b) const;
  Rat mul(const Rat& a, const Rat& b) const;
  Rat sqr(const Rat& a) const { return mul(a, a); }
  Rat inv(const Rat& a) const;
  Rat div(const Rat& a, const Rat& b) const { return mul(a, inv(b)); }
  Rat pow(const Rat& a, long e) const;
  Rat wp(const Rat& a) const { return add(sqr(a), a); }

  bool equal(const Rat& a, const Rat& b) const { return compare(a, b) == 0; }
  bool is_one(const Rat& a) const;
  /// Deterministic total order on values of one level.
  int compare(const Rat& a, const Rat& b) const;

  /// Build num/den at level = coefficient level + 1 and normalize.
  Rat frac(Poly num, Poly den, int level) const;
  Rat from_poly(Poly num, int level) const;
  /// Polynomial-in-top-variable test (denominator 1).
  bool is_poly(const Rat& a) const;
  /// True iff the value does not depend on any variable (lies in GF(2^m)).
  bool is_base_constant(const Rat& a) const;
  std::uint32_t base_constant(const Rat& a) const;
  /// True iff the value does not depend on t_level.
  bool is_top_constant(const Rat& a) const;
  /// The value as an element of the level below (requires is_top_constant).
  Rat drop(const Rat& a) const;

  // Derivative with respect to t_j (1-based).
  Rat deriv(const Rat& a, int j) const;
  bool is_square(const Rat& a) const;
  /// Square root; throws if not a square.
  Rat sqrt(const Rat& a) const;
  /// x_eps with x = sum_eps x_eps^2 * t^eps over eps in {0,1}^level
  /// (bit j-1 of eps refers to t_j).
  Rat square_component(const Rat& a, unsigned eps) const;
  /// Substitute t_level = r (r one level below). Throws on a pole.
  Rat eval_top(const Rat& a, const Rat& r) const;
  /// Apply the Frobenius-twisted coefficient map c -> c^(2^s) on base constants.
  Rat frob_constants(const Rat& a, int s) const;

  // Polynomial helpers (coefficients at level cl).
  Poly padd(const Poly& p, const Poly& q) const;
  Poly pmul(const Poly& p, const Poly& q, int cl) const;
  Poly pscale(const Poly& p, const Rat& c) const;
  Poly pshift(const Poly& p, int k, int cl) const;
  void pdivmod(const Poly& p, const Poly& q, Poly& quo, Poly& rem, int cl) const;
  Poly pmod(const Poly& p, const Poly& q, int cl) const;
  Poly pdiv_exact(const Poly& p, const Poly& q, int cl) const;
  Poly pgcd(Poly p, Poly q, int cl) const;
  Poly pmonic(const Poly& p) const;
  Poly pderiv(const Poly& p, int cl) const;
  Rat peval(const Poly& p, const Rat& x, int cl) const;
  Poly ppow(const Poly& p, int e, int cl) const;
  Poly pconst(const Rat& c) const;
  Poly pvar(int cl) const;  // the polynomial t
  static int pdeg(const Poly& p) { return static_cast<int>(p.size()) - 1; }
  bool pequal(const Poly& p, const Poly& q) const;
  int pcompare(const Poly& p, const Poly& q) const;
  bool pis_one(const Poly& p) const;

  /// Flatten to num/den multivariate polynomials (levels <= 2 only).
  std::pair<MPoly, MPoly> flatten(const Rat& a) const;
  std::string format(const Rat& a, const std::vector<std::string>& vars) const;

  /// Degree measure used for enumeration heights: max total degree of the
  /// flattened numerator and denominator.
  int height(const Rat& a) const;

 private:
  std::shared_ptr<const GF2m> gf_;
  Rat make(Poly num, Poly den, int level) const;
};

}  // namespace kmd
