#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kmd/gfpoly.hpp"
#include "kmd/rational.hpp"

namespace kmd {

/// GF(2^k)(t_1, ..., t_n), optionally topped by K = F[alpha] with
/// alpha^2 + alpha = a. The variables form the fixed 2-basis.
struct Tower {
  int k = 1;
  std::vector<std::string> vars;
  bool has_ext = false;
  std::string ext_name;
  Rat ext_a;  // level n, meaningful when has_ext
  std::shared_ptr<const Arith> ar;
  std::vector<std::shared_ptr<const Tower>> prefix;  // prefix[j]: first j variables
  std::shared_ptr<const Tower> base;                 // tower without extension

  int n() const { return static_cast<int>(vars.size()); }
  const Arith& arith() const { return *ar; }
};
using TowerPtr = std::shared_ptr<const Tower>;

constexpr int kMaxVars = 3;

TowerPtr make_field(int k, std::vector<std::string> vars);
/// Structural equality.
bool same_tower(const TowerPtr& a, const TowerPtr& b);
/// The tower with the quadratic extension removed.
TowerPtr base_field(const TowerPtr& t);
/// GF(2^k)(t_1..t_j) without extension.
TowerPtr truncated(const TowerPtr& t, int j);
/// Human-readable description, e.g. "GF(2^2)(x,t)[alpha: wp = t^2]".
std::string describe(const TowerPtr& t);

/// Element of a tower. For an extended tower the value is w0 + alpha*w1 with
/// w0, w1 in the base; otherwise w1 is zero.
class Elem {
 public:
  Elem() = default;
  Elem(TowerPtr t, Rat w0);
  Elem(TowerPtr t, Rat w0, Rat w1);

  const TowerPtr& tower() const { return t_; }
  const Rat& w0() const { return w0_; }
  const Rat& w1() const { return w1_; }
  const Arith& ar() const { return t_->arith(); }
  bool is_zero() const { return w0_.is_zero() && w1_.is_zero(); }
  bool is_one() const;
  /// True iff the value lies in the base field F.
  bool in_base() const { return w1_.is_zero(); }
  int level() const { return t_->n(); }

 private:
  TowerPtr t_;
  Rat w0_, w1_;
};

Elem operator+(const Elem& a, const Elem& b);
Elem operator-(const Elem& a, const Elem& b);
Elem operator*(const Elem& a, const Elem& b);
Elem operator/(const Elem& a, const Elem& b);
bool operator==(const Elem& a, const Elem& b);
inline bool operator!=(const Elem& a, const Elem& b) { return !(a == b); }
/// Deterministic order used for canonical listings.
int compare(const Elem& a, const Elem& b);

Elem inv(const Elem& a);
Elem sqr(const Elem& a);
Elem pow(const Elem& a, long e);

Elem zero(const TowerPtr& t);
Elem one(const TowerPtr& t);
Elem constant(const TowerPtr& t, GF2m::Value c);
/// t_j, 1-based.
Elem var(const TowerPtr& t, int j);
Elem alpha(const TowerPtr& t);
/// View an element of a subtower (fewer variables, or the base of an
/// extension) inside `t`.
Elem lift(const Elem& x, const TowerPtr& t);
/// The base-field component of an element with w1 = 0, re-homed in base_field.
Elem to_base(const Elem& x);

std::string to_string(const Elem& x);
Elem parse_elem(const TowerPtr& t, const std::string& text);
/// As above; unknown identifiers are resolved through `lookup`.
using ElemLookup = std::function<std::optional<Elem>(const std::string&)>;
Elem parse_elem(const TowerPtr& t, const std::string& text, const ElemLookup& lookup);

/// x^2 + x.
Elem wp(const Elem& x);
/// Conjugation alpha -> alpha + 1.
Elem conj(const Elem& x);
/// Trace and norm to the base field.
Elem trace(const Elem& x);
Elem norm(const Elem& x);

/// Build K = F[name] with wp(name) = a. Rejects a in wp(F) when decidable.
TowerPtr make_ext(const TowerPtr& F, const std::string& name, const Elem& a);

/// Constant-field extension by degree m with the embedding of elements.
struct ConstantExtension {
  TowerPtr tower;
  GF2m::Value gen_image = 1;
  std::function<Elem(const Elem&)> embed;
};
ConstantExtension constant_extend(const TowerPtr& t, int m);
/// Re-express a Rat over another GF(2^K) through a constant map.
Rat map_constants(const Rat& x, const Arith& dst, const std::function<GF2m::Value(GF2m::Value)>& f);

// Univariate factorization

/// Polynomial in the top variable of `coeff_field`'s successor, with
/// coefficients in `coeff_field` (a tower without extension).
struct UPoly {
  TowerPtr coeff_field;
  Poly coeffs;
};

struct Factorization {
  Rat unit;
  std::vector<std::pair<Poly, int>> factors;  // monic irreducible, multiplicity
};

/// Factor a nonzero polynomial over GF(2^k) or GF(2^k)(t_1). Over the
/// rational function field, linear factors, factors with constant
/// coefficients and irreducible cofactors of degree <= 3 are found; anything
/// else raises Unsupported.
Factorization factor_univariate(const UPoly& p);
bool is_irreducible(const UPoly& p);

// Places of the top variable

enum class ResidueKind { rational, constant_extension, unsupported };

struct Place {
  TowerPtr field;   // F, n >= 1
  bool infinite = false;
  Poly pi;          // monic irreducible in t_n (finite places)
  int degree = 1;
  ResidueKind kind = ResidueKind::unsupported;
  TowerPtr residue;  // null when unsupported
  GF2m::Value root = 0;        // constant_extension: root of pi in the residue constants
  GF2m::Value gen_image = 1;   // constant_extension: image of the base generator

  std::string name() const;
  bool supported() const { return kind != ResidueKind::unsupported; }
};

Place place_at(const TowerPtr& F, const Elem& pi);
Place place_infinity(const TowerPtr& F);
bool same_place(const Place& a, const Place& b);

/// The default uniformizer: pi, or 1/t at infinity.
Elem uniformizer(const Place& P);
int valuation(const Elem& x, const Place& P);
/// Image of an integral element in the residue field.
Elem reduce(const Elem& x, const Place& P);
/// Write x = u * pi^v with the default uniformizer; returns v and u.
int split_unit(const Elem& x, const Place& P, Elem& unit);
/// Places where x has a zero or pole (finite ones first, by degree then
/// coefficients, then infinity). Factorization limits raise Unsupported.
std::vector<Place> support(const Elem& x);
/// Places where x has a pole.
std::vector<Place> poles(const Elem& x);

// Artin-Schreier structure

enum class Verdict { yes, no, undecided };
std::string to_string(Verdict v);

struct WpMembership {
  Verdict verdict = Verdict::undecided;
  Elem witness;            // wp(witness) = x when yes
  std::string obstruction; // reason for no / undecided
  std::optional<Place> place;
};

WpMembership wp_membership(const Elem& x);

struct AsReduction {
  Elem value;    // x + wp(witness)
  Elem witness;
};
AsReduction as_reduce_with_witness(const Elem& x, const Place& P);
Elem as_reduce(const Elem& x, const Place& P);

}  // namespace kmd
