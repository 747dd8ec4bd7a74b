#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmd/fields.hpp"
#include "kmd/forms.hpp"

namespace kmd {

/// A p-form sum_S c_S dlog t_S over the fixed 2-basis; S is a bit mask
/// (bit j-1 for t_j) with popcount p. Zero coefficients are never stored.
struct DiffForm {
  TowerPtr field;
  int degree = 0;
  std::map<unsigned, Elem> coeffs;
};

DiffForm form_zero(const TowerPtr& F, int degree);
DiffForm form_scalar(const Elem& c);
/// dx/x.
DiffForm dlog(const Elem& x);
/// dlog x_1 ^ ... ^ dlog x_p (degree 0 form 1 for an empty list).
DiffForm dlog_wedge(const TowerPtr& F, const std::vector<Elem>& xs);
DiffForm operator+(const DiffForm& a, const DiffForm& b);
DiffForm operator*(const Elem& c, const DiffForm& w);
bool operator==(const DiffForm& a, const DiffForm& b);
inline bool operator!=(const DiffForm& a, const DiffForm& b) { return !(a == b); }
bool is_zero(const DiffForm& w);
DiffForm wedge(const DiffForm& a, const DiffForm& b);
DiffForm d(const DiffForm& w);
/// c dlog t_S -> c^2 dlog t_S.
DiffForm frobenius(const DiffForm& w);
DiffForm wp_form(const DiffForm& w);
/// Coefficientwise trace from K = F[alpha] to F (requires wp(alpha) in F^2).
DiffForm tr_form(const DiffForm& w);
DiffForm lift_form(const DiffForm& w, const TowerPtr& K);
/// f with wp(alpha) + wp(f) a square, searched over polynomials of degree
/// <= bound in the top variable.
std::optional<Elem> square_representative(const Elem& a, int bound);
std::string to_string(const DiffForm& w);

/// b dlog s_1 ^ ... ^ dlog s_p.
struct Symbol {
  Elem b;
  std::vector<Elem> slots;
};
DiffForm symbol_form(const TowerPtr& F, const Symbol& s);

/// A class in H^{p+1} represented by a p-form, optionally with a symbol
/// presentation whose sum equals rep.
struct CohClass {
  DiffForm rep;
  std::vector<Symbol> symbols;
  bool has_symbols = false;
};
CohClass class_of(const DiffForm& w);
CohClass class_of_symbols(const TowerPtr& F, int degree, std::vector<Symbol> symbols);
CohClass operator+(const CohClass& a, const CohClass& b);
std::string to_string(const CohClass& c);

/// Symbols of the class, reading a bare representative as sum c_S dlog t_S.
std::vector<Symbol> presentation(const CohClass& c);
/// dlog s_1 ^ ... ^ dlog s_m ^ z.
CohClass wedge_dlog(const std::vector<Elem>& slots, const CohClass& z);

/// sum b_i da_i/a_i for q = sum a_i[1,b_i] (representative only).
DiffForm clifford_form(const QForm& q);
/// Class of clifford_form; throws for a nontrivial Arf invariant.
CohClass clifford(const QForm& q);
/// Level 1: clifford class (needs Arf trivial). Level 2: from the witness.
CohClass e_map(const QForm& q, int level);
/// Sum of Pfister forms <<s_1..s_p, b]] for a class given by symbols.
QForm f_inv(const CohClass& c);

struct ZeroTest {
  Verdict verdict = Verdict::undecided;
  std::string method;
  std::optional<Place> place;
  std::string obstruction;
  std::vector<std::string> diagnostics;
};

ZeroTest zero_test(const CohClass& c);
/// Class of c dlog t in H^2 of GF(2^k)(t), decided by local invariants.
ZeroTest h2_local_test(const Elem& c);
/// Local invariant Tr Res_P(c dt/t) in GF(2).
int h2_local_invariant(const Elem& c, const Place& P);

}  // namespace kmd
