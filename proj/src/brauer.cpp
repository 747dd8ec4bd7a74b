#include "kmd/brauer.hpp"

#include "kmd/error.hpp"

namespace kmd {

QuatSymbol make_quat(const Elem& a, const Elem& b) {
  if (!same_tower(a.tower(), b.tower())) throw Error("quaternion slots over different fields");
  if (b.is_zero()) throw Error("quaternion symbol needs a nonzero second slot");
  return {a, b};
}

BiquatAlg make_biquat(const QuatSymbol& q1, const QuatSymbol& q2) {
  make_quat(q1.a, q1.b);
  make_quat(q2.a, q2.b);
  if (!same_tower(q1.a.tower(), q2.a.tower())) throw Error("biquaternion factors over different fields");
  return {q1, q2};
}

BiquatAlg extend(const BiquatAlg& B, const TowerPtr& K) {
  auto up = [&](const QuatSymbol& q) { return QuatSymbol{lift(q.a, K), lift(q.b, K)}; };
  return {up(B.q1), up(B.q2)};
}

std::string to_string(const QuatSymbol& q) { return "[" + to_string(q.a) + ", " + to_string(q.b) + ")"; }

std::string to_string(const BiquatAlg& B) { return to_string(B.q1) + " * " + to_string(B.q2); }

CohClass quat_class(const QuatSymbol& q) {
  make_quat(q.a, q.b);
  return class_of_symbols(q.a.tower(), 1, {Symbol{q.a, {q.b}}});
}

CohClass biquat_class(const BiquatAlg& B) { return quat_class(B.q1) + quat_class(B.q2); }

QForm albert_form(const BiquatAlg& B) {
  make_biquat(B.q1, B.q2);
  const TowerPtr& F = B.field();
  QForm phi = make_qform(F, {{one(F), B.q1.a + B.q2.a}, {B.q1.b, B.q1.a}, {B.q2.b, B.q2.a}});
  if (!arf(phi).is_zero()) throw Error("internal: Albert form with nonzero Arf invariant");
  const DiffForm cl = clifford_form(phi);
  const CohClass sum = biquat_class(B);
  if (cl != sum.rep && zero_test(class_of(cl + sum.rep)).verdict != Verdict::yes)
    throw Error("internal: Albert form Clifford invariant differs from the symbol classes");
  phi.level_tag = 1;
  phi.witness = {PfisterTerm{one(F), {B.q1.b}, B.q1.a}, PfisterTerm{one(F), {B.q2.b}, B.q2.a}};
  return phi;
}

CorZero cor_zero(const BiquatAlg& B) {
  const TowerPtr& K = B.field();
  if (!K->has_ext) throw Error("cor_zero needs an algebra over a quadratic extension");
  CorZero r;
  if (K->arith().is_square(K->ext_a)) {
    r.omega = zero_test(class_of(tr_form(biquat_class(B).rep)));
  } else {
    r.diagnostics.push_back("tr_form route skipped: wp(" + K->ext_name + ") is not a square");
  }
  QForm t = transfer(albert_form(B));
  try {
    r.forms = zero_test(clifford(t));
  } catch (const Unsupported& e) {
    r.diagnostics.push_back(std::string("forms route: ") + e.what());
  }
  for (const auto* z : {&r.omega, &r.forms}) {
    if (!*z) continue;
    if ((*z)->verdict == Verdict::undecided) {
      for (const auto& d : (*z)->diagnostics) r.diagnostics.push_back(d);
      continue;
    }
    if (r.verdict != Verdict::undecided && r.verdict != (*z)->verdict)
      throw Error("internal: corestriction routes disagree");
    r.verdict = (*z)->verdict;
  }
  return r;
}

}  // namespace kmd
