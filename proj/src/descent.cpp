#include "kmd/descent.hpp"

#include <functional>

#include "kmd/error.hpp"
#include "kmd/residues.hpp"

namespace kmd {

namespace {

// Monomials t_1^e_1 ... t_n^e_n with e_n <= h and e_j <= lower below.
std::vector<std::pair<Elem, int>> monomials(const TowerPtr& F, int h, int lower) {
  std::vector<std::pair<Elem, int>> out{{one(F), 0}};
  for (int j = 1; j <= F->n(); ++j) {
    const int bound = j == F->n() ? h : lower;
    std::vector<std::pair<Elem, int>> next;
    for (int e = 0; e <= bound; ++e)
      for (const auto& [m, top] : out) next.push_back({m * pow(var(F, j), e), j == F->n() ? e : top});
    out = std::move(next);
  }
  return out;
}

struct Cand {
  Elem value;
  int height = -1;  // -1 for zero
  GF2m::Value lead = 0;
};

Cand poly_from_index(const TowerPtr& F, const std::vector<std::pair<Elem, int>>& mons, long idx, long q) {
  Cand p{zero(F), -1, 0};
  for (const auto& [m, top] : mons) {
    const auto c = static_cast<GF2m::Value>(idx % q);
    idx /= q;
    if (!c) continue;
    p.value = p.value + constant(F, c) * m;
    if (top >= p.height) {
      p.height = top;
      p.lead = c;
    }
  }
  return p;
}

bool transfer_trivial(const Elem& lambda, const QForm& phi, const WittOptions& opt, WittResult* out = nullptr) {
  WittResult w = witt_trivial(transfer(scale(lambda, phi)), opt);
  if (out) *out = w;
  return w.verdict == Verdict::yes;
}

// <<b>> tensor rho where rho is an Arf-trivial form over F; nullopt if the
// Arf class is not certified trivial.
std::optional<std::vector<PfisterTerm>> times_slot(const Elem& b, const QForm& rho) {
  if (wp_membership(arf(rho)).verdict != Verdict::yes) return std::nullopt;
  std::vector<PfisterTerm> out;
  for (const auto& p : rho.pairs)
    if (!p.a.is_one()) out.push_back({one(rho.field), {b, p.a}, p.b});
  return out;
}

QForm rho(const Elem& c) {
  const Elem tr = to_base(trace(c));
  return orth_sum(transfer(unit_pair(c)), unit_pair(tr));
}

// Value of [1, d] at (u, v).
Elem pair_value(const Elem& d, const Elem& u, const Elem& v) { return sqr(u) + u * v + d * sqr(v); }

std::optional<QPair> descend_pair(const QPair& p, const TowerPtr& K, int bound) {
  const TowerPtr& F = K->base;
  Elem d = p.b;
  if (!d.in_base()) {
    auto m = wp_membership(Elem(F, d.w1()));
    if (m.verdict != Verdict::yes) return std::nullopt;
    const Elem y = lift(m.witness, K);
    d = d + wp(alpha(K) * y);
    if (!d.in_base()) throw Error("internal: slot descent failed");
  }
  if (p.a.in_base()) return QPair{to_base(p.a), to_base(d)};
  // Rescale by a value of [1, d] at coordinates u, v in K of bounded height.
  const long q = F->arith().gf().order();
  const Elem al = alpha(K);
  for (int h = 0; h <= bound; ++h) {
    const auto mons = monomials(F, h, 0);
    long count = 1;
    for (std::size_t i = 0; i < mons.size(); ++i) count *= q;
    if (count * count * count * count > 200000) break;
    std::vector<Elem> polys;
    for (long i = 0; i < count; ++i) polys.push_back(lift(poly_from_index(F, mons, i, q).value, K));
    for (const auto& u0 : polys)
      for (const auto& u1 : polys)
        for (const auto& v0 : polys)
          for (const auto& v1 : polys) {
            const Elem c = p.a * pair_value(d, u0 + al * u1, v0 + al * v1);
            if (!c.is_zero() && c.in_base()) return QPair{to_base(c), to_base(d)};
          }
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(DescentVerdict v) {
  switch (v) {
    case DescentVerdict::descends:
      return "descends";
    case DescentVerdict::no_descent_certified:
      return "no_descent_certified";
    default:
      return "unknown";
  }
}

namespace {

LambdaSearch lambda_enumerate(const QForm& phi, const LambdaBounds& bounds,
                              const std::function<bool(const Elem&)>& accept) {
  const TowerPtr& K = phi.field;
  if (!K->has_ext) throw Error("lambda_search needs a form over a quadratic extension");
  const TowerPtr& F = K->base;
  const long q = F->arith().gf().order();
  const auto mons = monomials(F, bounds.degree, bounds.lower_degree);
  const Elem al = alpha(K);
  LambdaSearch r;
  for (int h = 0; h <= bounds.degree; ++h) {
    std::size_t m = 0;
    while (m < mons.size() && mons[m].second <= h) ++m;
    // mons is ordered with the top exponent outermost.
    long count = 1;
    for (std::size_t i = 0; i < m; ++i) {
      if (count > (1L << 40) / q) throw Error("lambda pool too large for the given bounds");
      count *= q;
    }
    const std::vector<std::pair<Elem, int>> sub(mons.begin(), mons.begin() + static_cast<long>(m));
    for (long i1 = 0; i1 < count; ++i1) {
      const Cand w1 = poly_from_index(F, sub, i1, q);
      if (w1.height >= 0 && w1.lead != 1) continue;
      for (long i0 = 0; i0 < count; ++i0) {
        const Cand w0 = poly_from_index(F, sub, i0, q);
        if (w1.height < 0 && (w0.height < 0 || w0.lead != 1)) continue;
        if (std::max(w0.height, w1.height) != h) continue;
        if (r.tried >= bounds.budget) {
          r.budget_exhausted = true;
          r.report = "budget of " + std::to_string(bounds.budget) + " candidates exhausted at height " +
                     std::to_string(h);
          return r;
        }
        ++r.tried;
        const Elem lambda = lift(w0.value, K) + al * lift(w1.value, K);
        if (transfer_trivial(lambda, phi, bounds.witt) && accept(lambda)) {
          r.lambda = lambda;
          r.report = "found at height " + std::to_string(h) + " after " + std::to_string(r.tried) + " candidates";
          return r;
        }
      }
    }
  }
  r.report = "no lambda up to height " + std::to_string(bounds.degree) + " (" + std::to_string(r.tried) +
             " candidates)";
  return r;
}

}  // namespace

LambdaSearch lambda_search(const QForm& phi, const LambdaBounds& bounds) {
  return lambda_enumerate(phi, bounds, [](const Elem&) { return true; });
}

std::optional<Reconstruction> reconstruct(const Elem& lambda, const QForm& phi, int bound, std::string* note) {
  const TowerPtr& K = phi.field;
  if (!K->has_ext) throw Error("reconstruct needs a form over a quadratic extension");
  const TowerPtr& F = K->base;
  auto fail = [&](const std::string& why) -> std::optional<Reconstruction> {
    if (note) *note = "not reconstructed within bound " + std::to_string(bound) + ": " + why;
    return std::nullopt;
  };
  if (phi.dim() != 6 || !phi.quasi.empty()) return fail("input is not a 6-dimensional nonsingular form");
  const QForm psi = scale(lambda, phi);
  std::vector<QPair> pairs;
  for (const auto& p : psi.pairs) {
    auto d = descend_pair(p, K, bound);
    if (!d) return fail("pair " + to_string(p.a) + "[1, " + to_string(p.b) + "] has no F-representative");
    pairs.push_back(*d);
  }
  Reconstruction rc;
  const Elem a = Elem(F, K->ext_a);
  Elem s = zero(F);
  for (const auto& p : pairs) s = s + p.b;
  auto arf_class = wp_membership(s);
  if (arf_class.verdict == Verdict::no) {
    pairs.back().b = pairs.back().b + a;
    rc.repaired = true;
    if (wp_membership(s + a).verdict != Verdict::yes) return fail("Arf invariant not repaired by wp(alpha)");
  } else if (arf_class.verdict == Verdict::undecided) {
    return fail("Arf class undecided");
  }
  const Elem c1 = pairs[0].a;
  rc.lambda = lambda / lift(c1, K);
  const Elem c1i = inv(c1);
  rc.phi0 = make_qform(F, {{one(F), pairs[0].b}, {pairs[1].a * c1i, pairs[1].b}, {pairs[2].a * c1i, pairs[2].b}});
  rc.B0 = make_biquat({pairs[1].b, pairs[1].a * c1i}, {pairs[2].b, pairs[2].a * c1i});
  if (witt_trivial(orth_sum(extend(rc.phi0, K), scale(rc.lambda, phi))).verdict != Verdict::yes)
    return fail("restriction check not certified");
  if (witt_trivial(orth_sum(albert_form(rc.B0), rc.phi0)).verdict != Verdict::yes)
    return fail("Albert form check not certified");
  if (note) *note = rc.repaired ? "reconstructed after Arf repair" : "reconstructed";
  return rc;
}

QForm albert_transfer(const BiquatAlg& B, std::string* note) {
  const QForm phi = albert_form(B);
  QForm t = transfer(phi);
  auto say = [&](const std::string& s) {
    if (note) *note = s;
  };
  if (!B.q1.b.in_base() || !B.q2.b.in_base()) {
    say("Kummer slots outside F: no I^2 witness");
    return t;
  }
  std::vector<PfisterTerm> terms;
  for (const QuatSymbol* q : {&B.q1, &B.q2}) {
    auto part = times_slot(to_base(q->b), rho(q->a));
    if (!part) {
      say("trace form Arf class not certified");
      return t;
    }
    terms.insert(terms.end(), part->begin(), part->end());
  }
  const TowerPtr& F = t.field;
  const Elem tr1 = to_base(trace(B.q1.a)), tr2 = to_base(trace(B.q2.a));
  QForm rest = make_qform(F, {{one(F), tr1 + tr2}, {to_base(B.q1.b), tr1}, {to_base(B.q2.b), tr2}});
  auto w = witt_trivial(rest);
  if (w.verdict == Verdict::no) throw Error("internal: corestriction form is not hyperbolic");
  if (w.verdict != Verdict::yes) {
    say("corestriction part undecided: no I^2 witness");
    return t;
  }
  t.level_tag = 2;
  t.witness = std::move(terms);
  say("I^2 witness from the Kummer slots");
  return t;
}

DescentReport delta_decide(const BiquatAlg& B, const LambdaBounds& bounds, int reconstruct_bound) {
  const TowerPtr& K = B.field();
  if (!K->has_ext) throw Error("unsupported tower: delta needs K = F[alpha]");
  DescentReport r{B, cor_zero(B), {}, {}, {}, {}, DescentVerdict::unknown, {}, {}, {}, {}, bounds, 0, {}};
  if (r.cor_check.verdict == Verdict::no) throw Error("corestriction of B is nonzero: delta is undefined");
  if (r.cor_check.verdict == Verdict::undecided) {
    r.diagnostics.push_back("corestriction undecided");
    r.diagnostics.insert(r.diagnostics.end(), r.cor_check.diagnostics.begin(), r.cor_check.diagnostics.end());
    return r;
  }
  r.phi = albert_form(B);
  r.tr_phi = albert_transfer(B, &r.e3_note);
  if (r.tr_phi.level_tag && *r.tr_phi.level_tag >= 2) {
    r.e3_rep = e_map(r.tr_phi, 2);
  } else {
    r.diagnostics.push_back("transfer of the Albert form has no I^2 witness");
  }
  LambdaSearch s = lambda_search(r.phi, bounds);
  r.lambdas_tried = s.tried;
  r.diagnostics.push_back("lambda search: " + s.report);
  if (!s.lambda) return r;
  WittOptions strict = bounds.witt;
  strict.search_degree = std::max(strict.search_degree, 1);
  WittResult check;
  if (!transfer_trivial(*s.lambda, r.phi, strict, &check))
    throw Error("internal: lambda certificate failed re-verification");
  if (!check.chain.empty() && !verify_chain(transfer(scale(*s.lambda, r.phi)), check.chain))
    throw Error("internal: certificate chain does not verify");
  r.verdict = DescentVerdict::descends;
  r.certificate = s.lambda;
  r.certificate_check = check;
  r.reconstructed = reconstruct(*s.lambda, r.phi, reconstruct_bound, &r.reconstruction_note);
  if (!r.reconstructed) {
    // Later certificates in pool order may give F-rational coefficients.
    LambdaBounds more = bounds;
    more.budget = std::min(bounds.budget, 2000L);
    long skipped = 0;
    lambda_enumerate(r.phi, more, [&](const Elem& l) {
      if (skipped++ == 0) return false;
      std::string note;
      r.reconstructed = reconstruct(l, r.phi, reconstruct_bound, &note);
      if (r.reconstructed) r.reconstruction_note = note + " from lambda = " + to_string(l);
      return r.reconstructed.has_value();
    });
  }
  if (!r.reconstructed) r.reconstruction_note = "descends, B0 " + r.reconstruction_note;
  return r;
}

ScaleIdentity scale_identity_check(const BiquatAlg& B, const Elem& lambda) {
  const TowerPtr& K = B.field();
  if (!K->has_ext) throw Error("scale_identity_check needs K = F[alpha]");
  if (!K->arith().is_square(K->ext_a)) throw Error("square representative required: wp(alpha) is not in F^2");
  if (lambda.is_zero()) throw Error("lambda must be nonzero");
  ScaleIdentity r;
  bool any_no = false, all_yes = true;
  // Level one: e(Tr <<lambda, a_j]]) = Tr(a_j dlog lambda).
  std::vector<PfisterTerm> extra;
  bool extra_ok = true;
  for (const QuatSymbol* q : {&B.q1, &B.q2}) {
    const QForm tq = transfer(pfister({lambda}, q->a));
    ZeroTest z;
    try {
      z = zero_test(clifford(tq) + class_of(tr_form(q->a * dlog(lambda))));
    } catch (const Unsupported& e) {
      z.diagnostics.push_back(e.what());
    }
    any_no |= z.verdict == Verdict::no;
    all_yes &= z.verdict == Verdict::yes;
    r.level_one.push_back(z);
    if (!q->b.in_base()) {
      extra_ok = false;
      continue;
    }
    if (auto t = times_slot(to_base(q->b), tq))
      extra.insert(extra.end(), t->begin(), t->end());
    else
      extra_ok = false;
  }
  std::string note;
  const QForm tphi = albert_transfer(B, &note);
  if (tphi.level_tag && *tphi.level_tag >= 2 && extra_ok) {
    CohClass lhs = e_map(tphi, 2);
    QForm tlphi = transfer(scale(lambda, albert_form(B)));
    tlphi.level_tag = 2;
    tlphi.witness = tphi.witness;
    tlphi.witness.insert(tlphi.witness.end(), extra.begin(), extra.end());
    const DiffForm cor = tr_form(wedge(dlog(lambda), biquat_class(B).rep));
    CohClass rhs = e_map(tlphi, 2) + class_of(cor);
    r.difference = zero_test(lhs + rhs);
    if (r.difference->verdict == Verdict::no) any_no = true;
    if (r.difference->verdict == Verdict::undecided) r.diagnostics.push_back("H^3 difference undecided");
  } else {
    r.diagnostics.push_back("H^3 sides not representable: " + (extra_ok ? note : "Kummer slots outside F"));
  }
  if (any_no) {
    r.verdict = Verdict::no;
    r.status = "violated";
  } else if (all_yes) {
    r.verdict = Verdict::yes;
    r.status = "holds";
  } else {
    r.status = "inconclusive";
  }
  return r;
}

InjectionReport injection_instance(const CohClass& w, const CohClass& c, const Elem& a, const Elem& f) {
  const TowerPtr& L = f.tower();
  if (L->has_ext || L->n() < 1) throw Error("injection_instance needs f in a rational function field F(t)");
  const TowerPtr F = truncated(L, L->n() - 1);
  if (!same_tower(a.tower(), F) || !same_tower(c.rep.field, F) || !same_tower(w.rep.field, F))
    throw Error("w, c and a must live over the field below t");
  if (c.rep.degree != 1 || w.rep.degree != 2) throw Error("c must have level 1 and w level 2");
  if (f.is_zero()) throw Error("f must be nonzero");
  InjectionReport r;
  const Elem t = var(L, L->n());
  const Place P = place_at(L, t);
  std::vector<Place> places;
  try {
    places = support(f);
  } catch (const Unsupported& e) {
    r.diagnostics.push_back(std::string("factorization: ") + e.what());
    ++r.unsupported;
  }
  for (const auto& Q : places) {
    r.places.push_back({Q.name(), Q.supported()});
    if (!Q.supported()) ++r.unsupported;
    if (!Q.infinite && valuation(f, Q) > 1) throw Error("f must be square-free");
  }
  const Elem aL = lift(a, L);
  std::vector<Symbol> syms;
  for (const auto& s : presentation(c)) {
    Symbol u{lift(s.b, L), {}};
    for (const auto& x : s.slots) u.slots.push_back(lift(x, L));
    u.slots.push_back(f);
    syms.push_back(u);
  }
  syms.push_back({aL, {t, f}});
  r.z = class_of_symbols(L, 2, syms);
  r.xi = residue_xi(r.z, P);
  r.chi = residue_chi(r.z, P);
  const TowerPtr& R = P.residue;
  auto down = [&](const Elem& x) { return reduce(lift(x, L), P); };
  auto on_residue = [&](const CohClass& k) {
    std::vector<Symbol> out;
    for (const auto& s : presentation(k)) {
      Symbol u{down(s.b), {}};
      for (const auto& x : s.slots) u.slots.push_back(down(x));
      out.push_back(u);
    }
    return class_of_symbols(R, k.rep.degree, out);
  };
  const CohClass cR = on_residue(c), wR = on_residue(w);
  const Elem aR = down(a);
  const int v = valuation(f, P);
  r.t_divides_f = v > 0;
  std::vector<const ZeroTest*> checks;
  if (!r.t_divides_f) {
    const Elem f0 = reduce(f, P);
    r.xi_formula = zero_test(r.xi + class_of_symbols(R, 1, {Symbol{aR, {f0}}}));
    r.xi_zero = zero_test(r.xi);
    r.norm_condition = represents(pfister({}, aR), f0);
    r.w_condition = zero_test(r.chi + wR);
    r.diagnostics.push_back("case (i): t does not divide f");
    const CohClass expected = wedge_dlog({f0}, cR);
    ZeroTest wz = zero_test(wR + expected);
    if (wz.verdict == Verdict::no) r.diagnostics.push_back("w differs from c ^ df(0)/f(0)");
    checks = {&*r.xi_formula, &*r.w_condition};
    if (r.xi_zero->verdict != Verdict::undecided && r.norm_condition->verdict != Verdict::undecided &&
        r.xi_zero->verdict != r.norm_condition->verdict)
      r.diagnostics.push_back("norm condition disagrees with the xi residue");
    if (r.xi_zero->verdict == Verdict::yes && r.norm_condition->verdict == Verdict::no) {
      r.verdict = Verdict::no;
      return r;
    }
  } else {
    const Elem g0 = reduce(f / t, P);
    const CohClass ag = class_of_symbols(R, 1, {Symbol{aR, {g0}}});
    r.xi_formula = zero_test(r.xi + cR + ag);
    r.xi_zero = zero_test(r.xi);
    r.c_condition = zero_test(cR + ag);
    r.w_condition = zero_test(wR);
    r.diagnostics.push_back("case (ii): t divides f");
    ZeroTest chi_zero = zero_test(r.chi);
    if (chi_zero.verdict == Verdict::no) r.diagnostics.push_back("chi residue is nonzero");
    checks = {&*r.xi_formula, &*r.c_condition, &*r.w_condition};
  }
  bool undecided = false;
  for (const auto* z : checks) {
    if (z->verdict == Verdict::no) {
      r.verdict = Verdict::no;
      return r;
    }
    undecided |= z->verdict == Verdict::undecided;
  }
  r.verdict = undecided ? Verdict::undecided : Verdict::yes;
  return r;
}

OddExtension odd_extension_check(const BiquatAlg& B, int m, const LambdaBounds& ext_bounds,
                                 const LambdaBounds& base_bounds) {
  if (m < 1 || m % 2 == 0) throw Error("odd_extension_check needs an odd degree");
  OddExtension r;
  r.m = m;
  ConstantExtension ce = constant_extend(B.field(), m);
  BiquatAlg Bm{{ce.embed(B.q1.a), ce.embed(B.q1.b)}, {ce.embed(B.q2.a), ce.embed(B.q2.b)}};
  r.extended = lambda_search(albert_form(Bm), ext_bounds);
  r.base = lambda_search(albert_form(B), base_bounds);
  r.violation = r.extended.lambda && !r.base.lambda && !r.base.budget_exhausted;
  r.report = "extended: " + r.extended.report + "; base: " + r.base.report;
  if (r.violation) r.report += "; counterexample candidate: " + to_string(B);
  return r;
}

}  // namespace kmd
