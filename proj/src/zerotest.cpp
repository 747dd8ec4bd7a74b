#include <algorithm>

#include "kmd/error.hpp"
#include "kmd/kato.hpp"

namespace kmd {

namespace {

GFPoly to_gfpoly(const Poly& p) {
  GFPoly r;
  for (const auto& c : p) r.push_back(c.base_value());
  gfp::trim(r);
  return r;
}

Poly from_gfpoly(const Arith& A, const GFPoly& p) {
  Poly r;
  for (auto c : p) r.push_back(A.constant(c, 0));
  while (!r.empty() && r.back().is_zero()) r.pop_back();
  return r;
}

int gf_trace(const GF2m& f, GF2m::Value c) {
  GF2m::Value s = 0, p = c;
  for (int i = 0; i < f.degree(); ++i) {
    s ^= p;
    p = f.mul(p, p);
  }
  return static_cast<int>(s & 1u);
}

struct LocalData {
  std::vector<std::pair<GFPoly, int>> finite;  // place, invariant
  int at_infinity = 0;
};

// Invariants of h dt at every place, h = c/t.
LocalData local_data(const Elem& c) {
  const TowerPtr& F = c.tower();
  if (F->has_ext || F->n() != 1) throw Error("local invariants need GF(2^k)(t)");
  const GF2m& f = F->arith().gf();
  LocalData out;
  if (c.is_zero()) return out;
  const Elem h = c / var(F, 1);
  const GFPoly N = to_gfpoly(h.w0().num()), D = to_gfpoly(h.w0().den());
  GFPoly q, r;
  gfp::divmod(f, N, D, q, r);
  const int dd = gfp::deg(D);
  if (dd >= 1 && static_cast<int>(r.size()) >= dd) out.at_infinity = gf_trace(f, r[dd - 1]);
  if (dd < 1) return out;
  GF2m::Value unit;
  for (const auto& [pi, e] : gfp::factor(f, D, unit)) {
    GFPoly Pe{1};
    for (int i = 0; i < e; ++i) Pe = gfp::mul(f, Pe, pi);
    GFPoly rest, rem;
    gfp::divmod(f, D, Pe, rest, rem);
    GFPoly hi = gfp::mod(f, gfp::mul(f, gfp::mod(f, N, Pe), gfp::inv_mod(f, rest, Pe)), Pe);
    const int top = gfp::deg(Pe) - 1;
    GF2m::Value coef = static_cast<int>(hi.size()) > top ? hi[top] : 0;
    out.finite.push_back({pi, gf_trace(f, coef)});
  }
  return out;
}

bool is_trace_zero_constant(const Arith& A, const Rat& c) {
  return gf_trace(A.gf(), A.base_constant(c)) == 0;
}

// a(t) with t replaced by y (same level, top variable).
Rat compose_top(const Arith& A, const Rat& a, const Rat& y) {
  const int L = a.level();
  if (a.is_zero() || A.is_top_constant(a)) return a;
  auto horner = [&](const Poly& p) {
    Rat s = A.zero(L);
    for (std::size_t i = p.size(); i-- > 0;) s = A.add(A.mul(s, y), A.lift(p[i], L));
    return s;
  };
  return A.div(horner(a.num()), horner(a.den()));
}

// Top-variable valuation at 0.
int val0(const Rat& a) {
  if (a.is_zero()) return 1 << 20;
  auto low = [](const Poly& p) {
    int i = 0;
    while (p[i].is_zero()) ++i;
    return i;
  };
  return low(a.num()) - low(a.den());
}

ZeroTest h3_test(const CohClass& cls) {
  const TowerPtr& F = cls.rep.field;
  const Arith& A = F->arith();
  ZeroTest z;
  Rat c = cls.rep.coeffs.begin()->second.w0();
  // Exact terms drop out and wp(c w) ~ 0, so [c w] = [C(c) w].
  for (int it = 0; it < 64; ++it) {
    if (c.is_zero()) {
      z.verdict = Verdict::yes;
      z.method = "cartier";
      return z;
    }
    if (A.is_base_constant(c)) {
      const bool zero = is_trace_zero_constant(A, c);
      z.verdict = zero ? Verdict::yes : Verdict::no;
      z.method = "cartier";
      if (!zero) z.obstruction = "reduces to the constant " + A.format(c, F->vars) + " outside wp(k)";
      return z;
    }
    Rat next = A.square_component(c, 0);
    if (A.equal(next, c)) break;
    c = next;
  }
  // Residue test at degree-one places of the top variable and at infinity.
  const Elem ce(F, c);
  std::vector<std::pair<std::optional<Rat>, Place>> places;  // shift r (t = s + r) or infinity
  try {
    for (const auto& P : support(ce)) {
      if (P.infinite) {
        places.push_back({std::nullopt, P});
      } else if (P.degree == 1) {
        places.push_back({P.pi[0], P});
      }
    }
  } catch (const Unsupported& e) {
    z.diagnostics.push_back(std::string("places skipped: ") + e.what());
  }
  bool have_inf = std::any_of(places.begin(), places.end(), [](const auto& p) { return !p.first; });
  if (!have_inf) places.push_back({std::nullopt, place_infinity(F)});
  if (std::none_of(places.begin(), places.end(), [&](const auto& p) { return p.first && p.first->is_zero(); }))
    places.push_back({A.zero(1), place_at(F, var(F, 2))});
  const Rat t = A.var(2, 2);
  for (const auto& [shift, P] : places) {
    Rat cc;
    if (shift) {
      Rat y = A.add(t, A.lift(*shift, 2));
      cc = A.mul(compose_top(A, c, y), A.div(t, y));
    } else {
      cc = compose_top(A, c, A.inv(t));
    }
    for (int it = 0; it < 64 && val0(cc) < 0; ++it) {
      Rat next = A.square_component(cc, 0);
      if (A.equal(next, cc)) break;
      cc = next;
    }
    if (val0(cc) < 0) {
      z.diagnostics.push_back("not residue-ready at " + P.name());
      continue;
    }
    Rat cbar = A.eval_top(cc, A.zero(1));
    TowerPtr R = truncated(F, 1);
    ZeroTest sub = h2_local_test(Elem(R, cbar));
    if (sub.verdict == Verdict::no) {
      z.verdict = Verdict::no;
      z.method = "residue";
      z.place = P;
      z.obstruction = "xi residue at " + P.name() + " is nonzero: " + sub.obstruction;
      return z;
    }
  }
  z.diagnostics.push_back("Cartier reduction stalled at " + A.format(c, F->vars));
  return z;
}

ZeroTest witt_route(const CohClass& c, ZeroTest z) {
  CohClass sc = class_of_symbols(c.rep.field, c.rep.degree, presentation(c));
  QForm q = f_inv(sc);
  WittResult w = witt_trivial(q);
  if (w.verdict == Verdict::undecided) {
    z.diagnostics.insert(z.diagnostics.end(), w.diagnostics.begin(), w.diagnostics.end());
    return z;
  }
  z.verdict = w.verdict;
  z.method = "pfister_" + w.method;
  z.place = w.place;
  z.obstruction = w.obstruction;
  return z;
}

}  // namespace

int h2_local_invariant(const Elem& c, const Place& P) {
  LocalData ld = local_data(c);
  if (P.infinite) return ld.at_infinity;
  GFPoly pi = to_gfpoly(P.pi);
  for (const auto& [q, v] : ld.finite)
    if (q == pi) return v;
  return 0;
}

ZeroTest h2_local_test(const Elem& c) {
  const TowerPtr& F = c.tower();
  ZeroTest z;
  z.method = "local_invariants";
  LocalData ld = local_data(c);
  const Arith& A = F->arith();
  for (const auto& [pi, v] : ld.finite)
    if (v) {
      z.verdict = Verdict::no;
      z.place = place_at(F, Elem(F, A.from_poly(from_gfpoly(A, pi), 1)));
      z.obstruction = "local invariant 1 at " + z.place->name();
      return z;
    }
  if (ld.at_infinity) {
    z.verdict = Verdict::no;
    z.place = place_infinity(F);
    z.obstruction = "local invariant 1 at infinity";
    return z;
  }
  z.verdict = Verdict::yes;
  return z;
}

ZeroTest zero_test(const CohClass& c) {
  const TowerPtr& F = c.rep.field;
  const int p = c.rep.degree;
  if (p >= 3) throw Error("unsupported level: zero tests cover H^1, H^2 and H^3");
  ZeroTest z;
  if (is_zero(c.rep)) {
    z.verdict = Verdict::yes;
    z.method = "representative";
    return z;
  }
  if (p == 0) {
    auto m = wp_membership(c.rep.coeffs.begin()->second);
    z.verdict = m.verdict;
    z.method = "artin_schreier";
    z.obstruction = m.obstruction;
    z.place = m.place;
    return z;
  }
  if (F->has_ext) {
    z.diagnostics.push_back("no complete test over a quadratic extension");
    return witt_route(c, z);
  }
  if (F->n() == 1 && p == 1) return h2_local_test(c.rep.coeffs.begin()->second);
  if (F->n() == 2 && p == 2) {
    z = h3_test(c);
    if (z.verdict != Verdict::undecided) return z;
    return witt_route(c, z);
  }
  z.diagnostics.push_back("no complete test in this degree");
  return witt_route(c, z);
}

}  // namespace kmd
