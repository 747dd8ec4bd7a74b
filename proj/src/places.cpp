#include <algorithm>

#include "kmd/error.hpp"
#include "kmd/fields.hpp"

namespace kmd {

namespace {

GFPoly to_gf(const Poly& p) {
  GFPoly g;
  g.reserve(p.size());
  for (const auto& c : p) g.push_back(c.base_value());
  gfp::trim(g);
  return g;
}

Poly from_gf(const Arith& A, const GFPoly& g) {
  Poly p;
  p.reserve(g.size());
  for (auto v : g) p.push_back(A.constant(v, 0));
  while (!p.empty() && p.back().is_zero()) p.pop_back();
  return p;
}

bool factor_less(const Arith& A, const Poly& a, const Poly& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return A.pcompare(a, b) < 0;
}

void sort_factors(const Arith& A, std::vector<std::pair<Poly, int>>& fs) {
  std::sort(fs.begin(), fs.end(),
            [&](const auto& x, const auto& y) { return factor_less(A, x.first, y.first); });
}

// Monic divisors of a polynomial over GF(2^k) given its factorization.
std::vector<GFPoly> divisors(const GF2m& f, const std::vector<std::pair<GFPoly, int>>& fs, std::size_t cap) {
  std::vector<GFPoly> out{GFPoly{1}};
  for (const auto& [p, e] : fs) {
    std::vector<GFPoly> next;
    for (const auto& d : out) {
      GFPoly cur = d;
      for (int i = 0; i <= e; ++i) {
        next.push_back(cur);
        if (next.size() > cap) throw Unsupported("factorization search too large");
        cur = gfp::mul(f, cur, p);
      }
    }
    out = std::move(next);
  }
  return out;
}

// Divide p by q as often as possible; returns the multiplicity.
int strip(const Arith& A, Poly& p, const Poly& q, int cl) {
  int m = 0;
  for (;;) {
    Poly quo, rem;
    A.pdivmod(p, q, quo, rem, cl);
    if (!rem.empty()) return m;
    p = std::move(quo);
    ++m;
  }
}

Factorization factor_over_rational_function_field(const TowerPtr& Fc, const Poly& p0) {
  const Arith& A = Fc->arith();
  const GF2m& gf = A.gf();
  const int cl = 1;
  Factorization out;
  out.unit = p0.back();
  Poly q = A.pmonic(p0);

  // Powers of t.
  int m0 = 0;
  while (q.size() > 1 && q[0].is_zero()) {
    q.erase(q.begin());
    ++m0;
  }
  if (m0) out.factors.push_back({A.pvar(cl), m0});
  if (A.pdeg(q) < 1) return out;

  // Clear denominators: P(x,t) = sum_j P_j(x) t^j.
  auto cleared = [&](const Poly& p) {
    GFPoly L{1};
    for (const auto& c : p) {
      if (c.is_zero()) continue;
      GFPoly d = to_gf(c.den());
      GFPoly g = gfp::gcd(gf, L, d);
      GFPoly quo, rem;
      gfp::divmod(gf, L, g, quo, rem);
      L = gfp::mul(gf, quo, d);
    }
    std::vector<GFPoly> P;
    for (const auto& c : p) {
      if (c.is_zero()) {
        P.push_back({});
        continue;
      }
      GFPoly quo, rem;
      gfp::divmod(gf, L, to_gf(c.den()), quo, rem);
      P.push_back(gfp::mul(gf, to_gf(c.num()), quo));
    }
    return P;
  };

  // Factors with constant coefficients: the gcd over x-coefficients.
  {
    std::vector<GFPoly> P = cleared(q);
    std::size_t xdeg = 0;
    for (const auto& c : P) xdeg = std::max(xdeg, c.size());
    GFPoly G;
    for (std::size_t i = 0; i < xdeg; ++i) {
      GFPoly Qi;
      for (std::size_t j = 0; j < P.size(); ++j) {
        if (i < P[j].size() && P[j][i]) {
          if (Qi.size() <= j) Qi.resize(j + 1, 0);
          Qi[j] = P[j][i];
        }
      }
      gfp::trim(Qi);
      G = gfp::gcd(gf, G, Qi);
    }
    if (gfp::deg(G) >= 1) {
      GF2m::Value u;
      for (const auto& [pi, e] : gfp::factor(gf, G, u)) {
        Poly pl;
        for (auto v : pi) pl.push_back(A.constant(v, cl));
        strip(A, q, pl, cl);
        out.factors.push_back({pl, e});
      }
    }
  }

  // Linear factors t + r with r = c*u/w, u | P_0 and w | P_lead.
  if (A.pdeg(q) >= 1) {
    std::vector<GFPoly> P = cleared(q);
    GF2m::Value unit;
    auto f0 = gfp::factor(gf, P.front(), unit);
    auto fd = gfp::factor(gf, P.back(), unit);
    auto du = divisors(gf, f0, 4096);
    auto dw = divisors(gf, fd, 4096);
    if (du.size() * dw.size() * (gf.order() - 1) > 200000)
      throw Unsupported("factorization search too large");
    for (const auto& u : du) {
      for (const auto& w : dw) {
        if (A.pdeg(q) < 1) break;
        if (gfp::deg(gfp::gcd(gf, u, w)) > 0) continue;
        Rat base = A.frac(from_gf(A, u), from_gf(A, w), 1);
        for (GF2m::Value c = 1; c < gf.order(); ++c) {
          Rat r = A.mul(base, A.constant(c, 1));
          if (!A.peval(q, r, cl).is_zero()) continue;
          Poly lin{r, A.one(cl)};
          int e = strip(A, q, lin, cl);
          out.factors.push_back({lin, e});
          if (A.pdeg(q) < 1) break;
        }
      }
    }
  }

  const int d = A.pdeg(q);
  if (d >= 1) {
    if (d > 3)
      throw Unsupported("cannot factor a degree " + std::to_string(d) + " polynomial over " + describe(Fc));
    out.factors.push_back({A.pmonic(q), 1});
  }
  sort_factors(A, out.factors);
  return out;
}

}  // namespace

Factorization factor_univariate(const UPoly& up) {
  const TowerPtr& Fc = up.coeff_field;
  const Arith& A = Fc->arith();
  Poly p = up.coeffs;
  while (!p.empty() && p.back().is_zero()) p.pop_back();
  if (p.empty()) throw Error("zero input");
  const int cl = Fc->n();
  for (const auto& c : p)
    if (c.level() != cl) throw Error("coefficients from an unsupported level");
  if (cl == 0) {
    Factorization out;
    GF2m::Value u;
    auto fs = gfp::factor(A.gf(), to_gf(p), u);
    out.unit = A.constant(u, 0);
    for (auto& [q, e] : fs) out.factors.push_back({from_gf(A, q), e});
    return out;
  }
  if (cl == 1) return factor_over_rational_function_field(Fc, p);
  Factorization out;
  out.unit = p.back();
  if (A.pdeg(p) >= 2) throw Unsupported("factorization over more than one variable is not supported");
  if (A.pdeg(p) == 1) out.factors.push_back({A.pmonic(p), 1});
  return out;
}

bool is_irreducible(const UPoly& p) {
  auto f = factor_univariate(p);
  return f.factors.size() == 1 && f.factors[0].second == 1;
}

// Places

namespace {

void check_field(const TowerPtr& F) {
  if (F->n() < 1) throw Error("places need at least one variable");
}

Place make_place(const TowerPtr& F0, Poly pi) {
  TowerPtr F = base_field(F0);
  check_field(F);
  const Arith& A = F->arith();
  Place P;
  P.field = F;
  P.pi = std::move(pi);
  P.degree = A.pdeg(P.pi);
  const int n = F->n();
  if (P.degree == 1) {
    P.kind = ResidueKind::rational;
    P.residue = truncated(F, n - 1);
    return P;
  }
  bool consts = std::all_of(P.pi.begin(), P.pi.end(), [&](const Rat& c) { return A.is_base_constant(c); });
  const int K = F->k * P.degree;
  if (!consts || K > 24) {
    P.kind = ResidueKind::unsupported;
    return P;
  }
  P.kind = ResidueKind::constant_extension;
  std::vector<std::string> lower(F->vars.begin(), F->vars.end() - 1);
  P.residue = make_field(K, lower);
  P.gen_image = gfp::embed_generator(F->k, K);
  auto big = GF2m::get(K);
  GFPoly m;
  for (const auto& c : P.pi) m.push_back(gfp::embed_value(*big, A.base_constant(c), P.gen_image));
  auto rs = gfp::roots(*big, m);
  if (rs.empty()) throw Error("internal: no root of an irreducible polynomial in its splitting field");
  P.root = rs.front();
  return P;
}

const Rat& top_rat(const Elem& x, const Place& P) {
  if (!x.in_base()) throw Error("valuation of an element outside the base field");
  const TowerPtr& t = x.tower();
  if (t->k != P.field->k || t->vars != P.field->vars)
    throw Error("element and place live over different fields");
  return x.w0();
}

int multiplicity(const Arith& A, const Poly& p, const Poly& pi, int cl) {
  Poly q = p;
  return strip(A, q, pi, cl);
}

}  // namespace

std::string Place::name() const {
  if (infinite) return "inf";
  return to_string(Elem(field, field->arith().from_poly(pi, field->n())));
}

Place place_at(const TowerPtr& F0, const Elem& pi) {
  TowerPtr F = base_field(F0);
  check_field(F);
  const Arith& A = F->arith();
  const Elem pb = lift(to_base(pi), F);
  const Rat& r = pb.w0();
  if (r.is_zero() || !A.is_poly(r)) throw Error("a place needs a nonzero polynomial in " + F->vars.back());
  Poly p = A.pmonic(r.num());
  if (A.pdeg(p) < 1) throw Error("a place needs a non-constant polynomial");
  if (!is_irreducible(UPoly{truncated(F, F->n() - 1), p}))
    throw Error(to_string(pi) + " is not irreducible");
  return make_place(F, std::move(p));
}

Place place_infinity(const TowerPtr& F0) {
  TowerPtr F = base_field(F0);
  check_field(F);
  Place P;
  P.field = F;
  P.infinite = true;
  P.kind = ResidueKind::rational;
  P.residue = truncated(F, F->n() - 1);
  return P;
}

bool same_place(const Place& a, const Place& b) {
  if (!same_tower(a.field, b.field) || a.infinite != b.infinite) return false;
  return a.infinite || a.field->arith().pequal(a.pi, b.pi);
}

Elem uniformizer(const Place& P) {
  const Arith& A = P.field->arith();
  const int n = P.field->n();
  if (P.infinite) return inv(var(P.field, n));
  return Elem(P.field, A.from_poly(P.pi, n));
}

int valuation(const Elem& x, const Place& P) {
  const Rat& r = top_rat(x, P);
  if (r.is_zero()) throw Error("valuation of zero");
  const Arith& A = P.field->arith();
  if (P.infinite) return A.pdeg(r.den()) - A.pdeg(r.num());
  const int cl = P.field->n() - 1;
  return multiplicity(A, r.num(), P.pi, cl) - multiplicity(A, r.den(), P.pi, cl);
}

Elem reduce(const Elem& x, const Place& P) {
  if (!P.supported()) throw Unsupported("residue field at " + P.name() + " is not supported");
  const Rat& r = top_rat(x, P);
  if (r.is_zero()) return zero(P.residue);
  const int v = valuation(x, P);
  if (v < 0) throw Error(to_string(x) + " is not integral at " + P.name());
  if (v > 0) return zero(P.residue);
  const Arith& A = P.field->arith();
  const int cl = P.field->n() - 1;
  if (P.infinite) return Elem(P.residue, A.div(r.num().back(), r.den().back()));
  if (P.kind == ResidueKind::rational) {
    const Rat& root = P.pi[0];
    return Elem(P.residue, A.div(A.peval(r.num(), root, cl), A.peval(r.den(), root, cl)));
  }
  const Arith& D = P.residue->arith();
  auto big = D.gf_ptr();
  const GF2m::Value gi = P.gen_image;
  auto cmap = [&](GF2m::Value c) { return gfp::embed_value(*big, c, gi); };
  Poly n, d;
  for (const auto& c : r.num()) n.push_back(map_constants(c, D, cmap));
  for (const auto& c : r.den()) d.push_back(map_constants(c, D, cmap));
  Rat root = D.constant(P.root, cl);
  return Elem(P.residue, D.div(D.peval(n, root, cl), D.peval(d, root, cl)));
}

int split_unit(const Elem& x, const Place& P, Elem& unit) {
  Elem xb = to_base(x);
  const int v = valuation(xb, P);
  if (P.infinite)
    unit = xb * pow(var(P.field, P.field->n()), v);
  else
    unit = xb / pow(uniformizer(P), v);
  return v;
}

namespace {

std::vector<Place> places_of(const Elem& x, bool zeros) {
  TowerPtr F = base_field(x.tower());
  check_field(F);
  const Elem xb = to_base(x);
  const Rat& r = xb.w0();
  if (r.is_zero()) throw Error("support of zero");
  const Arith& A = F->arith();
  TowerPtr Fc = truncated(F, F->n() - 1);
  std::vector<std::pair<Poly, int>> fs;
  if (A.pdeg(r.den()) >= 1)
    for (auto& f : factor_univariate(UPoly{Fc, r.den()}).factors) fs.push_back(f);
  if (zeros && A.pdeg(r.num()) >= 1)
    for (auto& f : factor_univariate(UPoly{Fc, r.num()}).factors) fs.push_back(f);
  sort_factors(A, fs);
  std::vector<Place> out;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (i > 0 && A.pequal(fs[i].first, fs[i - 1].first)) continue;
    out.push_back(make_place(F, fs[i].first));
  }
  const int dn = A.pdeg(r.num()), dd = A.pdeg(r.den());
  if (zeros ? dn != dd : dn > dd) out.push_back(place_infinity(F));
  return out;
}

}  // namespace

std::vector<Place> support(const Elem& x) { return places_of(x, true); }
std::vector<Place> poles(const Elem& x) { return places_of(x, false); }

// Artin-Schreier reduction

namespace {

enum class Step { ok, nonsquare, unsupported };

// One pole-reduction step at P for an even pole of order e: returns y with
// x + wp(y) having a smaller pole at P and no new poles elsewhere.
Step pole_step(const Elem& x, const Place& P, int e, Elem& y, Elem& lead) {
  const TowerPtr& F = P.field;
  const int n = F->n();
  if (P.kind == ResidueKind::rational) {
    Elem u;
    split_unit(x, P, u);
    lead = reduce(u, P);
    const Arith& A = F->arith();
    if (!A.is_square(lead.w0())) return Step::nonsquare;
    Elem s = lift(Elem(P.residue, A.sqrt(lead.w0())), F);
    y = P.infinite ? s * pow(var(F, n), e / 2) : s / pow(uniformizer(P), e / 2);
    return Step::ok;
  }
  if (P.kind == ResidueKind::constant_extension && n == 1) {
    const Arith& A = F->arith();
    const GF2m& gf = A.gf();
    const Rat& r = x.w0();
    GFPoly pi = to_gf(P.pi), num = to_gf(r.num()), den = to_gf(r.den());
    for (int i = 0; i < e; ++i) {
      GFPoly q, rem;
      gfp::divmod(gf, den, pi, q, rem);
      den = q;
    }
    GFPoly c = gfp::mod(gf, gfp::mul(gf, num, gfp::inv_mod(gf, den, pi)), pi);
    lead = Elem(F, A.from_poly(from_gf(A, c), 1));
    GFPoly s = gfp::frob_mod(gf, c, F->k * P.degree - 1, pi);
    y = Elem(F, A.from_poly(from_gf(A, s), 1)) / pow(uniformizer(P), e / 2);
    return Step::ok;
  }
  return Step::unsupported;
}

WpMembership wp_rec(const Elem& x) {
  const TowerPtr& F = x.tower();
  const Arith& A = F->arith();
  WpMembership out;
  if (F->n() == 0) {
    GF2m::Value root;
    if (A.gf().solve_wp(x.w0().base_value(), root)) {
      out.verdict = Verdict::yes;
      out.witness = constant(F, root);
    } else {
      out.verdict = Verdict::no;
      out.obstruction = "constant " + to_string(x) + " has absolute trace 1";
    }
    return out;
  }
  Elem cur = x, acc = zero(F);
  bool undecided = false;
  for (int round = 0; round < 4 && !cur.is_zero(); ++round) {
    std::vector<Place> ps;
    try {
      ps = poles(cur);
    } catch (const Unsupported& e) {
      out.verdict = Verdict::undecided;
      out.obstruction = e.what();
      return out;
    }
    if (ps.empty()) break;
    for (const auto& P : ps) {
      for (;;) {
        if (cur.is_zero()) break;
        const int v = valuation(cur, P);
        if (v >= 0) break;
        const int e = -v;
        if (e % 2 == 1) {
          out.verdict = Verdict::no;
          out.obstruction = "pole of odd order " + std::to_string(e) + " at " + P.name();
          out.place = P;
          return out;
        }
        Elem y, lead;
        Step st = pole_step(cur, P, e, y, lead);
        if (st == Step::nonsquare) {
          out.verdict = Verdict::no;
          out.obstruction = "pole of even order " + std::to_string(e) + " at " + P.name() +
                            " with non-square leading coefficient " + to_string(lead);
          out.place = P;
          return out;
        }
        if (st == Step::unsupported) {
          if (!undecided) {
            out.obstruction = "even pole at " + P.name() + " with unsupported residue field";
            out.place = P;
          }
          undecided = true;
          break;
        }
        cur = cur + wp(y);
        acc = acc + y;
      }
    }
    if (undecided) break;
  }
  if (undecided) {
    out.verdict = Verdict::undecided;
    return out;
  }
  if (!cur.is_zero() && !A.is_top_constant(cur.w0())) throw Error("internal: pole reduction did not terminate");
  TowerPtr L = truncated(F, F->n() - 1);
  Elem low = cur.is_zero() ? zero(L) : Elem(L, A.drop(cur.w0()));
  WpMembership r = wp_rec(low);
  if (r.verdict == Verdict::yes) r.witness = acc + lift(r.witness, F);
  return r;
}

}  // namespace

WpMembership wp_membership(const Elem& x) {
  const TowerPtr& T = x.tower();
  if (!T->has_ext || x.in_base()) {
    WpMembership r = wp_rec(Elem(base_field(T), x.w0()));
    if (r.verdict == Verdict::yes && T->has_ext) r.witness = lift(r.witness, T);
    if (!T->has_ext || r.verdict != Verdict::no) return r;
    // In K the extra solutions come from alpha: wp(s0 + alpha) = wp(s0) + a.
    Elem shifted = Elem(T->base, T->arith().add(x.w0(), T->ext_a));
    WpMembership r2 = wp_rec(shifted);
    if (r2.verdict == Verdict::yes) {
      r2.witness = lift(r2.witness, T) + alpha(T);
      return r2;
    }
    if (r2.verdict == Verdict::undecided) return r2;
    return r;
  }
  // wp(s0 + alpha s1) = wp(s0) + a s1^2 + alpha wp(s1)
  const Arith& A = T->arith();
  TowerPtr F = T->base;
  WpMembership r1 = wp_rec(Elem(F, x.w1()));
  if (r1.verdict != Verdict::yes) {
    r1.obstruction = "alpha-component: " + r1.obstruction;
    return r1;
  }
  WpMembership res;
  res.verdict = Verdict::no;
  for (int shift = 0; shift < 2; ++shift) {
    Elem s1 = shift ? r1.witness + one(F) : r1.witness;
    Elem target(F, A.add(x.w0(), A.mul(T->ext_a, A.sqr(s1.w0()))));
    WpMembership r0 = wp_rec(target);
    if (r0.verdict == Verdict::yes) {
      r0.witness = Elem(T, r0.witness.w0(), s1.w0());
      return r0;
    }
    if (r0.verdict == Verdict::undecided) {
      res.verdict = Verdict::undecided;
      res.obstruction = r0.obstruction;
      res.place = r0.place;
    } else if (res.verdict == Verdict::no && res.obstruction.empty()) {
      res.obstruction = r0.obstruction;
      res.place = r0.place;
    }
  }
  return res;
}

AsReduction as_reduce_with_witness(const Elem& x, const Place& P) {
  TowerPtr F = P.field;
  Elem cur = lift(to_base(x), F);
  AsReduction out{cur, zero(F)};
  for (;;) {
    if (cur.is_zero()) break;
    const int v = valuation(cur, P);
    if (v >= 0 || (-v) % 2 == 1) break;
    Elem y, lead;
    Step st = pole_step(cur, P, -v, y, lead);
    if (st == Step::unsupported) throw Unsupported("unsupported place " + P.name());
    if (st == Step::nonsquare) break;
    cur = cur + wp(y);
    out.witness = out.witness + y;
  }
  out.value = cur;
  return out;
}

Elem as_reduce(const Elem& x, const Place& P) { return as_reduce_with_witness(x, P).value; }

}  // namespace kmd
