#include "doctest.h"
#include "kmd/error.hpp"
#include "kmd/fields.hpp"
#include "support.hpp"

using namespace kmd;
using namespace kmd::testing;

namespace {

Poly prod(const Arith& A, const Factorization& f, int cl) {
  Poly p{f.unit};
  for (const auto& [q, e] : f.factors)
    for (int i = 0; i < e; ++i) p = A.pmul(p, q, cl);
  return p;
}

}  // namespace

TEST_CASE("factor_univariate small cases") {
  TowerPtr F2 = make_field(1, {});
  const Arith& A = F2->arith();
  auto c = [&](int v) { return A.constant(v, 0); };
  auto f = factor_univariate(UPoly{F2, {c(0), c(1), c(1)}});
  REQUIRE(f.factors.size() == 2);
  CHECK(A.pequal(f.factors[0].first, Poly{c(0), c(1)}));
  CHECK(A.pequal(f.factors[1].first, Poly{c(1), c(1)}));
  CHECK(is_irreducible(UPoly{F2, {c(1), c(1), c(1)}}));
  CHECK_THROWS_WITH_AS(factor_univariate(UPoly{F2, {}}), "zero input", Error);
}

TEST_CASE("factor_univariate recovers products of irreducibles over GF(4)") {
  TowerPtr F4 = make_field(2, {});
  const Arith& A = F4->arith();
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Poly> parts;
    while (parts.size() < 3) {
      Poly p;
      int d = 1 + rng() % 3;
      for (int i = 0; i < d; ++i) p.push_back(A.constant(rng() % 4, 0));
      p.push_back(A.one(0));
      if (is_irreducible(UPoly{F4, p})) parts.push_back(p);
    }
    Poly q{A.one(0)};
    for (auto& p : parts) q = A.pmul(q, p, 0);
    auto f = factor_univariate(UPoly{F4, q});
    int total = 0;
    for (auto& [g, e] : f.factors) {
      total += e;
      int expected = 0;
      for (auto& p : parts) expected += A.pequal(p, g);
      CHECK(expected == e);
    }
    CHECK(total == 3);
  }
}

TEST_CASE("factor_univariate round trip") {
  Rng rng(5);
  for (int k : {1, 2, 3}) {
    TowerPtr F = make_field(k, {});
    const Arith& A = F->arith();
    for (int trial = 0; trial < 170; ++trial) {
      Poly p;
      int d = rng() % 9;
      for (int i = 0; i <= d; ++i) p.push_back(A.constant(rng() % A.gf().order(), 0));
      while (!p.empty() && p.back().is_zero()) p.pop_back();
      if (p.empty()) continue;
      auto f = factor_univariate(UPoly{F, p});
      CHECK(A.pequal(prod(A, f, 0), p));
      for (auto& [g, e] : f.factors) CHECK(is_irreducible(UPoly{F, g}));
    }
  }
}

TEST_CASE("factor_univariate over a rational function field") {
  TowerPtr Fx = make_field(1, {"x"});
  TowerPtr F = make_field(1, {"x", "t"});
  const Arith& A = F->arith();
  // (t + x)(t^2 + t + 1)(t^2 + x)
  Elem t = var(F, 2), x = var(F, 1);
  Elem p = (t + x) * (t * t + t + one(F)) * (t * t + x) * x;
  auto f = factor_univariate(UPoly{Fx, p.w0().num()});
  CHECK(f.factors.size() == 3);
  CHECK(A.pequal(prod(A, f, 1), p.w0().num()));
}

TEST_CASE("wp examples") {
  TowerPtr F = make_field(1, {"t"});
  CHECK(wp(zero(F)).is_zero());
  CHECK(wp(var(F, 1)) == parse_elem(F, "t^2 + t"));
  TowerPtr K = make_ext(F, "alpha", parse_elem(F, "t"));
  CHECK(wp(alpha(K)) == lift(parse_elem(F, "t"), K));
}

TEST_CASE("wp_membership examples") {
  Rng rng(9);
  TowerPtr F4t = make_field(2, {"t"});
  for (int i = 0; i < 30; ++i) {
    Elem f = random_poly(F4t, rng, 3);
    auto r = wp_membership(wp(f));
    REQUIRE(r.verdict == Verdict::yes);
    CHECK(wp(r.witness) == wp(f));
  }
  for (int i = 0; i < 30; ++i) {
    Elem f = random_elem(F4t, rng, 2);
    auto r = wp_membership(wp(f));
    REQUIRE(r.verdict == Verdict::yes);
    CHECK(wp(r.witness) == wp(f));
  }
  TowerPtr F2 = make_field(1, {});
  CHECK(wp_membership(one(F2)).verdict == Verdict::no);
  TowerPtr F2t = make_field(1, {"t"});
  auto r = wp_membership(var(F2t, 1));
  CHECK(r.verdict == Verdict::no);
  REQUIRE(r.place.has_value());
  CHECK(r.place->infinite);
  // No polynomial f of degree <= 6 has wp(f) = t.
  for (unsigned bits = 0; bits < 128; ++bits) {
    Elem f = zero(F2t);
    for (int i = 0; i < 7; ++i)
      if ((bits >> i) & 1) f = f + pow(var(F2t, 1), i);
    CHECK(wp(f) != var(F2t, 1));
  }
}

TEST_CASE("wp_membership over two variables") {
  TowerPtr F = make_field(1, {"x", "t"});
  CHECK(wp_membership(parse_elem(F, "x")).verdict == Verdict::no);
  CHECK(wp_membership(parse_elem(F, "x/t^2")).verdict == Verdict::no);
  auto r = wp_membership(parse_elem(F, "x^2/t^2 + x/t + 1/(t+x)^2 + 1/(t+x)"));
  CHECK(r.verdict == Verdict::yes);
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    Elem f = random_elem(F, rng, 1);
    auto m = wp_membership(wp(f));
    if (m.verdict == Verdict::yes) CHECK(wp(m.witness) == wp(f));
    CHECK(m.verdict != Verdict::no);
  }
}

TEST_CASE("as_reduce examples and property") {
  TowerPtr F = make_field(1, {"t"});
  Place P = place_at(F, var(F, 1));
  CHECK(as_reduce(parse_elem(F, "t^-2"), P) == parse_elem(F, "1/t"));
  CHECK(as_reduce(parse_elem(F, "t^2+1"), P) == parse_elem(F, "t^2+1"));
  auto r = as_reduce_with_witness(parse_elem(F, "t^-4"), P);
  CHECK(r.value == parse_elem(F, "1/t"));
  CHECK(parse_elem(F, "t^-4") + r.value == wp(r.witness));
  Rng rng(12);
  TowerPtr F4 = make_field(2, {"t"});
  for (int i = 0; i < 40; ++i) {
    Elem x = random_nonzero(F4, rng, 3);
    for (const auto& Q : poles(x)) {
      Elem y = as_reduce(x, Q);
      CHECK(wp_membership(x - y).verdict == Verdict::yes);
      int v = y.is_zero() ? 0 : valuation(y, Q);
      CHECK((v >= 0 || (-v) % 2 == 1));
    }
  }
}

TEST_CASE("trace and norm") {
  TowerPtr F = make_field(1, {"t"});
  TowerPtr K = make_ext(F, "alpha", parse_elem(F, "t"));
  CHECK(trace(one(K)).is_zero());
  CHECK(trace(alpha(K)).is_one());
  CHECK(norm(alpha(K)) == parse_elem(F, "t"));
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    Elem x = random_k_elem(K, rng, 2), y = random_k_elem(K, rng, 2);
    CHECK(norm(x * y) == norm(x) * norm(y));
    Elem c = random_elem(F, rng, 2);
    CHECK(trace(lift(c, K) * x + y) == c * trace(x) + trace(y));
    CHECK(trace(lift(c, K)).is_zero());
    CHECK(norm(lift(c, K)) == c * c);
    if (!x.is_zero()) CHECK((x * inv(x)).is_one());
  }
}

TEST_CASE("field element properties") {
  Rng rng(2);
  TowerPtr F = make_field(2, {"x", "t"});
  for (int i = 0; i < 500; ++i) {
    Elem x = random_elem(F, rng, 1), y = random_elem(F, rng, 1);
    CHECK(wp(x + y) == wp(x) + wp(y));
    if (i < 100) {
      Elem z = random_elem(F, rng, 1);
      CHECK(to_string((x + y) + z) == to_string(x + (y + z)));
    }
  }
}

TEST_CASE("constant_extend") {
  TowerPtr F = make_field(1, {"t"});
  auto same = constant_extend(F, 1);
  CHECK(same.tower == F);
  auto e3 = constant_extend(F, 3);
  CHECK(e3.tower->k == 3);
  CHECK(e3.embed(var(F, 1)) == var(e3.tower, 1));
  Elem x = parse_elem(F, "(t^3+t+1)/(t^2+1)");
  CHECK(to_string(e3.embed(x)) == to_string(x));
  TowerPtr F4 = make_field(2, {"t"});
  auto e = constant_extend(F4, 3);
  Elem g = constant(F4, 2);
  CHECK(e.embed(g) * e.embed(g) + e.embed(g) + one(e.tower) == zero(e.tower));
}

TEST_CASE("places and residues") {
  TowerPtr F = make_field(1, {"x", "t"});
  Place P = place_at(F, parse_elem(F, "t + x"));
  CHECK(P.kind == ResidueKind::rational);
  CHECK(to_string(reduce(parse_elem(F, "(t^2+1)/(x+1)"), P)) == "x + 1");
  CHECK(valuation(parse_elem(F, "(t+x)^3/(t+1)"), P) == 3);
  Place Q = place_at(F, parse_elem(F, "t^2 + t + 1"));
  CHECK(Q.kind == ResidueKind::constant_extension);
  CHECK(Q.residue->k == 2);
  Elem r = reduce(parse_elem(F, "t"), Q);
  CHECK(wp(r) == one(Q.residue));
  Place I = place_infinity(F);
  CHECK(valuation(parse_elem(F, "x*t^2/(t+1)"), I) == -1);
  CHECK(reduce(parse_elem(F, "x*t/(t+1)"), I) == var(I.residue, 1));
  CHECK_THROWS_AS(place_at(F, parse_elem(F, "t^2 + x^2")), Error);
  Place U = place_at(F, parse_elem(F, "t^2 + t + x"));
  CHECK(U.kind == ResidueKind::unsupported);
  CHECK_THROWS_AS(reduce(parse_elem(F, "t"), U), Unsupported);
}

TEST_CASE("element parser diagnostics") {
  TowerPtr F = make_field(2, {"t"});
  CHECK(parse_elem(F, "g^2 + g") == one(F));
  CHECK(parse_elem(F, "12") == zero(F));
  CHECK(parse_elem(F, "3*t") == var(F, 1));
  try {
    parse_elem(F, "t + (y");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.column() == 6);
  }
  CHECK_THROWS_AS(parse_elem(F, "t/0"), ParseError);
  CHECK_THROWS_AS(parse_elem(F, "t +"), ParseError);
}
