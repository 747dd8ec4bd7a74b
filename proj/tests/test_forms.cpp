#include "doctest.h"
#include "kmd/error.hpp"
#include "kmd/forms.hpp"
#include "kmd/kato.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace kmd;
using namespace kmd::testing;

namespace {

RawQuadratic random_raw(const TowerPtr& F, Rng& rng, int dim, int deg) {
  RawQuadratic r = make_raw(F, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      if (rng() % 3) r.q[i][j] = random_poly(F, rng, deg);
  return r;
}

}  // namespace

TEST_CASE("normalize replays exactly") {
  Rng rng(21);
  for (auto spec : {std::pair{1, 0}, std::pair{2, 1}}) {
    std::vector<std::string> vars;
    if (spec.second) vars.push_back("t");
    TowerPtr F = make_field(spec.first, vars);
    for (int trial = 0; trial < 60; ++trial) {
      RawQuadratic r = random_raw(F, rng, 2 + trial % 5, 2);
      Normalization n = normalize(r);
      CHECK(verify_normalization(r, n));
    }
  }
}

TEST_CASE("normalize canonical shapes") {
  TowerPtr F = make_field(1, {"t"});
  RawQuadratic r = make_raw(F, 2);
  r.q[0][1] = one(F);
  Normalization n = normalize(r);
  REQUIRE(n.form.pairs.size() == 1);
  CHECK(n.form.pairs[0].a.is_one());
  CHECK(n.form.pairs[0].b.is_zero());
  // X^2 + Y^2 + tZ^2: quasilinear, no isotropic radical vector.
  RawQuadratic s = make_raw(F, 3);
  s.q[0][0] = one(F);
  s.q[1][1] = one(F);
  s.q[2][2] = var(F, 1);
  Normalization m = normalize(s);
  CHECK(m.degenerate);
  CHECK(m.form.quasi.size() == 2);
  CHECK(verify_normalization(s, m));
}

TEST_CASE("witt_trivial on small examples") {
  TowerPtr F2 = make_field(1, {});
  CHECK(witt_trivial(hyperbolic(F2, 2)).verdict == Verdict::yes);
  auto r = witt_trivial(unit_pair(one(F2)));
  CHECK(r.verdict == Verdict::no);
  CHECK(r.method == "arf");
  QForm two = orth_sum(unit_pair(one(F2)), unit_pair(one(F2)));
  r = witt_trivial(two);
  REQUIRE(r.verdict == Verdict::yes);
  CHECK(verify_chain(two, r.chain));

  TowerPtr F = make_field(1, {"t"});
  Elem t = var(F, 1);
  r = witt_trivial(pfister({t}, one(F)));
  CHECK(r.verdict == Verdict::no);
  CHECK(r.method == "local_invariant");
  QForm p = orth_sum(scale(t, unit_pair(t)), scale(t + one(F), unit_pair(t)));
  CHECK(witt_trivial(orth_sum(p, p)).verdict == Verdict::yes);
}

TEST_CASE("witt_trivial agrees with exhaustive splitting over GF(4)") {
  auto gf = GF2m::get(2);
  TowerPtr F = make_field(2, {});
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 1 + trial % 3;
    std::vector<std::pair<GF2m::Value, GF2m::Value>> raw;
    std::vector<QPair> pairs;
    for (int i = 0; i < m; ++i) {
      GF2m::Value a = 1 + rng() % 3, b = rng() % 4;
      raw.push_back({a, b});
      pairs.push_back({constant(F, a), constant(F, b)});
    }
    QForm q = make_qform(F, pairs);
    auto w = witt_trivial(q);
    REQUIRE(w.verdict != Verdict::undecided);
    CHECK((w.verdict == Verdict::yes) == oracle_witt_trivial(finite_pairs(*gf, raw)));
    if (w.verdict == Verdict::yes) CHECK(verify_chain(q, w.chain));
  }
}

TEST_CASE("isotropy search") {
  TowerPtr F = make_field(1, {"t"});
  Elem t = var(F, 1);
  QForm q = orth_sum(unit_pair(t), unit_pair(t));
  auto v = isotropy_search(q, 0);
  REQUIRE(v.has_value());
  CHECK(qform_value(q, *v).is_zero());
  CHECK_FALSE(isotropy_search(pfister({t}, one(F)), 2).has_value());
  CHECK_THROWS_AS(isotropy_search(hyperbolic(F, 4), 6, IsotropyOptions{1, 1000}), Error);
}

TEST_CASE("transfer of a base-field form is Witt-trivial") {
  Rng rng(17);
  TowerPtr F = make_field(1, {"t"});
  TowerPtr K = make_ext(F, "alpha", parse_elem(F, "t^3 + t + 1") / parse_elem(F, "t"));
  for (int trial = 0; trial < 10; ++trial) {
    QForm psi = make_qform(F, {{random_nonzero_poly(F, rng, 2), random_poly(F, rng, 2)},
                               {random_nonzero_poly(F, rng, 2), random_poly(F, rng, 2)}});
    QForm tr = transfer(extend(psi, K));
    auto w = witt_trivial(tr);
    REQUIRE(w.verdict == Verdict::yes);
    CHECK(w.method == "chain");
  }
}

TEST_CASE("pfister and represents") {
  TowerPtr F = make_field(1, {"t"});
  Elem t = var(F, 1);
  QForm pf = pfister({}, t);
  auto r = represents(pf, t);
  CHECK(r.verdict == Verdict::yes);
  REQUIRE(r.norm_preimage.has_value());
  CHECK(to_base(norm(*r.norm_preimage)) == t);
  CHECK(represents(pf, t + one(F)).verdict == Verdict::no);
  CHECK_THROWS_AS(represents(orth_sum(pf, pf), t), Error);
  QForm p2 = pfister({t, t + one(F)}, one(F));
  CHECK(p2.dim() == 8);
  CHECK(is_pfister(p2));
}

TEST_CASE("level-2 residue certificate over two variables") {
  TowerPtr F = make_field(1, {"x", "t"});
  QForm q = pfister({var(F, 2)}, var(F, 1));
  auto w = witt_trivial(q);
  CHECK(w.verdict == Verdict::no);
  CHECK(w.method == "residue");
}
