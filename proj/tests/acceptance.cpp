#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "json.hpp"
#include "kmd/brauer.hpp"
#include "kmd/descent.hpp"
#include "kmd/error.hpp"
#include "kmd/residues.hpp"
#include "kmd/script.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace kmd;
using namespace kmd::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool same_form(const QForm& p, const QForm& q) {
  if (p.pairs.size() != q.pairs.size() || p.quasi.size() != q.quasi.size()) return false;
  for (std::size_t i = 0; i < p.pairs.size(); ++i)
    if (p.pairs[i].a != q.pairs[i].a || p.pairs[i].b != q.pairs[i].b) return false;
  for (std::size_t i = 0; i < p.quasi.size(); ++i)
    if (p.quasi[i] != q.quasi[i]) return false;
  return true;
}

bool certified(const QForm& q, const WittOptions& opt = {}) {
  WittResult w = witt_trivial(q, opt);
  return w.verdict == Verdict::yes && verify_chain(q, w.chain);
}

/// The binary form aX^2 + XY + bY^2.
QForm binary(const Elem& a, const Elem& b) {
  if (a.is_zero()) return hyperbolic(a.tower(), 1);
  return make_qform(a.tower(), {QPair{a, a * b}});
}

// Rank of the polar matrix of an upper-triangular form over GF(2^m).
int polar_rank(const FiniteForm& F) {
  using V = GF2m::Value;
  const GF2m& f = *F.f;
  std::vector<std::vector<V>> m(F.dim, std::vector<V>(F.dim, 0));
  for (int i = 0; i < F.dim; ++i)
    for (int j = i + 1; j < F.dim; ++j) m[i][j] = m[j][i] = F.q[i][j];
  int rank = 0;
  for (int c = 0; c < F.dim && rank < F.dim; ++c) {
    int p = rank;
    while (p < F.dim && !m[p][c]) ++p;
    if (p == F.dim) continue;
    std::swap(m[p], m[rank]);
    const V ip = f.inv(m[rank][c]);
    for (int r = 0; r < F.dim; ++r)
      if (r != rank && m[r][c]) {
        const V k = f.mul(m[r][c], ip);
        for (int j = 0; j < F.dim; ++j) m[r][j] ^= f.mul(k, m[rank][j]);
      }
    ++rank;
  }
  return rank;
}

Outcome ac1() {
  long checked = 0, mismatches = 0, chains_bad = 0, singular = 0;
  for (int k : {1, 2, 3}) {
    auto gf = GF2m::get(k);
    const auto order = static_cast<GF2m::Value>(gf->order());
    TowerPtr F = make_field(k, {});
    // Every orthogonal sum of binary forms a[1,b], ordered, dimension <= 6.
    for (int m = 1; m <= 3; ++m) {
      const long per = static_cast<long>((order - 1) * order);
      long total = 1;
      for (int i = 0; i < m; ++i) total *= per;
      for (long idx = 0; idx < total; ++idx) {
        std::vector<std::pair<GF2m::Value, GF2m::Value>> raw;
        std::vector<QPair> pairs;
        long r = idx;
        for (int i = 0; i < m; ++i) {
          const GF2m::Value a = 1 + static_cast<GF2m::Value>((r % per) / order);
          const GF2m::Value b = static_cast<GF2m::Value>((r % per) % order);
          r /= per;
          raw.push_back({a, b});
          pairs.push_back({constant(F, a), constant(F, b)});
        }
        QForm q = make_qform(F, pairs);
        WittResult w = witt_trivial(q);
        ++checked;
        if (w.verdict == Verdict::undecided || (w.verdict == Verdict::yes) != oracle_witt_trivial(finite_pairs(*gf, raw)))
          ++mismatches;
        if (w.verdict == Verdict::yes && !verify_chain(q, w.chain)) ++chains_bad;
      }
    }
    // Every upper-triangular coefficient matrix of dimension 2 and 4 (GF(2)),
    // dimension 2 (GF(4), GF(8)); singular ones are skipped.
    for (int dim : {2, 4}) {
      if (dim == 4 && k > 1) continue;
      const int cells = dim * (dim + 1) / 2;
      long total = 1;
      for (int i = 0; i < cells; ++i) total *= order;
      for (long idx = 0; idx < total; ++idx) {
        FiniteForm ff{gf.get(), dim, std::vector<std::vector<GF2m::Value>>(dim, std::vector<GF2m::Value>(dim, 0))};
        RawQuadratic rq = make_raw(F, dim);
        long r = idx;
        for (int i = 0; i < dim; ++i)
          for (int j = i; j < dim; ++j) {
            ff.q[i][j] = static_cast<GF2m::Value>(r % order);
            rq.q[i][j] = constant(F, ff.q[i][j]);
            r /= order;
          }
        if (polar_rank(ff) < dim) {
          ++singular;
          continue;
        }
        Normalization n = normalize(rq);
        if (!verify_normalization(rq, n) || !n.form.quasi.empty()) {
          ++mismatches;
          continue;
        }
        WittResult w = witt_trivial(n.form);
        ++checked;
        if (w.verdict == Verdict::undecided || (w.verdict == Verdict::yes) != oracle_witt_trivial(ff)) ++mismatches;
        if (w.verdict == Verdict::yes && !verify_chain(n.form, w.chain)) ++chains_bad;
      }
    }
  }
  return {mismatches == 0 && chains_bad == 0,
          fmt("%ld forms over GF(2), GF(4), GF(8); %ld mismatches, %ld bad chains (%ld singular matrices skipped)",
              checked, mismatches, chains_bad, singular)};
}

Outcome ac2() {
  Rng rng(2002);
  TowerPtr F = make_field(2, {"t"});
  int ok = 0, total = 0;
  for (int i = 0; i < 100; ++i) {
    Elem a = random_nonzero_poly(F, rng, 2), b = random_poly(F, rng, 2);
    Elem c = random_nonzero_poly(F, rng, 2), d = random_poly(F, rng, 2);
    QForm lhs = orth_sum(binary(a, b), binary(c, d));
    QForm rhs = orth_sum(binary(a + c, b), binary(c, b + d));
    ++total;
    if (certified(orth_sum(lhs, rhs))) ++ok;
  }
  for (int i = 0; i < 100; ++i) {
    Elem x = random_nonzero_poly(F, rng, 2);
    Elem a = random_nonzero_poly(F, rng, 2), b = random_poly(F, rng, 2);
    ++total;
    if (certified(orth_sum(scale(x, binary(a, b)), binary(x * a, b / x)))) ++ok;
  }
  return {ok == total, fmt("%d/%d Witt equalities certified by verified chains over GF(4)(t)", ok, total)};
}

Outcome ac3() {
  Rng rng(3003);
  int ok = 0, total = 0;
  TowerPtr F1 = make_field(1, {"t"});
  TowerPtr F2 = make_field(2, {"x"});
  TowerPtr K1 = make_ext(F1, "alpha", parse_elem(F1, "(t^3 + t + 1)/t"));
  TowerPtr K2 = make_ext(F2, "alpha", parse_elem(F2, "x"));
  for (const auto& [F, K] : {std::pair{F1, K1}, std::pair{F2, K2}}) {
    for (int i = 0; i < 50; ++i) {
      std::vector<QPair> pairs;
      for (int j = 0; j <= i % 3; ++j) pairs.push_back({random_nonzero(F, rng, 2), random_poly(F, rng, 2)});
      QForm tr = transfer(extend(make_qform(F, pairs), K));
      ++total;
      if (certified(tr)) ++ok;
    }
  }
  return {ok == total, fmt("%d/%d transfers of restricted forms split by verified chains", ok, total)};
}

Outcome ac4() {
  Rng rng(4004);
  int yes = 0, undecided = 0, total = 0;
  TowerPtr F1 = make_field(1, {"t"});
  TowerPtr F2 = make_field(2, {"x"});
  for (const auto& F : {F1, F2}) {
    TowerPtr K = make_ext(F, "alpha", sqr(var(F, 1)));
    for (int i = 0; i < 25; ++i) {
      Elem a = random_nonzero(F, rng, 2);
      Elem b = random_k_elem(K, rng, 1, true);
      QForm phi = pfister({lift(a, K)}, b);
      CohClass diff = e_map(transfer(phi), 1) + class_of(tr_form(e_map(phi, 1).rep));
      ZeroTest z = zero_test(diff);
      ++total;
      if (z.verdict == Verdict::yes) ++yes;
      if (z.verdict == Verdict::undecided) ++undecided;
    }
  }
  return {yes == total && undecided == 0,
          fmt("%d/%d diagrams commute (undecided %d)", yes, total, undecided)};
}

Outcome ac5() {
  int ok = 0, total = 0;
  std::string bad;
  TowerPtr A = make_field(1, {"x", "t"});
  TowerPtr B = make_field(2, {"x", "t"});
  const std::vector<std::tuple<TowerPtr, std::string, std::string>> cases{
      {A, "t^2 + t + x", "t + x + 1"}, {B, "x*t^2 + g*t + x + g", "g*t + x^2 + g"}};
  for (const auto& [L, dt, ut] : cases) {
    const Elem t = var(L, 2), d = parse_elem(L, dt), u = parse_elem(L, ut);
    const Place P = place_at(L, t);
    const TowerPtr R = P.residue;
    const Elem db = reduce(d, P), ub = reduce(u, P);
    const QForm zero_form = make_qform(R, {});
    const QForm one_d = unit_pair(db);
    struct Row {
      const char* name;
      Elem scalar;
      QForm delta, Delta, first;
    };
    const std::vector<Row> rows{{"[1,d]", one(L), zero_form, one_d, one_d},
                                {"pi[1,d]", t, one_d, one_d, zero_form},
                                {"u[1,d]", u, zero_form, scale(ub, one_d), scale(ub, one_d)}};
    for (const auto& row : rows) {
      const QForm q = scale(row.scalar, unit_pair(d));
      const QForm dl = residue_quad(q, P, "delta");
      const QForm Dl = residue_quad(q, P, "Delta");
      const QForm first = tensor(residue_bil(BilForm{L, {row.scalar}}, P, 1), one_d);
      const bool first_ok =
          same_form(first, row.first) && witt_equal(Dl, orth_sum(dl, first)).verdict == Verdict::yes;
      for (auto [label, good] : {std::pair{"delta", same_form(dl, row.delta)}, std::pair{"Delta", same_form(Dl, row.Delta)},
                                 std::pair{"d1", first_ok}}) {
        ++total;
        if (good)
          ++ok;
        else
          bad += std::string(" ") + label + " " + row.name + " over " + describe(L) + ";";
      }
    }
  }
  return {ok == total, fmt("%d/%d exact matches (nine cases on two towers)%s", ok, total, bad.c_str())};
}

Outcome ac6() {
  Rng rng(6006);
  int ok = 0, total = 0, differ = 0;
  TowerPtr A = make_field(2, {"t"});
  TowerPtr B = make_field(1, {"x", "t"});
  for (int i = 0; i < 100; ++i) {
    const TowerPtr& L = i % 2 ? B : A;
    const Elem t = var(L, L->n());
    const Elem c0 = L->n() == 2 ? var(L, 1) : constant(L, 2);
    const Elem centers[] = {zero(L), one(L), c0};
    const Place P = place_at(L, t + centers[i % 3]);
    Elem u;
    do u = random_nonzero_poly(L, rng, 1);
    while (reduce(u, P).is_zero());
    QForm phi = make_qform(L, {});
    for (int j = 0; j < 2; ++j)
      phi = orth_sum(phi, scale(random_nonzero(L, rng, 1), pfister({random_nonzero(L, rng, 1)}, random_poly(L, rng, 1))));
    const QForm d1 = residue_quad(phi, P, "delta");
    const QForm d2 = residue_quad(phi, P, "delta", u * uniformizer(P));
    if (!same_form(d1, d2)) ++differ;
    ++total;
    if (wp_membership(arf(d1) + arf(d2)).verdict == Verdict::yes) ++ok;
  }
  return {ok == total, fmt("%d/%d equal Arf for pi and u*pi (%d outputs differ as forms)", ok, total, differ)};
}

Outcome ac7() {
  Rng rng(7007);
  int descends = 0, certs = 0, rebuilt = 0, total = 0;
  TowerPtr F1 = make_field(1, {"t"});
  TowerPtr F2 = make_field(2, {"x"});
  const std::vector<std::pair<TowerPtr, std::string>> towers{
      {F1, "t^2"}, {F1, "(t + 1)^2/t^2"}, {F2, "x^2"}, {F2, "g*x^2 + g"}};
  for (int i = 0; i < 25; ++i) {
    const auto& [F, as] = towers[i % towers.size()];
    TowerPtr K = make_ext(F, "alpha", parse_elem(F, as));
    BiquatAlg B0{{random_poly(F, rng, 1), random_nonzero_poly(F, rng, 1)},
                 {random_poly(F, rng, 1), random_nonzero_poly(F, rng, 1)}};
    BiquatAlg B = extend(B0, K);
    DescentReport r = delta_decide(B);
    ++total;
    if (r.verdict != DescentVerdict::descends || !r.certificate) continue;
    ++descends;
    const QForm tq = transfer(scale(*r.certificate, r.phi));
    if (r.certificate_check && verify_chain(tq, r.certificate_check->chain)) ++certs;
    if (r.reconstructed) {
      const auto& rc = *r.reconstructed;
      const bool split = certified(orth_sum(extend(rc.phi0, K), scale(rc.lambda, r.phi)));
      const bool algebra = zero_test(clifford(extend(rc.phi0, K)) + biquat_class(B)).verdict == Verdict::yes;
      if (split && algebra && rc.phi0.dim() == 6) ++rebuilt;
    }
  }
  return {descends == total && certs == total && rebuilt >= 20,
          fmt("descends %d/%d, certificates verified %d/%d, reconstructed %d/%d (need >= 20)", descends, total, certs,
              total, rebuilt, total)};
}

Outcome ac8() {
  Rng rng(8008);
  int ok = 0, total = 0;
  TowerPtr F1 = make_field(1, {"t"});
  TowerPtr F2 = make_field(2, {"x"});
  TowerPtr F3 = make_field(1, {"x", "t"});
  TowerPtr K = make_ext(F1, "alpha", sqr(var(F1, 1)));
  for (int i = 0; i < 200; ++i) {
    const TowerPtr towers[] = {F1, F2, F3, K};
    const TowerPtr& T = towers[i % 4];
    auto pick = [&](bool nonzero) {
      if (T->has_ext) return nonzero ? random_k_nonzero(T, rng, 1, true) : random_k_elem(T, rng, 1, true);
      return nonzero ? random_nonzero(T, rng, 1) : random_elem(T, rng, 1);
    };
    BiquatAlg B{{pick(false), pick(true)}, {pick(false), pick(true)}};
    ++total;
    try {
      QForm phi = albert_form(B);
      const bool arf0 = arf(phi).is_zero();
      const bool cl = zero_test(class_of(clifford_form(phi)) + biquat_class(B)).verdict == Verdict::yes;
      if (phi.dim() == 6 && arf0 && cl) ++ok;
    } catch (const Error&) {
    }
  }
  return {ok == total, fmt("%d/%d Albert forms pass the Arf and Clifford checks", ok, total)};
}

Outcome ac9() {
  Rng rng(9009);
  int yes = 0, no = 0, undecided = 0, unsupported = 0, norm_ok = 0, w_ok = 0, cases_i = 0, cases_ii = 0;
  std::string places;
  for (int i = 0; i < 20; ++i) {
    TowerPtr L = make_field(i % 4 < 2 ? 1 : 2, {"x", "t"});
    TowerPtr F = truncated(L, 1);
    const Elem x = var(F, 1), t = var(L, 2);
    const Elem a = i % 2 ? x : x * x * x + x;
    auto lin = [&](const Elem& r) { return t + lift(r, L); };
    InjectionReport r;
    if (i < 10) {
      // Case (i): f(0) a norm from F(wp^-1 a), w = c ^ df(0)/f(0).
      Elem N;
      do {
        const Elem p = random_nonzero_poly(F, rng, 1), q = random_poly(F, rng, 1);
        N = p * p + p * q + a * q * q;
      } while (N.is_one() || N.is_zero());
      const Elem f = lin(one(F)) * lin(N);
      const Elem f0 = reduce(f, place_at(L, t));
      const CohClass c = class_of_symbols(F, 1, {Symbol{random_poly(F, rng, 1), {random_nonzero_poly(F, rng, 1)}}});
      r = injection_instance(wedge_dlog({f0}, c), c, a, f);
      ++cases_i;
      if (r.norm_condition && r.norm_condition->verdict == Verdict::yes) ++norm_ok;
    } else {
      // Case (ii): f = t g with g(0) = g0, c = a dlog g0, w = 0.
      Elem r1;
      do r1 = random_nonzero_poly(F, rng, 1);
      while (r1.is_one());
      const Elem f = t * lin(r1) * lin(r1 + one(F));
      const Elem g0 = reduce(f / t, place_at(L, t));
      const CohClass c = class_of_symbols(F, 1, {Symbol{a, {g0}}});
      r = injection_instance(class_of(form_zero(F, 2)), c, a, f);
      ++cases_ii;
      if (r.w_condition && r.w_condition->verdict == Verdict::yes) ++w_ok;
    }
    unsupported += r.unsupported;
    for (const auto& p : r.places)
      if (!p.supported) places += " " + p.place;
    if (r.verdict == Verdict::yes) ++yes;
    if (r.verdict == Verdict::no) ++no;
    if (r.verdict == Verdict::undecided) ++undecided;
  }
  const int n = cases_i + cases_ii;
  return {n == 20 && no == 0 && unsupported == 0 && norm_ok == cases_i && w_ok == cases_ii,
          fmt("%d triples (case i %d, case ii %d): reproduced %d, contradicted %d, undecided %d; norm condition %d/%d, "
              "w = 0 %d/%d; unsupported places %d%s",
              n, cases_i, cases_ii, yes, no, undecided, norm_ok, cases_i, w_ok, cases_ii, unsupported, places.c_str())};
}

Outcome ac10() {
  std::ifstream in(std::filesystem::path(KMD_SOURCE_DIR) / "scenarios" / "anisotropic.kmd");
  std::ostringstream ss;
  ss << in.rdbuf();
  script::Flags flags;
  flags.oracle = true;
  script::RunOutput out = script::run(ss.str(), flags);
  auto r = nlohmann::json::parse(out.json);
  for (const auto& s : r["statements"]) {
    if (s.value("query", "") != "witt_trivial" || !s.contains("result")) continue;
    const auto& res = s["result"];
    const auto& o = res["oracle"];
    const bool pass = out.errors == 0 && res["verdict"] == "no" && res["method"] == "residue" &&
                      o["status"] == "no_isotropy_in_bound" && o["degree"].get<int>() >= 4;
    return {pass, fmt("witt_trivial %s by %s at %s; oracle %s at degree %d", res["verdict"].get<std::string>().c_str(),
                      res["method"].get<std::string>().c_str(), res.value("place", "-").c_str(),
                      o["status"].get<std::string>().c_str(), o.value("degree", -1))};
  }
  return {false, "scenario has no witt_trivial statement"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::tuple<const char*, std::function<Outcome()>, double>> criteria{
      {"AC1", ac1, 60}, {"AC2", ac2, 120}, {"AC3", ac3, 0},   {"AC4", ac4, 0},  {"AC5", ac5, 0},
      {"AC6", ac6, 0},  {"AC7", ac7, 600}, {"AC8", ac8, 0},   {"AC9", ac9, 0},  {"AC10", ac10, 300}};
  std::string only = argc > 1 ? argv[1] : "";
  int failed = 0;
  for (const auto& [name, fn, limit] : criteria) {
    if (!only.empty() && only != name) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit > 0 && secs > limit) {
      o.pass = false;
      o.detail += fmt("; exceeded the %.0f s limit", limit);
    }
    std::printf("%s %s (%.1f s): %s\n", name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
