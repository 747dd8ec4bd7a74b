#include <algorithm>

#include "kmd/error.hpp"
#include "kmd/forms.hpp"
#include "kmd/kato.hpp"
#include "kmd/residues.hpp"

namespace kmd {

namespace {

Vec axpy(const Vec& v, const Elem& c, const Vec& w) {
  if (c.is_zero()) return v;
  Vec r = v;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!w[i].is_zero()) r[i] = r[i] + c * w[i];
  return r;
}

Vec scaled(const Elem& c, const Vec& v) {
  Vec r = v;
  for (auto& x : r) x = c * x;
  return r;
}

bool vec_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](const Elem& x) { return x.is_zero(); });
}

// Greedy symplectic splitting. Working planes (e, f) have b(e, f) = 1 and are
// mutually orthogonal; split planes are collected in `chain`.
class Engine {
 public:
  Engine(const QForm& q, const WittOptions& opt) : q_(q), opt_(opt) {
    const TowerPtr& F = q.field;
    for (std::size_t i = 0; i < q.pairs.size(); ++i) {
      Plane p;
      p.e = Vec(q.dim(), zero(F));
      p.f = p.e;
      p.e[2 * i] = one(F);
      p.f[2 * i + 1] = inv(q.pairs[i].a);
      p.A = q.pairs[i].a;
      p.B = q.pairs[i].b / q.pairs[i].a;
      work_.push_back(p);
    }
  }

  bool run() {
    while (!work_.empty())
      if (!step()) return false;
    return true;
  }

  const std::vector<HyperbolicPair>& chain() const { return chain_; }
  std::vector<std::string> notes;

 private:
  struct Plane {
    Vec e, f;
    Elem A, B;
  };

  Elem Q(const Vec& v) const { return qform_value(q_, v); }
  Elem b(const Vec& v, const Vec& w) const { return qform_polar(q_, v, w); }

  // Symplectic Gram-Schmidt on a spanning set of a nonsingular subspace.
  void rebuild(std::vector<Vec> vs) {
    work_.clear();
    std::vector<bool> used(vs.size(), false);
    for (;;) {
      int u = -1, p = -1;
      for (std::size_t i = 0; i < vs.size() && u < 0; ++i) {
        if (used[i] || vec_zero(vs[i])) continue;
        for (std::size_t j = 0; j < vs.size(); ++j)
          if (!used[j] && j != i && !b(vs[i], vs[j]).is_zero()) {
            u = static_cast<int>(i);
            p = static_cast<int>(j);
            break;
          }
      }
      if (u < 0) break;
      vs[p] = scaled(inv(b(vs[u], vs[p])), vs[p]);
      for (std::size_t k = 0; k < vs.size(); ++k) {
        if (used[k] || static_cast<int>(k) == u || static_cast<int>(k) == p) continue;
        Vec z = axpy(vs[k], b(vs[k], vs[p]), vs[u]);
        vs[k] = axpy(z, b(vs[k], vs[u]), vs[p]);
      }
      used[u] = used[p] = true;
      work_.push_back({vs[u], vs[p], Q(vs[u]), Q(vs[p])});
    }
    for (std::size_t i = 0; i < vs.size(); ++i)
      if (!used[i] && !vec_zero(vs[i])) throw Error("internal: singular complement while splitting");
  }

  void split(const Vec& u) {
    const Vec* z = nullptr;
    Elem c;
    for (const auto& p : work_) {
      for (const Vec* cand : {&p.e, &p.f}) {
        c = b(u, *cand);
        if (!c.is_zero()) {
          z = cand;
          break;
        }
      }
      if (z) break;
    }
    if (!z) throw Error("internal: isotropic vector without partner");
    Vec w = scaled(inv(c), *z);
    w = axpy(w, Q(w), u);
    chain_.push_back({u, w});
    std::vector<Vec> vs;
    for (const auto& p : work_)
      for (const Vec* v : {&p.e, &p.f}) {
        Vec t = axpy(*v, b(*v, w), u);
        vs.push_back(axpy(t, b(*v, u), w));
      }
    rebuild(std::move(vs));
  }

  bool step() {
    for (const auto& p : work_) {
      if (p.A.is_zero()) return split(p.e), true;
      if (p.B.is_zero()) return split(p.f), true;
    }
    for (const auto& p : work_) {
      auto m = wp_membership(p.A * p.B);
      if (m.verdict == Verdict::yes) {
        Vec u = axpy(p.f, m.witness / p.A, p.e);
        notes.push_back("plane split by Artin-Schreier witness");
        return split(u), true;
      }
    }
    for (std::size_t i = 0; i < work_.size(); ++i)
      for (std::size_t j = i + 1; j < work_.size(); ++j) {
        const Plane &P = work_[i], &R = work_[j];
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < 2; ++t) {
            const Vec& x = s ? P.f : P.e;
            const Vec& y = t ? R.f : R.e;
            const Elem& qx = s ? P.B : P.A;
            const Elem& qy = t ? R.B : R.A;
            if (auto r = sqrt_if_square(qx / qy)) {
              notes.push_back("square-class match between planes");
              return split(axpy(x, *r, y)), true;
            }
          }
      }
    return search();
  }

  // Bounded isotropy search in the coordinates of the working planes.
  bool search() {
    const TowerPtr& F = q_.field;
    QForm wq = make_qform(F, {});
    for (const auto& p : work_) wq.pairs.push_back({p.A, p.A * p.B});
    for (int deg = 0; deg <= opt_.search_degree; ++deg) {
      std::optional<Vec> v;
      try {
        v = isotropy_search(wq, deg, IsotropyOptions{opt_.lower_degree, opt_.budget});
      } catch (const Error& e) {
        notes.push_back(std::string("search stopped: ") + e.what());
        return false;
      }
      if (!v) continue;
      Vec u(q_.dim(), zero(F));
      for (std::size_t k = 0; k < work_.size(); ++k) {
        u = axpy(u, (*v)[2 * k], work_[k].e);
        u = axpy(u, (*v)[2 * k + 1] * work_[k].A, work_[k].f);
      }
      notes.push_back("isotropic vector found by search at degree " + std::to_string(deg));
      split(u);
      return true;
    }
    notes.push_back("no isotropic vector up to degree " + std::to_string(opt_.search_degree));
    return false;
  }

  const QForm& q_;
  WittOptions opt_;
  std::vector<Plane> work_;
  std::vector<HyperbolicPair> chain_;
};

std::vector<Place> candidate_places(const QForm& q, std::vector<std::string>& notes) {
  std::vector<Place> out;
  auto add = [&](const Place& P) {
    for (const auto& Q : out)
      if (same_place(P, Q)) return;
    out.push_back(P);
  };
  for (const auto& p : q.pairs) {
    try {
      for (const auto& P : support(p.a)) add(P);
      if (!p.b.is_zero())
        for (const auto& P : poles(p.b)) add(P);
    } catch (const Unsupported& e) {
      notes.push_back(std::string("places skipped: ") + e.what());
    }
  }
  add(place_infinity(q.field));
  return out;
}

// Residue obstruction at a supported place, if any.
bool residue_obstruction(const QForm& q, const WittOptions& opt, WittResult& res) {
  for (const auto& P : candidate_places(q, res.diagnostics)) {
    if (!P.supported()) {
      res.diagnostics.push_back("place " + P.name() + " has an unsupported residue field");
      continue;
    }
    QForm r;
    try {
      r = residue_ready(q, P);
    } catch (const Error&) {
      res.diagnostics.push_back("not residue-ready at " + P.name());
      continue;
    }
    for (int which = 0; which < 2; ++which) {
      QForm rf = which == 0 ? residue_delta(r, P) : residue_Delta(r, P);
      if (rf.dim() == 0) continue;
      WittOptions sub = opt;
      sub.use_residues = false;
      WittResult w = witt_trivial(rf, sub);
      if (w.verdict == Verdict::no) {
        res.verdict = Verdict::no;
        res.method = "residue";
        res.place = P;
        res.residue = rf;
        res.obstruction = std::string(which == 0 ? "delta" : "Delta") + " residue at " + P.name() +
                          " is not Witt-trivial (" + w.method + ": " + w.obstruction + ")";
        return true;
      }
    }
  }
  return false;
}

}  // namespace

bool verify_chain(const QForm& q, const std::vector<HyperbolicPair>& chain) {
  if (!q.quasi.empty() || 2 * chain.size() != q.pairs.size() * 2) return false;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (!qform_value(q, chain[i].e).is_zero() || !qform_value(q, chain[i].f).is_zero()) return false;
    for (std::size_t j = 0; j < chain.size(); ++j) {
      Elem ef = qform_polar(q, chain[i].e, chain[j].f);
      if (i == j ? !ef.is_one() : !ef.is_zero()) return false;
      if (j > i) {
        if (!qform_polar(q, chain[i].e, chain[j].e).is_zero()) return false;
        if (!qform_polar(q, chain[i].f, chain[j].f).is_zero()) return false;
      }
    }
  }
  return true;
}

WittResult witt_trivial(const QForm& q, const WittOptions& opt) {
  if (!q.quasi.empty()) throw Error("witt_trivial needs a nonsingular form (quasilinear part present)");
  WittResult res;
  if (q.dim() == 0) {
    res.verdict = Verdict::yes;
    res.method = "chain";
    return res;
  }
  const TowerPtr& F = q.field;
  const int n = F->n();
  const bool ext = F->has_ext;

  auto m = wp_membership(arf(q));
  if (m.verdict == Verdict::no) {
    res.verdict = Verdict::no;
    res.method = "arf";
    res.obstruction = "Arf invariant " + to_string(arf(q)) + " is not in wp(F): " + m.obstruction;
    res.place = m.place;
    return res;
  }
  if (m.verdict == Verdict::undecided) res.diagnostics.push_back("Arf class undecided: " + m.obstruction);

  bool invariants_trivial = !ext && n == 0 && m.verdict == Verdict::yes;
  if (!ext && n == 1 && m.verdict == Verdict::yes) {
    DiffForm c = clifford_form(q);
    Elem coeff = c.coeffs.count(1u) ? c.coeffs.at(1u) : zero(F);
    ZeroTest z = h2_local_test(coeff);
    if (z.verdict == Verdict::no) {
      res.verdict = Verdict::no;
      res.method = "local_invariant";
      res.place = z.place;
      res.obstruction = "Clifford invariant is nonzero: " + z.obstruction;
      return res;
    }
    invariants_trivial = z.verdict == Verdict::yes;
  }
  if (!ext && n >= 2 && opt.use_residues && residue_obstruction(q, opt, res)) return res;

  // Known-trivial invariants: a deeper search is bound to succeed eventually.
  const int extra = invariants_trivial ? 2 : 0;
  for (int more = 0; more <= extra; ++more) {
    WittOptions o = opt;
    o.search_degree += more;
    Engine eng(q, o);
    bool ok = false;
    try {
      ok = eng.run();
    } catch (const Unsupported& e) {
      res.diagnostics.push_back(std::string("splitting stopped: ") + e.what());
    }
    res.diagnostics.insert(res.diagnostics.end(), eng.notes.begin(), eng.notes.end());
    if (ok) {
      if (!verify_chain(q, eng.chain())) throw Error("internal: hyperbolic basis failed verification");
      res.verdict = Verdict::yes;
      res.method = "chain";
      res.chain = eng.chain();
      return res;
    }
  }
  if (invariants_trivial) {
    res.verdict = Verdict::yes;
    res.method = "invariants";
    res.obstruction = "";
    res.diagnostics.push_back("Arf witness " + to_string(m.witness) +
                              (n == 1 ? "; Clifford local invariants all vanish" : ""));
    return res;
  }
  res.verdict = Verdict::undecided;
  res.method = "search";
  res.obstruction = "no splitting chain within the search bounds and no obstruction found";
  return res;
}

WittResult witt_equal(const QForm& p, const QForm& q, const WittOptions& opt) {
  return witt_trivial(orth_sum(p, q), opt);
}

RawQuadratic transfer_raw(const QForm& q) {
  const TowerPtr& K = q.field;
  if (!K->has_ext) throw Error("transfer needs a form over a quadratic extension");
  const TowerPtr F = K->base;
  const int d = q.dim();
  std::vector<Vec> basis;
  for (int j = 0; j < d; ++j)
    for (int s = 0; s < 2; ++s) {
      Vec v(d, zero(K));
      v[j] = s ? alpha(K) : one(K);
      basis.push_back(v);
    }
  RawQuadratic r = make_raw(F, 2 * d);
  for (int i = 0; i < 2 * d; ++i) {
    r.q[i][i] = trace(qform_value(q, basis[i]));
    for (int j = i + 1; j < 2 * d; ++j) r.q[i][j] = trace(qform_polar(q, basis[i], basis[j]));
  }
  return r;
}

namespace {

// Tr([1,b]) ~ [1, sum d_i] + sum <<c_i, d_i]] for its normal form sum c_i[1,d_i].
std::vector<PfisterTerm> transfer_unit_witness(const QForm& tr) {
  const TowerPtr& F = tr.field;
  std::vector<PfisterTerm> out{{one(F), {}, arf(tr)}};
  for (const auto& p : tr.pairs)
    if (!p.a.is_one()) out.push_back({one(F), {p.a}, p.b});
  return out;
}

}  // namespace

QForm transfer(const QForm& q) {
  QForm out = normalize(transfer_raw(q)).form;
  if (!q.level_tag) return out;
  const TowerPtr F = q.field->base;
  std::vector<PfisterTerm> terms;
  for (const auto& w : q.witness) {
    bool in_f = w.scalar.in_base();
    for (const auto& s : w.slots) in_f = in_f && s.in_base();
    if (!in_f) return out;
    QForm tr = normalize(transfer_raw(unit_pair(w.b))).form;
    for (auto t : transfer_unit_witness(tr)) {
      std::vector<Elem> slots;
      for (const auto& s : w.slots) slots.push_back(to_base(s));
      t.slots.insert(t.slots.begin(), slots.begin(), slots.end());
      t.scalar = to_base(w.scalar) * t.scalar;
      terms.push_back(t);
    }
  }
  out.level_tag = q.level_tag;
  out.witness = terms;
  return out;
}

Represents represents(const QForm& pf, const Elem& c, const WittOptions& opt) {
  if (!is_pfister(pf)) throw Error("represents needs a Pfister form");
  if (c.is_zero()) throw Error("represents needs a nonzero element");
  Represents r;
  QForm sum = orth_sum(pf, scale(c, pf));
  r.detail = witt_trivial(sum, opt);
  r.verdict = r.detail.verdict;
  if (r.verdict != Verdict::yes || !pf.witness[0].slots.empty() || pf.field->has_ext) return r;
  // Norm form of F[alpha], wp(alpha) = b: read a preimage off an isotropic vector.
  const Elem& b = pf.witness[0].b;
  if (wp_membership(b).verdict != Verdict::no) return r;
  std::optional<Vec> v;
  if (!r.detail.chain.empty()) v = r.detail.chain[0].e;
  for (int deg = 0; !v && deg <= opt.search_degree; ++deg) {
    try {
      v = isotropy_search(sum, deg, IsotropyOptions{opt.lower_degree, opt.budget});
    } catch (const Error&) {
      break;
    }
  }
  if (!v) return r;
  TowerPtr K = make_ext(pf.field, "alpha", b);
  Elem u = lift((*v)[0], K) + lift((*v)[1], K) * alpha(K);
  Elem w = lift((*v)[2], K) + lift((*v)[3], K) * alpha(K);
  if (w.is_zero()) return r;
  r.norm_preimage = u / w;
  return r;
}

}  // namespace kmd
