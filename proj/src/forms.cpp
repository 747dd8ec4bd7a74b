#include "kmd/forms.hpp"

#include <algorithm>

#include "kmd/error.hpp"

namespace kmd {

namespace {

void require_field(const TowerPtr& F, const Elem& x) {
  if (!same_tower(F, x.tower())) throw Error("form entry lives in a different field");
}

Vec zero_vec(const TowerPtr& F, int d) { return Vec(d, zero(F)); }

std::string paren(const Elem& x) {
  std::string s = to_string(x);
  bool simple = s.find_first_of(" +-/") == std::string::npos;
  return simple ? s : "(" + s + ")";
}

}  // namespace

QForm make_qform(const TowerPtr& F, std::vector<QPair> pairs, std::vector<Elem> quasi) {
  for (const auto& p : pairs) {
    require_field(F, p.a);
    require_field(F, p.b);
    if (p.a.is_zero()) throw Error("pair with zero scalar is singular");
  }
  for (const auto& c : quasi) require_field(F, c);
  QForm q;
  q.field = F;
  q.pairs = std::move(pairs);
  q.quasi = std::move(quasi);
  return q;
}

QForm hyperbolic(const TowerPtr& F, int planes) {
  return make_qform(F, std::vector<QPair>(planes, QPair{one(F), zero(F)}));
}

QForm unit_pair(const Elem& b) { return make_qform(b.tower(), {QPair{one(b.tower()), b}}); }

QForm orth_sum(const QForm& p, const QForm& q) {
  if (!same_tower(p.field, q.field)) throw Error("orthogonal sum of forms over different fields");
  if (p.dim() == 0) return q;
  if (q.dim() == 0) return p;
  QForm r = p;
  r.pairs.insert(r.pairs.end(), q.pairs.begin(), q.pairs.end());
  r.quasi.insert(r.quasi.end(), q.quasi.begin(), q.quasi.end());
  if (p.level_tag && q.level_tag) {
    r.level_tag = std::min(*p.level_tag, *q.level_tag);
    r.witness.insert(r.witness.end(), q.witness.begin(), q.witness.end());
  } else {
    r.level_tag.reset();
    r.witness.clear();
  }
  return r;
}

QForm scale(const Elem& c, const QForm& q) {
  require_field(q.field, c);
  if (c.is_zero()) throw Error("scaling a form by zero");
  QForm r = q;
  for (auto& p : r.pairs) p.a = c * p.a;
  for (auto& z : r.quasi) z = c * z;
  for (auto& w : r.witness) w.scalar = c * w.scalar;
  return r;
}

QForm extend(const QForm& q, const TowerPtr& K) {
  QForm r;
  r.field = K;
  for (const auto& p : q.pairs) r.pairs.push_back({lift(p.a, K), lift(p.b, K)});
  for (const auto& z : q.quasi) r.quasi.push_back(lift(z, K));
  r.level_tag = q.level_tag;
  for (const auto& w : q.witness) {
    PfisterTerm t{lift(w.scalar, K), {}, lift(w.b, K)};
    for (const auto& s : w.slots) t.slots.push_back(lift(s, K));
    r.witness.push_back(t);
  }
  return r;
}

Elem qform_value(const QForm& q, const Vec& v) {
  if (static_cast<int>(v.size()) != q.dim()) throw Error("vector length does not match the form");
  Elem s = zero(q.field);
  for (std::size_t i = 0; i < q.pairs.size(); ++i) {
    const Elem& x = v[2 * i];
    const Elem& y = v[2 * i + 1];
    if (x.is_zero() && y.is_zero()) continue;
    s = s + q.pairs[i].a * (x * x + x * y + q.pairs[i].b * y * y);
  }
  const std::size_t off = 2 * q.pairs.size();
  for (std::size_t j = 0; j < q.quasi.size(); ++j)
    if (!v[off + j].is_zero()) s = s + q.quasi[j] * v[off + j] * v[off + j];
  return s;
}

Elem qform_polar(const QForm& q, const Vec& v, const Vec& w) {
  Elem s = zero(q.field);
  for (std::size_t i = 0; i < q.pairs.size(); ++i) {
    Elem t = v[2 * i] * w[2 * i + 1] + v[2 * i + 1] * w[2 * i];
    if (!t.is_zero()) s = s + q.pairs[i].a * t;
  }
  return s;
}

RawQuadratic make_raw(const TowerPtr& F, int dim) {
  RawQuadratic r;
  r.field = F;
  r.dim = dim;
  r.q.assign(dim, Vec(dim, zero(F)));
  return r;
}

RawQuadratic to_raw(const QForm& q) {
  RawQuadratic r = make_raw(q.field, q.dim());
  for (std::size_t i = 0; i < q.pairs.size(); ++i) {
    r.q[2 * i][2 * i] = q.pairs[i].a;
    r.q[2 * i][2 * i + 1] = q.pairs[i].a;
    r.q[2 * i + 1][2 * i + 1] = q.pairs[i].a * q.pairs[i].b;
  }
  const std::size_t off = 2 * q.pairs.size();
  for (std::size_t j = 0; j < q.quasi.size(); ++j) r.q[off + j][off + j] = q.quasi[j];
  return r;
}

Elem raw_value(const RawQuadratic& r, const Vec& v) {
  Elem s = zero(r.field);
  for (int i = 0; i < r.dim; ++i) {
    if (v[i].is_zero()) continue;
    for (int j = i; j < r.dim; ++j)
      if (!r.q[i][j].is_zero() && !v[j].is_zero()) s = s + r.q[i][j] * v[i] * v[j];
  }
  return s;
}

Elem raw_polar(const RawQuadratic& r, const Vec& v, const Vec& w) {
  Elem s = zero(r.field);
  for (int i = 0; i < r.dim; ++i)
    for (int j = i + 1; j < r.dim; ++j) {
      if (r.q[i][j].is_zero()) continue;
      Elem t = v[i] * w[j] + v[j] * w[i];
      if (!t.is_zero()) s = s + r.q[i][j] * t;
    }
  return s;
}

std::string to_string(const QForm& q) {
  std::string out;
  auto sep = [&] {
    if (!out.empty()) out += " + ";
  };
  for (const auto& p : q.pairs) {
    sep();
    if (!p.a.is_one()) out += paren(p.a) + "*";
    out += "[1, " + to_string(p.b) + "]";
  }
  if (!q.quasi.empty()) {
    sep();
    out += "<";
    for (std::size_t i = 0; i < q.quasi.size(); ++i) out += (i ? ", " : "") + to_string(q.quasi[i]);
    out += ">";
  }
  return out.empty() ? "0" : out;
}

BilForm bil_pfister(const TowerPtr& F, const std::vector<Elem>& slots) {
  BilForm B{F, {one(F)}};
  for (const auto& s : slots) {
    require_field(F, s);
    if (s.is_zero()) throw Error("Pfister slot must be nonzero");
    const std::size_t m = B.entries.size();
    for (std::size_t i = 0; i < m; ++i) B.entries.push_back(B.entries[i] * s);
  }
  return B;
}

QForm tensor(const BilForm& B, const QForm& q) {
  QForm r = make_qform(q.field, {});
  for (const auto& e : B.entries) {
    QForm s = scale(e, q);
    r.pairs.insert(r.pairs.end(), s.pairs.begin(), s.pairs.end());
    r.quasi.insert(r.quasi.end(), s.quasi.begin(), s.quasi.end());
  }
  return r;
}

QForm pfister_multiple(const std::vector<Elem>& slots, const QForm& q) {
  QForm r = tensor(bil_pfister(q.field, slots), q);
  if (q.level_tag) {
    r.level_tag = *q.level_tag + static_cast<int>(slots.size());
    for (const auto& w : q.witness) {
      PfisterTerm t = w;
      t.slots.insert(t.slots.begin(), slots.begin(), slots.end());
      r.witness.push_back(t);
    }
  }
  return r;
}

std::string to_string(const BilForm& B) {
  std::string out = "<";
  for (std::size_t i = 0; i < B.entries.size(); ++i) out += (i ? ", " : "") + to_string(B.entries[i]);
  return out + ">";
}

QForm pfister(const std::vector<Elem>& slots, const Elem& b) {
  QForm q = pfister_multiple(slots, unit_pair(b));
  q.level_tag = static_cast<int>(slots.size());
  q.witness = {PfisterTerm{one(b.tower()), slots, b}};
  return q;
}

bool is_pfister(const QForm& q) {
  return q.level_tag && q.witness.size() == 1 && q.witness[0].scalar.is_one() &&
         static_cast<int>(q.witness[0].slots.size()) == *q.level_tag && q.quasi.empty() &&
         q.dim() == (2 << q.witness[0].slots.size());
}

Elem arf(const QForm& q) {
  if (!q.quasi.empty()) throw Error("Arf invariant is undefined for a form with a quasilinear part");
  Elem s = zero(q.field);
  for (const auto& p : q.pairs) s = s + p.b;
  return s;
}

std::vector<PfisterTerm> arf_trivial_witness(const QForm& q) {
  std::vector<PfisterTerm> out;
  for (const auto& p : q.pairs) out.push_back({one(q.field), {p.a}, p.b});
  return out;
}

QForm witness_form(const TowerPtr& F, const std::vector<PfisterTerm>& terms) {
  QForm r = make_qform(F, {});
  for (const auto& t : terms) {
    QForm p = pfister(t.slots, t.b);
    r = orth_sum(r, scale(t.scalar, p));
  }
  return r;
}

std::vector<Elem> square_components(const Elem& x) {
  const TowerPtr& T = x.tower();
  TowerPtr F = base_field(T);
  const Arith& A = T->arith();
  const int n = T->n();
  std::vector<Elem> out;
  if (!T->has_ext) {
    for (unsigned e = 0; e < (1u << n); ++e) out.push_back(Elem(T, A.square_component(x.w0(), e)));
    return out;
  }
  const Rat aw1 = A.mul(T->ext_a, x.w1());
  for (unsigned e = 0; e < (1u << n); ++e) {
    Rat c0 = A.add(A.square_component(x.w0(), e), A.square_component(aw1, e));
    out.push_back(Elem(T, c0, A.square_component(x.w1(), e)));
  }
  return out;
}

std::optional<Elem> sqrt_if_square(const Elem& x) {
  const TowerPtr& T = x.tower();
  const Arith& A = T->arith();
  if (!T->has_ext) {
    if (!A.is_square(x.w0())) return std::nullopt;
    return Elem(T, A.sqrt(x.w0()));
  }
  const Rat x0 = A.add(x.w0(), A.mul(T->ext_a, x.w1()));
  if (!A.is_square(x0) || !A.is_square(x.w1())) return std::nullopt;
  return Elem(T, A.sqrt(x0), A.sqrt(x.w1()));
}

// Normalization

namespace {

struct Worker {
  const RawQuadratic& r;
  std::vector<Vec> v;
  std::vector<ChainStep> chain;

  void add(int i, int j, const Elem& c) {
    if (c.is_zero()) return;
    for (int k = 0; k < r.dim; ++k)
      if (!v[j][k].is_zero()) v[i][k] = v[i][k] + c * v[j][k];
    chain.push_back({ChainStep::Kind::add, i, j, c});
  }
  void mul(int i, const Elem& c) {
    if (c.is_one()) return;
    for (auto& x : v[i]) x = x * c;
    chain.push_back({ChainStep::Kind::scale, i, i, c});
  }
  Elem Q(int i) const { return raw_value(r, v[i]); }
  Elem B(int i, int j) const { return raw_polar(r, v[i], v[j]); }
};

}  // namespace

Normalization normalize(const RawQuadratic& r) {
  const TowerPtr& F = r.field;
  Worker w{r, {}, {}};
  for (int i = 0; i < r.dim; ++i) {
    Vec e = zero_vec(F, r.dim);
    e[i] = one(F);
    w.v.push_back(e);
  }
  Normalization out;
  out.form = make_qform(F, {});
  std::vector<int> active(r.dim);
  for (int i = 0; i < r.dim; ++i) active[i] = i;

  for (;;) {
    // Lowest-index vector with a partner, preferring isotropic ones.
    int u = -1, p = -1;
    for (int pass = 0; pass < 2 && u < 0; ++pass) {
      for (int i : active) {
        if (pass == 0 && !w.Q(i).is_zero()) continue;
        for (int j : active)
          if (j != i && !w.B(i, j).is_zero()) {
            u = i;
            p = j;
            break;
          }
        if (u >= 0) break;
      }
    }
    if (u < 0) break;
    w.mul(p, inv(w.B(u, p)));
    for (int i : active) {
      if (i == u || i == p) continue;
      w.add(i, u, w.B(i, p));
      w.add(i, p, w.B(i, u));
    }
    const Elem A = w.Q(u), Bv = w.Q(p);
    if (!A.is_zero()) {
      w.mul(p, A);
      out.form.pairs.push_back({A, A * Bv});
      out.order.push_back(u);
      out.order.push_back(p);
    } else {
      w.add(p, u, Bv + one(F));
      out.form.pairs.push_back({one(F), zero(F)});
      out.order.push_back(p);
      out.order.push_back(u);
    }
    active.erase(std::remove_if(active.begin(), active.end(), [&](int i) { return i == u || i == p; }),
                 active.end());
  }

  // The rest spans the radical; reduce it via the square-class coordinates of
  // the values, which behave linearly under v_i += c v_j.
  std::vector<std::pair<int, std::vector<Elem>>> pivots;  // index, components
  std::vector<int> pivot_pos;
  for (int i : active) {
    std::vector<Elem> sc = square_components(w.Q(i));
    for (std::size_t k = 0; k < pivots.size(); ++k) {
      const int pos = pivot_pos[k];
      if (sc[pos].is_zero()) continue;
      const Elem c = sc[pos] / pivots[k].second[pos];
      for (std::size_t m = 0; m < sc.size(); ++m) sc[m] = sc[m] + c * pivots[k].second[m];
      w.add(i, pivots[k].first, c);
    }
    auto nz = std::find_if(sc.begin(), sc.end(), [](const Elem& e) { return !e.is_zero(); });
    if (nz == sc.end()) {
      out.degenerate = true;
      ++out.dropped;
      continue;
    }
    pivots.push_back({i, sc});
    pivot_pos.push_back(static_cast<int>(nz - sc.begin()));
    out.form.quasi.push_back(w.Q(i));
    out.order.push_back(i);
  }
  out.chain = std::move(w.chain);
  return out;
}

bool verify_normalization(const RawQuadratic& r, const Normalization& n) {
  const TowerPtr& F = r.field;
  Worker w{r, {}, {}};
  for (int i = 0; i < r.dim; ++i) {
    Vec e = zero_vec(F, r.dim);
    e[i] = one(F);
    w.v.push_back(e);
  }
  for (const auto& s : n.chain) {
    switch (s.kind) {
      case ChainStep::Kind::add:
        if (s.i == s.j) return false;
        w.add(s.i, s.j, s.c);
        break;
      case ChainStep::Kind::scale:
        if (s.c.is_zero()) return false;
        w.mul(s.i, s.c);
        break;
      case ChainStep::Kind::swap:
        std::swap(w.v[s.i], w.v[s.j]);
        break;
    }
  }
  const QForm& q = n.form;
  if (static_cast<int>(n.order.size()) != q.dim() || q.dim() + n.dropped != r.dim) return false;
  const int m = static_cast<int>(q.pairs.size());
  for (int i = 0; i < q.dim(); ++i) {
    const int vi = n.order[i];
    Elem expect = i < 2 * m ? (i % 2 == 0 ? q.pairs[i / 2].a : q.pairs[i / 2].a * q.pairs[i / 2].b)
                            : q.quasi[i - 2 * m];
    if (w.Q(vi) != expect) return false;
    for (int j = i + 1; j < q.dim(); ++j) {
      Elem pol = w.B(vi, n.order[j]);
      bool partner = i < 2 * m && i % 2 == 0 && j == i + 1;
      if (pol != (partner ? q.pairs[i / 2].a : zero(F))) return false;
    }
  }
  // Dropped directions: isotropic and in the radical.
  for (int i = 0; i < r.dim; ++i) {
    if (std::find(n.order.begin(), n.order.end(), i) != n.order.end()) continue;
    if (!w.Q(i).is_zero()) return false;
    for (int j = 0; j < r.dim; ++j)
      if (!w.B(i, j).is_zero()) return false;
  }
  return true;
}

}  // namespace kmd
