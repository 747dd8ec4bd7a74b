#include "kmd/kato.hpp"

#include "kmd/error.hpp"

namespace kmd {

namespace {

// d/dt_j on F or on K = F[alpha], where d(alpha) = d(wp(alpha)).
Elem partial(const Elem& x, int j) {
  const TowerPtr& T = x.tower();
  const Arith& A = T->arith();
  if (!T->has_ext) return Elem(T, A.deriv(x.w0(), j));
  Rat d0 = A.add(A.deriv(x.w0(), j), A.mul(x.w1(), A.deriv(T->ext_a, j)));
  return Elem(T, d0, A.deriv(x.w1(), j));
}

void put(DiffForm& w, unsigned mask, const Elem& c) {
  if (c.is_zero()) return;
  auto it = w.coeffs.find(mask);
  if (it == w.coeffs.end()) {
    w.coeffs.emplace(mask, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) w.coeffs.erase(it);
}

void same_field(const DiffForm& a, const DiffForm& b) {
  if (!same_tower(a.field, b.field)) throw Error("differential forms over different fields");
}

}  // namespace

DiffForm form_zero(const TowerPtr& F, int degree) {
  if (degree < 0) throw Error("form degree out of range");
  return DiffForm{F, degree, {}};
}

DiffForm form_scalar(const Elem& c) {
  DiffForm w = form_zero(c.tower(), 0);
  put(w, 0, c);
  return w;
}

DiffForm dlog(const Elem& x) {
  if (x.is_zero()) throw Error("dlog of zero");
  const TowerPtr& T = x.tower();
  DiffForm w = form_zero(T, 1);
  if (T->n() == 0) return w;
  const Elem xi = inv(x);
  for (int j = 1; j <= T->n(); ++j) put(w, 1u << (j - 1), var(T, j) * partial(x, j) * xi);
  return w;
}

DiffForm dlog_wedge(const TowerPtr& F, const std::vector<Elem>& xs) {
  DiffForm w = form_scalar(one(F));
  for (const auto& x : xs) {
    if (w.degree + 1 > F->n()) return form_zero(F, static_cast<int>(xs.size()));
    w = wedge(w, dlog(x));
  }
  return w;
}

DiffForm operator+(const DiffForm& a, const DiffForm& b) {
  same_field(a, b);
  if (a.degree != b.degree) throw Error("adding forms of different degree");
  DiffForm r = a;
  for (const auto& [m, c] : b.coeffs) put(r, m, c);
  return r;
}

DiffForm operator*(const Elem& c, const DiffForm& w) {
  DiffForm r{w.field, w.degree, {}};
  if (c.is_zero()) return r;
  for (const auto& [m, x] : w.coeffs) put(r, m, c * x);
  return r;
}

bool operator==(const DiffForm& a, const DiffForm& b) {
  if (a.degree != b.degree || a.coeffs.size() != b.coeffs.size()) return false;
  for (const auto& [m, c] : a.coeffs) {
    auto it = b.coeffs.find(m);
    if (it == b.coeffs.end() || it->second != c) return false;
  }
  return true;
}

bool is_zero(const DiffForm& w) { return w.coeffs.empty(); }

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
  same_field(a, b);
  const int deg = a.degree + b.degree;
  if (deg > a.field->n()) return form_zero(a.field, deg);
  DiffForm r{a.field, deg, {}};
  for (const auto& [m1, c1] : a.coeffs)
    for (const auto& [m2, c2] : b.coeffs)
      if (!(m1 & m2)) put(r, m1 | m2, c1 * c2);
  return r;
}

DiffForm d(const DiffForm& w) {
  const TowerPtr& T = w.field;
  if (w.degree >= T->n()) return form_zero(T, w.degree + 1);
  DiffForm r{T, w.degree + 1, {}};
  for (const auto& [m, c] : w.coeffs)
    for (int j = 1; j <= T->n(); ++j) {
      const unsigned bit = 1u << (j - 1);
      if (m & bit) continue;
      put(r, m | bit, var(T, j) * partial(c, j));
    }
  return r;
}

namespace {

void require_square_ext(const TowerPtr& K) {
  if (K->has_ext && !K->arith().is_square(K->ext_a))
    throw Error("square representative required: wp(" + K->ext_name + ") is not in F^2");
}

}  // namespace

DiffForm frobenius(const DiffForm& w) {
  require_square_ext(w.field);
  DiffForm r{w.field, w.degree, {}};
  for (const auto& [m, c] : w.coeffs) put(r, m, c * c);
  return r;
}

DiffForm wp_form(const DiffForm& w) { return frobenius(w) + w; }

DiffForm tr_form(const DiffForm& w) {
  const TowerPtr& K = w.field;
  if (!K->has_ext) throw Error("tr_form needs a form over a quadratic extension");
  require_square_ext(K);
  DiffForm r{K->base, w.degree, {}};
  for (const auto& [m, c] : w.coeffs) put(r, m, trace(c));
  return r;
}

DiffForm lift_form(const DiffForm& w, const TowerPtr& K) {
  DiffForm r{K, w.degree, {}};
  for (const auto& [m, c] : w.coeffs) put(r, m, lift(c, K));
  return r;
}

std::string to_string(const DiffForm& w) {
  if (w.coeffs.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : w.coeffs) {
    if (!out.empty()) out += " + ";
    std::string cs = to_string(c);
    if (m == 0) {
      out += cs;
      continue;
    }
    out += "(" + cs + ")";
    bool first = true;
    for (int j = 1; j <= w.field->n(); ++j)
      if (m & (1u << (j - 1))) {
        out += first ? " dlog " : " ^ dlog ";
        out += w.field->vars[j - 1];
        first = false;
      }
  }
  return out;
}

DiffForm symbol_form(const TowerPtr& F, const Symbol& s) {
  if (!same_tower(F, s.b.tower())) throw Error("symbol coefficient lives in a different field");
  return s.b * dlog_wedge(F, s.slots);
}

CohClass class_of(const DiffForm& w) { return CohClass{w, {}, false}; }

CohClass class_of_symbols(const TowerPtr& F, int degree, std::vector<Symbol> symbols) {
  CohClass c{form_zero(F, degree), {}, true};
  for (const auto& s : symbols) {
    if (static_cast<int>(s.slots.size()) != degree) throw Error("symbol has the wrong number of slots");
    for (const auto& x : s.slots)
      if (x.is_zero()) throw Error("symbol slot must be nonzero");
    if (degree <= F->n()) c.rep = c.rep + symbol_form(F, s);
  }
  c.symbols = std::move(symbols);
  return c;
}

CohClass operator+(const CohClass& a, const CohClass& b) {
  CohClass r{a.rep + b.rep, a.symbols, a.has_symbols && b.has_symbols};
  if (r.has_symbols)
    r.symbols.insert(r.symbols.end(), b.symbols.begin(), b.symbols.end());
  else
    r.symbols.clear();
  return r;
}

std::string to_string(const CohClass& c) {
  std::string s = "[" + to_string(c.rep) + "]";
  if (!c.has_symbols) return s;
  s += " = ";
  if (c.symbols.empty()) return s + "0";
  for (std::size_t i = 0; i < c.symbols.size(); ++i) {
    if (i) s += " + ";
    s += "{" + to_string(c.symbols[i].b);
    for (const auto& x : c.symbols[i].slots) s += "; " + to_string(x);
    s += "}";
  }
  return s;
}

std::optional<Elem> square_representative(const Elem& a, int bound) {
  const TowerPtr& F = a.tower();
  const Arith& A = F->arith();
  if (A.is_square(a.w0())) return zero(F);
  // Only the top variable is searched; coefficients are base constants.
  const long q = A.gf().order();
  long count = 1;
  for (int i = 0; i <= bound; ++i) {
    count *= q;
    if (count > 1000000) throw Error("square representative search bound too large");
  }
  for (long idx = 1; idx < count; ++idx) {
    Elem f = zero(F);
    long r = idx;
    for (int i = 0; i <= bound; ++i) {
      if (r % q) f = f + constant(F, static_cast<GF2m::Value>(r % q)) * pow(var(F, F->n()), i);
      r /= q;
    }
    if (A.is_square((a + wp(f)).w0())) return f;
  }
  return std::nullopt;
}

std::vector<Symbol> presentation(const CohClass& c) {
  if (c.has_symbols) return c.symbols;
  const TowerPtr& F = c.rep.field;
  std::vector<Symbol> out;
  for (const auto& [m, coef] : c.rep.coeffs) {
    Symbol s{coef, {}};
    for (int j = 1; j <= F->n(); ++j)
      if (m & (1u << (j - 1))) s.slots.push_back(var(F, j));
    out.push_back(s);
  }
  return out;
}

CohClass wedge_dlog(const std::vector<Elem>& slots, const CohClass& z) {
  const TowerPtr& F = z.rep.field;
  std::vector<Symbol> syms;
  for (auto s : presentation(z)) {
    s.slots.insert(s.slots.begin(), slots.begin(), slots.end());
    syms.push_back(s);
  }
  const int deg = z.rep.degree + static_cast<int>(slots.size());
  return class_of_symbols(F, deg, syms);
}

DiffForm clifford_form(const QForm& q) {
  const TowerPtr& F = q.field;
  DiffForm w = form_zero(F, 1);
  if (F->n() == 0) return w;
  for (const auto& p : q.pairs) w = w + p.b * dlog(p.a);
  return w;
}

CohClass clifford(const QForm& q) {
  if (!q.quasi.empty()) throw Error("clifford needs a nonsingular form");
  if (wp_membership(arf(q)).verdict == Verdict::no) throw Error("clifford needs a trivial Arf invariant");
  std::vector<Symbol> syms;
  for (const auto& p : q.pairs)
    if (!p.a.is_one()) syms.push_back({p.b, {p.a}});
  return class_of_symbols(q.field, 1, syms);
}

CohClass e_map(const QForm& q, int level) {
  const TowerPtr& F = q.field;
  if (!q.quasi.empty()) throw Error("e_map needs a nonsingular form");
  if (level == 0) {
    Elem a = arf(q);
    return class_of_symbols(F, 0, {Symbol{a, {}}});
  }
  if (level == 1) {
    auto m = wp_membership(arf(q));
    if (m.verdict == Verdict::no) throw Error("e_map at level 1 needs an Arf-trivial form");
    if (m.verdict == Verdict::undecided) throw Unsupported("Arf class undecided: " + m.obstruction);
    std::vector<Symbol> syms;
    for (const auto& p : q.pairs)
      if (!p.a.is_one()) syms.push_back({p.b, {p.a}});
    return class_of_symbols(F, 1, syms);
  }
  if (!q.level_tag || *q.level_tag < level)
    throw Error("no I^n decomposition witness at level " + std::to_string(level));
  std::vector<Symbol> syms;
  for (const auto& t : q.witness) {
    const int k = static_cast<int>(t.slots.size());
    if (k < level) throw Error("witness term below the requested level");
    if (k == level) syms.push_back({t.b, t.slots});
  }
  return class_of_symbols(F, level, syms);
}

QForm f_inv(const CohClass& c) {
  if (!c.has_symbols) throw Error("f_inv needs a symbol presentation of the class");
  const TowerPtr& F = c.rep.field;
  QForm r = make_qform(F, {});
  for (const auto& s : c.symbols) r = orth_sum(r, pfister(s.slots, s.b));
  if (r.dim() == 0) return r;
  r.level_tag = static_cast<int>(c.symbols.front().slots.size());
  return r;
}

}  // namespace kmd
