#include "kmd/rational.hpp"

#include <algorithm>
#include <numeric>

#include "kmd/error.hpp"

namespace kmd {

namespace {

void trim(Poly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

void check_level(const Rat& a, const Rat& b) {
  if (a.level() != b.level()) throw Error("internal: level mismatch in field arithmetic");
}

}  // namespace

Rat Arith::zero(int level) const {
  Rat r;
  r.level_ = level;
  return r;
}

Rat Arith::constant(std::uint32_t c, int level) const {
  Rat r;
  if (c >= gf_->order()) throw Error("constant outside GF(2^m)");
  r.c_ = c;
  for (int l = 1; l <= level; ++l) {
    if (r.is_zero()) {
      r = zero(l);
      continue;
    }
    Rat up;
    up.level_ = l;
    up.f_ = std::make_shared<const std::pair<Poly, Poly>>(Poly{r}, Poly{one(l - 1)});
    r = up;
  }
  return r;
}

Rat Arith::var(int j, int level) const {
  if (j < 1 || j > level) throw Error("internal: variable index out of range");
  Rat t;
  t.level_ = j;
  t.f_ = std::make_shared<const std::pair<Poly, Poly>>(Poly{zero(j - 1), one(j - 1)},
                                                       Poly{one(j - 1)});
  return lift(t, level);
}

Rat Arith::lift(const Rat& x, int level) const {
  if (x.level() > level) throw Error("internal: cannot lift to a lower level");
  Rat r = x;
  while (r.level() < level) {
    const int l = r.level() + 1;
    if (r.is_zero()) {
      r = zero(l);
      continue;
    }
    Rat up;
    up.level_ = l;
    up.f_ = std::make_shared<const std::pair<Poly, Poly>>(Poly{r}, Poly{one(l - 1)});
    r = up;
  }
  return r;
}

bool Arith::pis_one(const Poly& p) const { return p.size() == 1 && is_one(p[0]); }

bool Arith::is_one(const Rat& a) const {
  if (a.level() == 0) return a.c_ == 1;
  if (a.is_zero()) return false;
  return pis_one(a.num()) && pis_one(a.den());
}

Rat Arith::make(Poly num, Poly den, int level) const {
  Rat r;
  r.level_ = level;
  trim(num);
  if (num.empty()) return r;
  r.f_ = std::make_shared<const std::pair<Poly, Poly>>(std::move(num), std::move(den));
  return r;
}

Rat Arith::frac(Poly num, Poly den, int level) const {
  trim(num);
  trim(den);
  if (den.empty()) throw Error("division by zero");
  if (num.empty()) return zero(level);
  const int cl = level - 1;
  if (den.size() > 1) {
    Poly g = pgcd(num, den, cl);
    if (g.size() > 1) {
      num = pdiv_exact(num, g, cl);
      den = pdiv_exact(den, g, cl);
    }
  }
  if (!is_one(den.back())) {
    Rat c = inv(den.back());
    num = pscale(num, c);
    den = pscale(den, c);
  }
  return make(std::move(num), std::move(den), level);
}

Rat Arith::from_poly(Poly num, int level) const {
  return make(std::move(num), Poly{one(level - 1)}, level);
}

bool Arith::is_poly(const Rat& a) const {
  if (a.level() == 0 || a.is_zero()) return true;
  return pis_one(a.den());
}

bool Arith::is_top_constant(const Rat& a) const {
  if (a.level() == 0 || a.is_zero()) return true;
  return a.num().size() == 1 && a.den().size() == 1;
}

Rat Arith::drop(const Rat& a) const {
  if (a.level() == 0) throw Error("internal: drop at level 0");
  if (a.is_zero()) return zero(a.level() - 1);
  if (!is_top_constant(a)) throw Error("internal: drop of a non-constant");
  return div(a.num()[0], a.den()[0]);
}

bool Arith::is_base_constant(const Rat& a) const {
  Rat x = a;
  while (x.level() > 0) {
    if (!is_top_constant(x)) return false;
    x = drop(x);
  }
  return true;
}

std::uint32_t Arith::base_constant(const Rat& a) const {
  Rat x = a;
  while (x.level() > 0) x = drop(x);
  return x.c_;
}

Rat Arith::add(const Rat& a, const Rat& b) const {
  check_level(a, b);
  if (a.level() == 0) {
    Rat r;
    r.c_ = a.c_ ^ b.c_;
    return r;
  }
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const int cl = a.level() - 1;
  if (pequal(a.den(), b.den())) {
    Poly n = padd(a.num(), b.num());
    if (pis_one(a.den())) return make(std::move(n), a.den(), a.level());
    return frac(std::move(n), a.den(), a.level());
  }
  Poly n = padd(pmul(a.num(), b.den(), cl), pmul(b.num(), a.den(), cl));
  Poly d = pmul(a.den(), b.den(), cl);
  return frac(std::move(n), std::move(d), a.level());
}

Rat Arith::mul(const Rat& a, const Rat& b) const {
  check_level(a, b);
  if (a.level() == 0) {
    Rat r;
    r.c_ = gf_->mul(a.c_, b.c_);
    return r;
  }
  if (a.is_zero() || b.is_zero()) return zero(a.level());
  const int cl = a.level() - 1;
  Poly an = a.num(), ad = a.den(), bn = b.num(), bd = b.den();
  if (!pis_one(bd)) {
    Poly g = pgcd(an, bd, cl);
    if (g.size() > 1) {
      an = pdiv_exact(an, g, cl);
      bd = pdiv_exact(bd, g, cl);
    }
  }
  if (!pis_one(ad)) {
    Poly g = pgcd(bn, ad, cl);
    if (g.size() > 1) {
      bn = pdiv_exact(bn, g, cl);
      ad = pdiv_exact(ad, g, cl);
    }
  }
  Poly n = pmul(an, bn, cl);
  Poly d = pmul(ad, bd, cl);
  // Denominators stay monic; fold any non-unit leading coefficient.
  if (!is_one(d.back())) return frac(std::move(n), std::move(d), a.level());
  return make(std::move(n), std::move(d), a.level());
}

Rat Arith::inv(const Rat& a) const {
  if (a.is_zero()) throw Error("division by zero");
  if (a.level() == 0) {
    Rat r;
    r.c_ = gf_->inv(a.c_);
    return r;
  }
  Poly n = a.den(), d = a.num();
  if (!is_one(d.back())) {
    Rat c = inv(d.back());
    n = pscale(n, c);
    d = pscale(d, c);
  }
  return make(std::move(n), std::move(d), a.level());
}

Rat Arith::pow(const Rat& a, long e) const {
  if (e < 0) return pow(inv(a), -e);
  Rat r = one(a.level()), b = a;
  while (e) {
    if (e & 1) r = mul(r, b);
    e >>= 1;
    if (e) b = mul(b, b);
  }
  return r;
}

int Arith::compare(const Rat& a, const Rat& b) const {
  if (a.level() != b.level()) return a.level() < b.level() ? -1 : 1;
  if (a.level() == 0) return a.c_ == b.c_ ? 0 : (a.c_ < b.c_ ? -1 : 1);
  if (a.is_zero() || b.is_zero()) {
    if (a.is_zero() && b.is_zero()) return 0;
    return a.is_zero() ? -1 : 1;
  }
  if (a.f_ == b.f_) return 0;
  if (int c = pcompare(a.den(), b.den())) return c;
  return pcompare(a.num(), b.num());
}

int Arith::pcompare(const Poly& p, const Poly& q) const {
  if (p.size() != q.size()) return p.size() < q.size() ? -1 : 1;
  for (std::size_t i = p.size(); i-- > 0;)
    if (int c = compare(p[i], q[i])) return c;
  return 0;
}

bool Arith::pequal(const Poly& p, const Poly& q) const { return pcompare(p, q) == 0; }

Poly Arith::padd(const Poly& p, const Poly& q) const {
  const Poly& big = p.size() >= q.size() ? p : q;
  const Poly& small = p.size() >= q.size() ? q : p;
  Poly r = big;
  for (std::size_t i = 0; i < small.size(); ++i) r[i] = add(r[i], small[i]);
  trim(r);
  return r;
}

Poly Arith::pmul(const Poly& p, const Poly& q, int cl) const {
  if (p.empty() || q.empty()) return {};
  Poly r(p.size() + q.size() - 1, zero(cl));
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].is_zero()) continue;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (q[j].is_zero()) continue;
      r[i + j] = add(r[i + j], mul(p[i], q[j]));
    }
  }
  trim(r);
  return r;
}

Poly Arith::pscale(const Poly& p, const Rat& c) const {
  if (c.is_zero()) return {};
  if (is_one(c)) return p;
  Poly r;
  r.reserve(p.size());
  for (const auto& x : p) r.push_back(mul(x, c));
  trim(r);
  return r;
}

Poly Arith::pshift(const Poly& p, int k, int cl) const {
  if (p.empty()) return p;
  Poly r(k, zero(cl));
  r.insert(r.end(), p.begin(), p.end());
  return r;
}

void Arith::pdivmod(const Poly& p, const Poly& q, Poly& quo, Poly& rem, int cl) const {
  if (q.empty()) throw Error("polynomial division by zero");
  rem = p;
  quo.clear();
  if (rem.size() < q.size()) return;
  quo.assign(rem.size() - q.size() + 1, zero(cl));
  const Rat lead_inv = inv(q.back());
  const bool monic = is_one(q.back());
  while (!rem.empty() && rem.size() >= q.size()) {
    const std::size_t shift = rem.size() - q.size();
    Rat c = monic ? rem.back() : mul(rem.back(), lead_inv);
    quo[shift] = c;
    for (std::size_t j = 0; j < q.size(); ++j) rem[shift + j] = add(rem[shift + j], mul(c, q[j]));
    trim(rem);
  }
  trim(quo);
}

Poly Arith::pmod(const Poly& p, const Poly& q, int cl) const {
  Poly quo, rem;
  pdivmod(p, q, quo, rem, cl);
  return rem;
}

Poly Arith::pdiv_exact(const Poly& p, const Poly& q, int cl) const {
  Poly quo, rem;
  pdivmod(p, q, quo, rem, cl);
  if (!rem.empty()) throw Error("internal: inexact polynomial division");
  return quo;
}

Poly Arith::pmonic(const Poly& p) const {
  if (p.empty() || is_one(p.back())) return p;
  return pscale(p, inv(p.back()));
}

Poly Arith::pgcd(Poly p, Poly q, int cl) const {
  trim(p);
  trim(q);
  while (!q.empty()) {
    Poly r = pmod(p, q, cl);
    p = std::move(q);
    q = pmonic(r);
  }
  return pmonic(p);
}

Poly Arith::pderiv(const Poly& p, int cl) const {
  Poly r;
  for (std::size_t i = 1; i < p.size(); ++i) r.push_back(i % 2 ? p[i] : zero(cl));
  trim(r);
  return r;
}

Rat Arith::peval(const Poly& p, const Rat& x, int cl) const {
  Rat r = zero(cl);
  for (std::size_t i = p.size(); i-- > 0;) r = add(mul(r, x), p[i]);
  return r;
}

Poly Arith::ppow(const Poly& p, int e, int cl) const {
  Poly r{one(cl)}, b = p;
  while (e) {
    if (e & 1) r = pmul(r, b, cl);
    e >>= 1;
    if (e) b = pmul(b, b, cl);
  }
  return r;
}

Poly Arith::pconst(const Rat& c) const {
  if (c.is_zero()) return {};
  return Poly{c};
}

Poly Arith::pvar(int cl) const { return Poly{zero(cl), one(cl)}; }

Rat Arith::deriv(const Rat& a, int j) const {
  if (a.level() == 0 || a.is_zero()) return zero(a.level());
  const int l = a.level();
  const int cl = l - 1;
  if (j > l) return zero(l);
  Poly dn, dd;
  if (j == l) {
    dn = pderiv(a.num(), cl);
    dd = pderiv(a.den(), cl);
  } else {
    for (const auto& c : a.num()) dn.push_back(deriv(c, j));
    for (const auto& c : a.den()) dd.push_back(deriv(c, j));
    trim(dn);
    trim(dd);
  }
  // (n/d)' = (n' d + n d') / d^2
  Poly top = padd(pmul(dn, a.den(), cl), pmul(a.num(), dd, cl));
  return frac(std::move(top), pmul(a.den(), a.den(), cl), l);
}

bool Arith::is_square(const Rat& a) const {
  if (a.level() == 0 || a.is_zero()) return true;
  for (const Poly* p : {&a.num(), &a.den()})
    for (std::size_t i = 0; i < p->size(); ++i) {
      if (i % 2 == 1 && !(*p)[i].is_zero()) return false;
      if (i % 2 == 0 && !is_square((*p)[i])) return false;
    }
  return true;
}

Rat Arith::sqrt(const Rat& a) const {
  if (a.level() == 0) {
    Rat r;
    r.c_ = gf_->sqrt(a.c_);
    return r;
  }
  if (a.is_zero()) return a;
  if (!is_square(a)) throw Error("internal: sqrt of a non-square");
  auto half = [&](const Poly& p) {
    Poly r;
    for (std::size_t i = 0; i < p.size(); i += 2) r.push_back(sqrt(p[i]));
    trim(r);
    return r;
  };
  return make(half(a.num()), half(a.den()), a.level());
}

Rat Arith::square_component(const Rat& a, unsigned eps) const {
  const int l = a.level();
  if (l == 0) return eps == 0 ? sqrt(a) : zero(0);
  if (a.is_zero()) return a;
  const int cl = l - 1;
  const unsigned top = (eps >> (l - 1)) & 1u;
  const unsigned low = eps & ((1u << (l - 1)) - 1u);
  // a = (num * den) / den^2
  Poly p = pis_one(a.den()) ? a.num() : pmul(a.num(), a.den(), cl);
  Poly q;
  for (std::size_t k = top; k < p.size(); k += 2) q.push_back(square_component(p[k], low));
  trim(q);
  return frac(std::move(q), a.den(), l);
}

Rat Arith::eval_top(const Rat& a, const Rat& r) const {
  const int cl = a.level() - 1;
  if (a.is_zero()) return zero(cl);
  Rat d = peval(a.den(), r, cl);
  if (d.is_zero()) throw Error("evaluation at a pole");
  return div(peval(a.num(), r, cl), d);
}

Rat Arith::frob_constants(const Rat& a, int s) const {
  if (a.level() == 0) {
    Rat r;
    r.c_ = a.c_;
    for (int i = 0; i < s; ++i) r.c_ = gf_->sqr(r.c_);
    return r;
  }
  if (a.is_zero()) return a;
  Poly n, d;
  for (const auto& c : a.num()) n.push_back(frob_constants(c, s));
  for (const auto& c : a.den()) d.push_back(frob_constants(c, s));
  return frac(std::move(n), std::move(d), a.level());
}

std::pair<MPoly, MPoly> Arith::flatten(const Rat& a) const {
  const int l = a.level();
  if (l > 2) throw Error("flatten: only levels <= 2");
  std::vector<int> zero_exp(l, 0);
  if (a.is_zero()) return {MPoly{}, MPoly{{zero_exp, 1}}};
  if (l == 0) return {MPoly{{zero_exp, a.c_}}, MPoly{{zero_exp, 1}}};
  if (l == 1) {
    MPoly n, d;
    for (std::size_t i = 0; i < a.num().size(); ++i)
      if (!a.num()[i].is_zero()) n[{static_cast<int>(i)}] = a.num()[i].c_;
    for (std::size_t i = 0; i < a.den().size(); ++i)
      if (!a.den()[i].is_zero()) d[{static_cast<int>(i)}] = a.den()[i].c_;
    return {n, d};
  }
  // Level 2: clear the k(t1)-denominators of all coefficients.
  Poly lcm{one(0)};
  for (const Poly* p : {&a.num(), &a.den()})
    for (const auto& c : *p) {
      if (c.is_zero()) continue;
      Poly g = pgcd(lcm, c.den(), 0);
      lcm = pmul(pdiv_exact(lcm, g, 0), c.den(), 0);
    }
  auto conv = [&](const Poly& p) {
    MPoly out;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i].is_zero()) continue;
      Poly c = pmul(p[i].num(), pdiv_exact(lcm, p[i].den(), 0), 0);
      for (std::size_t k = 0; k < c.size(); ++k)
        if (!c[k].is_zero()) out[{static_cast<int>(k), static_cast<int>(i)}] = c[k].c_;
    }
    return out;
  };
  return {conv(a.num()), conv(a.den())};
}

namespace {

std::string format_mpoly(const GF2m& gf, const MPoly& p, const std::vector<std::string>& vars) {
  if (p.empty()) return "0";
  std::vector<std::pair<std::vector<int>, std::uint32_t>> terms(p.begin(), p.end());
  std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) {
    const int dx = std::accumulate(x.first.begin(), x.first.end(), 0);
    const int dy = std::accumulate(y.first.begin(), y.first.end(), 0);
    if (dx != dy) return dx > dy;
    return x.first > y.first;
  });
  std::string s;
  for (const auto& [e, c] : terms) {
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += vars[i];
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    std::string coef = gf.format(c);
    const bool compound = coef.find('+') != std::string::npos;
    std::string term;
    if (mono.empty())
      term = compound ? "(" + coef + ")" : coef;
    else if (c == 1)
      term = mono;
    else
      term = (compound ? "(" + coef + ")" : coef) + "*" + mono;
    if (!s.empty()) s += " + ";
    s += term;
  }
  return s;
}

}  // namespace

std::string Arith::format(const Rat& a, const std::vector<std::string>& vars) const {
  const int l = a.level();
  if (l <= 2) {
    auto [n, d] = flatten(a);
    std::vector<std::string> v(vars.begin(), vars.begin() + l);
    std::string ns = format_mpoly(*gf_, n, v);
    const bool d_one = d.size() == 1 && d.begin()->second == 1 &&
                       std::all_of(d.begin()->first.begin(), d.begin()->first.end(),
                                   [](int e) { return e == 0; });
    if (d_one) return ns;
    const bool n_atom = n.size() == 1;
    return (n_atom ? ns : "(" + ns + ")") + "/(" + format_mpoly(*gf_, d, v) + ")";
  }
  // Nested presentation for deeper towers.
  if (a.is_zero()) return "0";
  auto fp = [&](const Poly& p) {
    std::string s;
    for (std::size_t i = p.size(); i-- > 0;) {
      if (p[i].is_zero()) continue;
      if (!s.empty()) s += " + ";
      std::string c = format(p[i], vars);
      std::string mono = i == 0 ? "" : vars[l - 1] + (i > 1 ? "^" + std::to_string(i) : "");
      if (mono.empty())
        s += "(" + c + ")";
      else if (is_one(p[i]))
        s += mono;
      else
        s += "(" + c + ")*" + mono;
    }
    return s;
  };
  if (pis_one(a.den())) return fp(a.num());
  return "(" + fp(a.num()) + ")/(" + fp(a.den()) + ")";
}

int Arith::height(const Rat& a) const {
  if (a.level() == 0 || a.is_zero()) return 0;
  int h = 0;
  for (const Poly* p : {&a.num(), &a.den()})
    for (std::size_t i = 0; i < p->size(); ++i)
      if (!(*p)[i].is_zero()) h = std::max(h, static_cast<int>(i) + height((*p)[i]));
  return h;
}

}  // namespace kmd
