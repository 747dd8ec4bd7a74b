#include "kmd/gfpoly.hpp"

#include <algorithm>
#include <random>

#include "kmd/error.hpp"

namespace kmd::gfp {

using V = GF2m::Value;

void trim(GFPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

int deg(const GFPoly& p) { return static_cast<int>(p.size()) - 1; }

GFPoly add(const GFPoly& a, const GFPoly& b) {
  GFPoly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] ^= a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] ^= b[i];
  trim(r);
  return r;
}

GFPoly mul(const GF2m& f, const GFPoly& a, const GFPoly& b) {
  if (a.empty() || b.empty()) return {};
  GFPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] ^= f.mul(a[i], b[j]);
  }
  trim(r);
  return r;
}

void divmod(const GF2m& f, const GFPoly& a, const GFPoly& b, GFPoly& q, GFPoly& r) {
  if (b.empty()) throw Error("polynomial division by zero");
  r = a;
  trim(r);
  q.clear();
  if (r.size() < b.size()) return;
  q.assign(r.size() - b.size() + 1, 0);
  const V li = f.inv(b.back());
  while (r.size() >= b.size()) {
    const std::size_t s = r.size() - b.size();
    const V c = f.mul(r.back(), li);
    q[s] = c;
    for (std::size_t j = 0; j < b.size(); ++j) r[s + j] ^= f.mul(c, b[j]);
    trim(r);
  }
  trim(q);
}

GFPoly mod(const GF2m& f, const GFPoly& a, const GFPoly& b) {
  GFPoly q, r;
  divmod(f, a, b, q, r);
  return r;
}

GFPoly monic(const GF2m& f, const GFPoly& a) {
  if (a.empty() || a.back() == 1) return a;
  const V li = f.inv(a.back());
  GFPoly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = f.mul(a[i], li);
  return r;
}

GFPoly gcd(const GF2m& f, GFPoly a, GFPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    GFPoly r = mod(f, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(f, a);
}

GFPoly deriv(const GFPoly& a) {
  GFPoly r;
  for (std::size_t i = 1; i < a.size(); ++i) r.push_back(i % 2 ? a[i] : 0);
  trim(r);
  return r;
}

V eval(const GF2m& f, const GFPoly& a, V x) {
  V r = 0;
  for (std::size_t i = a.size(); i-- > 0;) r = f.mul(r, x) ^ a[i];
  return r;
}

GFPoly frob_mod(const GF2m& f, GFPoly a, int s, const GFPoly& m) {
  a = mod(f, a, m);
  for (int i = 0; i < s; ++i) a = mod(f, mul(f, a, a), m);
  return a;
}

GFPoly inv_mod(const GF2m& f, const GFPoly& a, const GFPoly& m) {
  // Extended Euclid keeping only the coefficient of a.
  GFPoly r0 = m, r1 = mod(f, a, m), s0, s1{1};
  while (!r1.empty()) {
    GFPoly q, r;
    divmod(f, r0, r1, q, r);
    GFPoly s = add(s0, mul(f, q, s1));
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s);
  }
  if (r0.size() != 1) throw Error("internal: inverse modulo a non-coprime polynomial");
  const V c = f.inv(r0[0]);
  for (auto& x : s0) x = f.mul(x, c);
  return mod(f, s0, m);
}

namespace {

// Square root of a polynomial whose odd coefficients vanish.
GFPoly poly_sqrt(const GF2m& f, const GFPoly& a) {
  GFPoly r;
  for (std::size_t i = 0; i < a.size(); i += 2) r.push_back(f.sqrt(a[i]));
  trim(r);
  return r;
}

// Square-free decomposition: returns (factor, multiplicity) with monic,
// square-free, pairwise coprime factors.
void squarefree(const GF2m& f, const GFPoly& a, int mult, std::vector<std::pair<GFPoly, int>>& out) {
  if (deg(a) < 1) return;
  GFPoly d = deriv(a);
  if (d.empty()) {
    squarefree(f, poly_sqrt(f, a), mult * 2, out);
    return;
  }
  GFPoly c = gcd(f, a, d);
  GFPoly w, rem;
  divmod(f, a, c, w, rem);
  int i = 1;
  while (deg(w) >= 1) {
    GFPoly y = gcd(f, w, c);
    GFPoly z;
    divmod(f, w, y, z, rem);
    if (deg(z) >= 1) out.push_back({monic(f, z), i * mult});
    ++i;
    w = y;
    divmod(f, c, y, c, rem);
  }
  if (deg(c) >= 1) squarefree(f, poly_sqrt(f, c), mult * 2, out);
}

// Equal-degree splitting of a monic square-free product of irreducibles of
// degree d, by the trace map.
void edf(const GF2m& f, const GFPoly& a, int d, std::mt19937_64& rng, std::vector<GFPoly>& out) {
  if (deg(a) == d) {
    out.push_back(a);
    return;
  }
  const int m = f.degree();
  for (;;) {
    GFPoly r(deg(a));
    for (auto& x : r) x = static_cast<V>(rng() % f.order());
    trim(r);
    if (deg(r) < 1) continue;
    GFPoly t = r, p = r;
    for (int i = 1; i < m * d; ++i) {
      p = mod(f, mul(f, p, p), a);
      t = add(t, p);
    }
    GFPoly g = gcd(f, a, t);
    if (deg(g) >= 1 && deg(g) < deg(a)) {
      GFPoly h, rem;
      divmod(f, a, g, h, rem);
      edf(f, g, d, rng, out);
      edf(f, monic(f, h), d, rng, out);
      return;
    }
  }
}

// Distinct-degree factorization of a monic square-free polynomial.
std::vector<std::pair<GFPoly, int>> ddf(const GF2m& f, GFPoly a) {
  std::vector<std::pair<GFPoly, int>> out;
  const int m = f.degree();
  GFPoly h{0, 1};
  for (int d = 1; 2 * d <= deg(a); ++d) {
    h = frob_mod(f, h, m, a);
    GFPoly g = gcd(f, a, add(h, GFPoly{0, 1}));
    if (deg(g) >= 1) {
      out.push_back({g, d});
      GFPoly q, r;
      divmod(f, a, g, q, r);
      a = q;
      h = mod(f, h, a);
    }
  }
  if (deg(a) >= 1) out.push_back({monic(f, a), deg(a)});
  return out;
}

}  // namespace

std::vector<std::pair<GFPoly, int>> factor(const GF2m& f, const GFPoly& p0, V& unit) {
  GFPoly p = p0;
  trim(p);
  if (p.empty()) throw Error("zero input");
  unit = p.back();
  p = monic(f, p);
  std::vector<std::pair<GFPoly, int>> sqf, out;
  squarefree(f, p, 1, sqf);
  std::mt19937_64 rng(0x6b6d64);
  for (const auto& [s, mult] : sqf) {
    for (const auto& [g, d] : ddf(f, s)) {
      std::vector<GFPoly> parts;
      edf(f, g, d, rng, parts);
      for (auto& q : parts) out.push_back({q, mult});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.first.size() != y.first.size()) return x.first.size() < y.first.size();
    return std::lexicographical_compare(x.first.rbegin(), x.first.rend(), y.first.rbegin(),
                                        y.first.rend());
  });
  // Merge equal factors coming from different square-free layers.
  std::vector<std::pair<GFPoly, int>> merged;
  for (auto& e : out) {
    if (!merged.empty() && merged.back().first == e.first)
      merged.back().second += e.second;
    else
      merged.push_back(e);
  }
  return merged;
}

bool is_irreducible(const GF2m& f, const GFPoly& p) {
  if (deg(p) < 1) return false;
  V unit;
  auto fs = factor(f, p, unit);
  return fs.size() == 1 && fs[0].second == 1;
}

std::vector<V> roots(const GF2m& f, const GFPoly& p0) {
  GFPoly p = p0;
  trim(p);
  if (p.empty()) throw Error("zero input");
  std::vector<V> out;
  if (deg(p) < 1) return out;
  p = monic(f, p);
  // Restrict to the product of distinct linear factors: gcd(p, x^q - x).
  GFPoly h = frob_mod(f, GFPoly{0, 1}, f.degree(), p);
  GFPoly g = gcd(f, p, add(h, GFPoly{0, 1}));
  if (deg(g) < 1) return out;
  std::mt19937_64 rng(0x726f6f74);
  std::vector<GFPoly> lin;
  edf(f, g, 1, rng, lin);
  for (const auto& l : lin) out.push_back(l[0]);
  std::sort(out.begin(), out.end());
  return out;
}

V embed_generator(int k, int K) {
  if (K % k != 0) throw Error("internal: not a subfield");
  auto small = GF2m::get(k);
  auto big = GF2m::get(K);
  if (k == 1) return 1;
  GFPoly m;
  for (int i = 0; i <= k; ++i) m.push_back((small->modulus() >> i) & 1u);
  auto rs = roots(*big, m);
  if (rs.empty()) throw Error("internal: subfield embedding failed");
  return rs.front();
}

V embed_value(const GF2m& big, V c, V gen_image) {
  V r = 0, p = 1;
  for (int i = 0; c >> i; ++i) {
    if ((c >> i) & 1u) r ^= p;
    p = big.mul(p, gen_image);
  }
  return r;
}

}  // namespace kmd::gfp
