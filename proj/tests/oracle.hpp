#pragma once

#include <cstdint>
#include <vector>

#include "kmd/gf2m.hpp"

namespace kmd::testing {

/// Quadratic form over GF(2^m) as an upper-triangular coefficient matrix on
/// raw field values; decides Witt triviality by exhaustive splitting.
struct FiniteForm {
  const GF2m* f;
  int dim;
  std::vector<std::vector<GF2m::Value>> q;

  GF2m::Value value(const std::vector<GF2m::Value>& v) const {
    GF2m::Value s = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) s ^= f->mul(q[i][j], f->mul(v[i], v[j]));
    return s;
  }
  GF2m::Value polar(const std::vector<GF2m::Value>& v, const std::vector<GF2m::Value>& w) const {
    GF2m::Value s = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) s ^= f->mul(q[i][j], f->mul(v[i], w[j]) ^ f->mul(v[j], w[i]));
    return s;
  }
};

inline bool oracle_witt_trivial(const FiniteForm& F) {
  using V = GF2m::Value;
  const GF2m& f = *F.f;
  const int d = F.dim;
  if (d == 0) return true;
  std::vector<V> v(d, 0);
  bool found = false;
  for (;;) {
    int i = 0;
    while (i < d && ++v[i] == f.order()) v[i++] = 0;
    if (i == d) break;
    if (F.value(v) == 0) {
      found = true;
      break;
    }
  }
  if (!found) return false;
  std::vector<V> w(d, 0);
  for (int i = 0; i < d; ++i) {
    std::vector<V> e(d, 0);
    e[i] = 1;
    V c = F.polar(v, e);
    if (c) {
      w[i] = f.inv(c);
      break;
    }
  }
  const V qw = F.value(w);
  for (int i = 0; i < d; ++i) w[i] ^= f.mul(qw, v[i]);
  // Orthogonal complement of span(v, w), then an independent subset.
  std::vector<std::vector<V>> basis;
  std::vector<std::vector<V>> echelon;
  std::vector<int> piv;
  for (int j = 0; j < d && static_cast<int>(basis.size()) < d - 2; ++j) {
    std::vector<V> e(d, 0);
    e[j] = 1;
    V bw = F.polar(e, w), bv = F.polar(e, v);
    for (int i = 0; i < d; ++i) e[i] ^= f.mul(bw, v[i]) ^ f.mul(bv, w[i]);
    std::vector<V> r = e;
    for (std::size_t k = 0; k < echelon.size(); ++k) {
      V c = r[piv[k]];
      if (!c) continue;
      for (int i = 0; i < d; ++i) r[i] ^= f.mul(c, echelon[k][i]);
    }
    int p = 0;
    while (p < d && !r[p]) ++p;
    if (p == d) continue;
    V ip = f.inv(r[p]);
    for (auto& x : r) x = f.mul(x, ip);
    echelon.push_back(r);
    piv.push_back(p);
    basis.push_back(e);
  }
  FiniteForm G{F.f, d - 2, std::vector<std::vector<V>>(d - 2, std::vector<V>(d - 2, 0))};
  for (int i = 0; i < d - 2; ++i) {
    G.q[i][i] = F.value(basis[i]);
    for (int j = i + 1; j < d - 2; ++j) G.q[i][j] = F.polar(basis[i], basis[j]);
  }
  return oracle_witt_trivial(G);
}

/// sum a_i[1,b_i] as a FiniteForm.
inline FiniteForm finite_pairs(const GF2m& f, const std::vector<std::pair<GF2m::Value, GF2m::Value>>& pairs) {
  const int d = 2 * static_cast<int>(pairs.size());
  FiniteForm F{&f, d, std::vector<std::vector<GF2m::Value>>(d, std::vector<GF2m::Value>(d, 0))};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    F.q[2 * i][2 * i] = pairs[i].first;
    F.q[2 * i][2 * i + 1] = pairs[i].first;
    F.q[2 * i + 1][2 * i + 1] = f.mul(pairs[i].first, pairs[i].second);
  }
  return F;
}

}  // namespace kmd::testing
