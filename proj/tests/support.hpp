#pragma once

#include <random>

#include "kmd/fields.hpp"

namespace kmd::testing {

using Rng = std::mt19937_64;

/// Polynomial in all variables with per-variable degree <= deg.
inline Rat random_poly_rat(const Arith& A, Rng& rng, int level, int deg) {
  if (level == 0) return A.constant(static_cast<GF2m::Value>(rng() % A.gf().order()), 0);
  Poly p;
  for (int i = 0; i <= deg; ++i) p.push_back(random_poly_rat(A, rng, level - 1, deg));
  while (!p.empty() && p.back().is_zero()) p.pop_back();
  return A.from_poly(p, level);
}

inline Elem random_poly(const TowerPtr& t, Rng& rng, int deg) {
  TowerPtr F = base_field(t);
  return lift(Elem(F, random_poly_rat(F->arith(), rng, F->n(), deg)), t);
}

inline Elem random_nonzero_poly(const TowerPtr& t, Rng& rng, int deg) {
  for (;;) {
    Elem e = random_poly(t, rng, deg);
    if (!e.is_zero()) return e;
  }
}

/// Quotient of random polynomials (numerator may be zero).
inline Elem random_elem(const TowerPtr& t, Rng& rng, int deg) {
  return random_poly(t, rng, deg) / random_nonzero_poly(t, rng, deg);
}

inline Elem random_nonzero(const TowerPtr& t, Rng& rng, int deg) {
  for (;;) {
    Elem e = random_elem(t, rng, deg);
    if (!e.is_zero()) return e;
  }
}

/// Random element of K = F[alpha] with components of the given degree.
inline Elem random_k_elem(const TowerPtr& K, Rng& rng, int deg, bool polys = false) {
  Elem w0 = polys ? random_poly(K->base, rng, deg) : random_elem(K->base, rng, deg);
  Elem w1 = polys ? random_poly(K->base, rng, deg) : random_elem(K->base, rng, deg);
  return lift(w0, K) + lift(w1, K) * alpha(K);
}

inline Elem random_k_nonzero(const TowerPtr& K, Rng& rng, int deg, bool polys = false) {
  for (;;) {
    Elem e = random_k_elem(K, rng, deg, polys);
    if (!e.is_zero()) return e;
  }
}

}  // namespace kmd::testing
