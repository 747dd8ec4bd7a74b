#pragma once

#include <utility>
#include <vector>

#include "kmd/gf2m.hpp"

namespace kmd {

/// Dense polynomial over GF(2^m), lowest degree first, trimmed.
using GFPoly = std::vector<GF2m::Value>;

namespace gfp {

void trim(GFPoly& p);
int deg(const GFPoly& p);
GFPoly add(const GFPoly& a, const GFPoly& b);
GFPoly mul(const GF2m& f, const GFPoly& a, const GFPoly& b);
void divmod(const GF2m& f, const GFPoly& a, const GFPoly& b, GFPoly& q, GFPoly& r);
GFPoly mod(const GF2m& f, const GFPoly& a, const GFPoly& b);
GFPoly monic(const GF2m& f, const GFPoly& a);
GFPoly gcd(const GF2m& f, GFPoly a, GFPoly b);
GFPoly deriv(const GFPoly& a);
GF2m::Value eval(const GF2m& f, const GFPoly& a, GF2m::Value x);
/// a^(2^s) mod m.
GFPoly frob_mod(const GF2m& f, GFPoly a, int s, const GFPoly& m);
/// Inverse of a modulo m (gcd must be 1).
GFPoly inv_mod(const GF2m& f, const GFPoly& a, const GFPoly& m);

/// Monic irreducible factors with multiplicity, sorted by degree then
/// coefficients. The leading coefficient of p is returned in `unit`.
std::vector<std::pair<GFPoly, int>> factor(const GF2m& f, const GFPoly& p, GF2m::Value& unit);
bool is_irreducible(const GF2m& f, const GFPoly& p);
/// Distinct roots in increasing value order.
std::vector<GF2m::Value> roots(const GF2m& f, const GFPoly& p);

/// Image of the generator g of GF(2^k) in GF(2^K), k | K: the smallest root
/// of the defining polynomial of GF(2^k).
GF2m::Value embed_generator(int k, int K);
/// Map c in GF(2^k) into GF(2^K) given the generator image.
GF2m::Value embed_value(const GF2m& big, GF2m::Value c, GF2m::Value gen_image);

}  // namespace gfp
}  // namespace kmd
