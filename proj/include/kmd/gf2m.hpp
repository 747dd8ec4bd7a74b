#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace kmd {

/// The finite field GF(2^m), 1 <= m <= 24, with elements stored as bit
/// vectors (bit i = coefficient of g^i, g a root of the modulus).
///
/// The modulus is the numerically smallest irreducible polynomial of degree
/// m, so every instance of GF(2^m) in the process agrees on coordinates.
class GF2m {
 public:
  using Value = std::uint32_t;

  explicit GF2m(int degree);

  /// Shared canonical instance.
  static std::shared_ptr<const GF2m> get(int degree);

  int degree() const { return m_; }
  std::uint64_t order() const { return std::uint64_t{1} << m_; }
  std::uint32_t modulus() const { return modulus_; }

  Value add(Value a, Value b) const { return a ^ b; }
  Value mul(Value a, Value b) const;
  Value sqr(Value a) const { return mul(a, a); }
  Value inv(Value a) const;
  Value div(Value a, Value b) const { return mul(a, inv(b)); }
  Value pow(Value a, std::uint64_t e) const;
  /// Unique square root (Frobenius is bijective on a finite field).
  Value sqrt(Value a) const;
  /// Absolute trace to GF(2).
  int trace(Value a) const;
  /// Some f with f^2 + f = a, if one exists.
  bool solve_wp(Value a, Value& root) const;

  std::string format(Value a) const;

 private:
  int m_;
  std::uint32_t modulus_;
  std::vector<std::uint32_t> log_, exp_;  // populated for m <= 16
  Value mul_slow(Value a, Value b) const;
};

/// Bit-polynomial irreducibility test over GF(2), used for modulus search.
bool gf2_poly_irreducible(std::uint64_t poly);

}  // namespace kmd
