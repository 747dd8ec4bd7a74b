#include "kmd/gf2m.hpp"

#include <map>
#include <mutex>

#include "kmd/error.hpp"

namespace kmd {

namespace {

int bit_degree(std::uint64_t p) {
  int d = -1;
  while (p) {
    ++d;
    p >>= 1;
  }
  return d;
}

std::uint64_t bitpoly_mod(std::uint64_t a, std::uint64_t m) {
  const int dm = bit_degree(m);
  for (int d = bit_degree(a); d >= dm; d = bit_degree(a)) a ^= m << (d - dm);
  return a;
}

std::uint64_t bitpoly_mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  std::uint64_t r = 0;
  a = bitpoly_mod(a, m);
  const int dm = bit_degree(m);
  while (b) {
    if (b & 1) r ^= a;
    b >>= 1;
    a <<= 1;
    if (bit_degree(a) == dm) a ^= m;
  }
  return r;
}

std::uint64_t bitpoly_gcd(std::uint64_t a, std::uint64_t b) {
  while (b) {
    a = bitpoly_mod(a, b);
    std::swap(a, b);
  }
  return a;
}

}  // namespace

bool gf2_poly_irreducible(std::uint64_t poly) {
  // Rabin-style test: x^(2^n) = x mod p and gcd(x^(2^(n/q)) - x, p) = 1.
  const int n = bit_degree(poly);
  if (n <= 0) return false;
  if (n == 1) return true;
  auto frob_iter = [&](int k) {
    std::uint64_t x = 2;
    for (int i = 0; i < k; ++i) x = bitpoly_mulmod(x, x, poly);
    return x;
  };
  if (frob_iter(n) != bitpoly_mod(2, poly)) return false;
  for (int q = 2; q <= n; ++q) {
    if (n % q != 0) continue;
    bool prime = true;
    for (int r = 2; r * r <= q; ++r)
      if (q % r == 0) prime = false;
    if (!prime) continue;
    if (bitpoly_gcd(poly, frob_iter(n / q) ^ 2) != 1) return false;
  }
  return true;
}

GF2m::GF2m(int degree) : m_(degree) {
  if (degree < 1 || degree > 24) throw Error("GF(2^m): degree out of range 1..24");
  std::uint64_t p = std::uint64_t{1} << degree;
  for (std::uint64_t low = 1; low < p; low += 2) {
    if (gf2_poly_irreducible(p | low)) {
      modulus_ = static_cast<std::uint32_t>(p | low);
      break;
    }
  }
  if (m_ <= 16) {
    // Find a primitive element by trial and build log tables.
    const std::uint32_t n = (1u << m_) - 1;
    for (Value g = 2; g <= n || n == 1; ++g) {
      std::vector<std::uint32_t> ex(n), lg(n + 1, 0);
      Value x = 1;
      bool ok = true;
      for (std::uint32_t i = 0; i < n; ++i) {
        if (i > 0 && x == 1) {
          ok = false;
          break;
        }
        ex[i] = x;
        lg[x] = i;
        x = mul_slow(x, n == 1 ? 1 : g);
      }
      if (ok) {
        exp_ = std::move(ex);
        log_ = std::move(lg);
        break;
      }
      if (n == 1) break;
    }
  }
}

std::shared_ptr<const GF2m> GF2m::get(int degree) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const GF2m>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[degree];
  if (!slot) slot = std::make_shared<const GF2m>(degree);
  return slot;
}

GF2m::Value GF2m::mul_slow(Value a, Value b) const {
  return static_cast<Value>(bitpoly_mulmod(a, b, modulus_));
}

GF2m::Value GF2m::mul(Value a, Value b) const {
  if (a == 0 || b == 0) return 0;
  if (!exp_.empty()) {
    const std::uint32_t n = static_cast<std::uint32_t>(exp_.size());
    std::uint32_t e = log_[a] + log_[b];
    if (e >= n) e -= n;
    return exp_[e];
  }
  return mul_slow(a, b);
}

GF2m::Value GF2m::pow(Value a, std::uint64_t e) const {
  Value r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

GF2m::Value GF2m::inv(Value a) const {
  if (a == 0) throw Error("division by zero");
  if (!exp_.empty()) {
    const std::uint32_t n = static_cast<std::uint32_t>(exp_.size());
    return exp_[(n - log_[a]) % n];
  }
  return pow(a, order() - 2);
}

GF2m::Value GF2m::sqrt(Value a) const { return pow(a, order() / 2); }

int GF2m::trace(Value a) const {
  Value t = 0, x = a;
  for (int i = 0; i < m_; ++i) {
    t ^= x;
    x = mul(x, x);
  }
  return static_cast<int>(t & 1);
}

bool GF2m::solve_wp(Value a, Value& root) const {
  if (trace(a) != 0) return false;
  // x -> x^2 + x is GF(2)-linear; eliminate on the basis images, keeping
  // one reduced row per pivot bit.
  std::vector<std::uint32_t> row(m_, 0), pre(m_, 0);
  auto reduce = [&](Value& img, Value& p) {
    for (int b = m_ - 1; b >= 0; --b)
      if (((img >> b) & 1) && row[b]) {
        img ^= row[b];
        p ^= pre[b];
      }
  };
  for (int i = 0; i < m_; ++i) {
    Value x = Value{1} << i;
    Value img = mul(x, x) ^ x, p = x;
    reduce(img, p);
    if (img) {
      const int piv = bit_degree(img);
      row[piv] = img;
      pre[piv] = p;
    }
  }
  Value target = a, p = 0;
  reduce(target, p);
  if (target != 0) return false;
  root = p;
  return true;
}

std::string GF2m::format(Value a) const {
  if (m_ == 1 || a <= 1) return std::to_string(a);
  std::string s;
  for (int i = m_ - 1; i >= 0; --i) {
    if (!((a >> i) & 1)) continue;
    if (!s.empty()) s += "+";
    if (i == 0)
      s += "1";
    else if (i == 1)
      s += "g";
    else
      s += "g^" + std::to_string(i);
  }
  return s;
}

}  // namespace kmd
