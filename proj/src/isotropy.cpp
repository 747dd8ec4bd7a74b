#include <algorithm>
#include <cmath>
#include <cstdint>

#include "kmd/error.hpp"
#include "kmd/forms.hpp"

namespace kmd {

namespace {

std::uint64_t mix(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

std::uint64_t hash_rat(const Rat& r) {
  if (r.level() == 0) return mix(r.base_value() + 0x51ULL);
  if (r.is_zero()) return mix(0x7a11ULL + r.level());
  std::uint64_t h = mix(r.level());
  for (const auto& c : r.num()) h = mix(h * 31 + hash_rat(c));
  h = mix(h ^ 0x2f2fULL);
  for (const auto& c : r.den()) h = mix(h * 37 + hash_rat(c));
  return h;
}

std::uint64_t hash_elem(const Elem& x) { return mix(hash_rat(x.w0()) * 3 + hash_rat(x.w1())); }

std::vector<Rat> base_candidates(const TowerPtr& F, int top, int lower, double budget) {
  const Arith& A = F->arith();
  std::vector<Rat> cur;
  for (std::uint32_t c = 0; c < A.gf().order(); ++c) cur.push_back(A.constant(c, 0));
  for (int l = 1; l <= F->n(); ++l) {
    const int deg = l == F->n() ? top : lower;
    const double count = std::pow(static_cast<double>(cur.size()), deg + 1);
    if (count > budget)
      throw Error("isotropy search budget exceeded: " + std::to_string(static_cast<long long>(count)) +
                  " coordinate candidates");
    std::vector<Rat> next;
    const std::size_t base = cur.size();
    for (long idx = 0; idx < static_cast<long>(count); ++idx) {
      Poly p;
      long r = idx;
      for (int i = 0; i <= deg; ++i) {
        p.push_back(cur[r % base]);
        r /= static_cast<long>(base);
      }
      while (!p.empty() && p.back().is_zero()) p.pop_back();
      next.push_back(A.from_poly(p, l));
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

std::optional<Vec> isotropy_search(const QForm& q, int degree_bound, const IsotropyOptions& opt) {
  if (degree_bound < 0) throw Error("degree bound must be nonnegative");
  const TowerPtr& T = q.field;
  const double budget = static_cast<double>(opt.budget);
  std::vector<Elem> S;
  {
    auto base = base_candidates(base_field(T), degree_bound, opt.lower_degree, budget);
    if (T->has_ext) {
      if (static_cast<double>(base.size()) * base.size() > budget)
        throw Error("isotropy search budget exceeded");
      for (const auto& v : base)
        for (const auto& u : base) S.push_back(Elem(T, u, v));
    } else {
      for (const auto& u : base) S.push_back(Elem(T, u));
    }
  }
  const long ns = static_cast<long>(S.size());

  // Blocks: each pair (2 coordinates) or quasi entry (1 coordinate); the
  // form is additive over blocks.
  struct Block {
    int first, width;
    std::vector<Elem> table;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < q.pairs.size(); ++i) blocks.push_back({static_cast<int>(2 * i), 2, {}});
  for (std::size_t j = 0; j < q.quasi.size(); ++j)
    blocks.push_back({static_cast<int>(2 * q.pairs.size() + j), 1, {}});
  if (blocks.empty()) return std::nullopt;

  int total = q.dim(), h = 0, acc = 0;
  while (h < static_cast<int>(blocks.size()) && 2 * acc < total) acc += blocks[h++].width;
  auto half_size = [&](int lo, int hi) {
    double s = 1;
    for (int b = lo; b < hi; ++b) s *= std::pow(static_cast<double>(ns), blocks[b].width);
    return s;
  };
  double work = half_size(0, h) + half_size(h, static_cast<int>(blocks.size()));
  for (const auto& b : blocks) work += std::pow(static_cast<double>(ns), b.width);
  if (work > budget)
    throw Error("isotropy search budget exceeded: " + std::to_string(static_cast<long long>(work)) +
                " > " + std::to_string(opt.budget));

  std::vector<Elem> squares;
  for (const auto& s : S) squares.push_back(s * s);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Block& B = blocks[b];
    if (B.width == 2) {
      const QPair& p = q.pairs[b];
      std::vector<Elem> bys;
      for (long j = 0; j < ns; ++j) bys.push_back(p.b * squares[j]);
      B.table.reserve(ns * ns);
      for (long j = 0; j < ns; ++j)
        for (long i = 0; i < ns; ++i) B.table.push_back(p.a * (squares[i] + S[i] * S[j] + bys[j]));
    } else {
      const Elem& c = q.quasi[b - q.pairs.size()];
      for (long i = 0; i < ns; ++i) B.table.push_back(c * squares[i]);
    }
  }

  // Mixed-radix index over a range of blocks, first block least significant.
  auto value_of = [&](int lo, int hi, long idx) {
    Elem s = zero(T);
    for (int b = lo; b < hi; ++b) {
      const long sz = static_cast<long>(blocks[b].table.size());
      const Elem& v = blocks[b].table[idx % sz];
      if (!v.is_zero()) s = s + v;
      idx /= sz;
    }
    return s;
  };
  const int nb = static_cast<int>(blocks.size());
  const long n1 = static_cast<long>(half_size(0, h));
  const long n2 = static_cast<long>(half_size(h, nb));

  std::vector<std::pair<std::uint64_t, long>> index;
  index.reserve(n1);
  for (long i = 0; i < n1; ++i) index.push_back({hash_elem(value_of(0, h, i)), i});
  std::sort(index.begin(), index.end());

  auto build = [&](long i1, long i2) {
    Vec v(q.dim(), zero(T));
    auto fill = [&](int lo, int hi, long idx) {
      for (int b = lo; b < hi; ++b) {
        const Block& B = blocks[b];
        long sub = idx % static_cast<long>(B.table.size());
        idx /= static_cast<long>(B.table.size());
        v[B.first] = S[sub % ns];
        if (B.width == 2) v[B.first + 1] = S[sub / ns];
      }
    };
    fill(0, h, i1);
    fill(h, nb, i2);
    return v;
  };

  for (long i2 = 0; i2 < n2; ++i2) {
    const Elem v2 = value_of(h, nb, i2);
    const std::uint64_t hv = hash_elem(v2);
    auto it = std::lower_bound(index.begin(), index.end(), std::make_pair(hv, 0L));
    for (; it != index.end() && it->first == hv; ++it) {
      if (i2 == 0 && it->second == 0) continue;
      if (value_of(0, h, it->second) == v2) return build(it->second, i2);
    }
  }
  return std::nullopt;
}

}  // namespace kmd
