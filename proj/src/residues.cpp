#include "kmd/residues.hpp"

#include "kmd/error.hpp"

namespace kmd {

namespace {

Elem chosen_uniformizer(const Place& P, const std::optional<Elem>& pi) {
  if (!P.supported()) throw Unsupported("residue field of " + P.name() + " is not supported");
  if (!pi) return uniformizer(P);
  if (pi->is_zero() || valuation(*pi, P) != 1) throw Error("not a uniformizer at " + P.name());
  return *pi;
}

// x = pi^v u; returns v and the residue of u.
int unit_residue(const Elem& x, const Place& P, const Elem& pi, Elem& ubar) {
  if (x.is_zero()) throw Error("zero entry has no residue");
  const int v = valuation(x, P);
  ubar = reduce(x / pow(pi, v), P);
  return v;
}

QForm residue_pairs(const QForm& q, const Place& P, const std::optional<Elem>& pi0, bool odd_only) {
  if (!q.quasi.empty()) throw Error("residues need a nonsingular form");
  const Elem pi = chosen_uniformizer(P, pi0);
  QForm r = make_qform(P.residue, {});
  for (const auto& p : q.pairs) {
    if (!p.b.is_zero() && valuation(p.b, P) < 0)
      throw Error("not in W_q(L)' at " + P.name() + ": " + to_string(p.b) + " has a pole");
    Elem ubar;
    const int v = unit_residue(p.a, P, pi, ubar);
    if (odd_only && v % 2 == 0) continue;
    r.pairs.push_back({ubar, p.b.is_zero() ? zero(P.residue) : reduce(p.b, P)});
  }
  return r;
}

CohClass symbol_residue(const CohClass& c, const Place& P, const std::optional<Elem>& pi0, bool xi) {
  const Elem pi = chosen_uniformizer(P, pi0);
  const int p = c.rep.degree;
  if (xi && p < 1) throw Error("xi needs a class of degree at least 1");
  std::vector<Symbol> out;
  for (const auto& s : presentation(c)) {
    Elem b = as_reduce(s.b, P);
    if (!b.is_zero() && valuation(b, P) < 0)
      throw Error("not residue-ready at " + P.name() + ": coefficient keeps a pole");
    std::vector<Elem> slots = s.slots;
    int odd = -1;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (valuation(slots[i], P) % 2 == 0) continue;
      if (odd < 0)
        odd = static_cast<int>(i);
      else
        slots[i] = slots[i] * slots[odd];
    }
    if (b.is_zero()) continue;
    Symbol r{reduce(b, P), {}};
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (xi && static_cast<int>(i) == odd) continue;
      Elem ubar;
      unit_residue(slots[i], P, pi, ubar);
      r.slots.push_back(ubar);
    }
    if (xi && odd < 0) continue;
    out.push_back(r);
  }
  return class_of_symbols(P.residue, xi ? p - 1 : p, out);
}

}  // namespace

BilForm residue_bil(const BilForm& B, const Place& P, int which, const std::optional<Elem>& pi0) {
  if (which != 1 && which != 2) throw Error("residue index must be 1 or 2");
  const Elem pi = chosen_uniformizer(P, pi0);
  BilForm r{P.residue, {}};
  for (const auto& a : B.entries) {
    Elem ubar;
    const int v = unit_residue(a, P, pi, ubar);
    if ((v % 2 != 0) == (which == 2)) r.entries.push_back(ubar);
  }
  return r;
}

QForm residue_delta(const QForm& q, const Place& P, const std::optional<Elem>& pi) {
  return residue_pairs(q, P, pi, true);
}

QForm residue_Delta(const QForm& q, const Place& P, const std::optional<Elem>& pi) {
  return residue_pairs(q, P, pi, false);
}

QForm residue_quad(const QForm& q, const Place& P, const std::string& kind, const std::optional<Elem>& pi) {
  if (kind == "delta") return residue_delta(q, P, pi);
  if (kind == "Delta") return residue_Delta(q, P, pi);
  throw Error("unknown residue kind " + kind);
}

QForm residue_ready(const QForm& q, const Place& P) {
  QForm r = q;
  r.level_tag.reset();
  r.witness.clear();
  for (auto& p : r.pairs) {
    if (p.b.is_zero()) continue;
    p.b = as_reduce(p.b, P);
    if (!p.b.is_zero() && valuation(p.b, P) < 0)
      throw Error("not in W_q(L)' at " + P.name() + ": " + to_string(p.b) + " has an odd pole");
  }
  return r;
}

CohClass residue_xi(const CohClass& c, const Place& P, const std::optional<Elem>& pi) {
  return symbol_residue(c, P, pi, true);
}

CohClass residue_chi(const CohClass& c, const Place& P, const std::optional<Elem>& pi) {
  return symbol_residue(c, P, pi, false);
}

CohClass residue_h3(const CohClass& c, const Place& P, const std::string& kind, const std::optional<Elem>& pi) {
  if (kind == "xi") return residue_xi(c, P, pi);
  if (kind == "chi") return residue_chi(c, P, pi);
  throw Error("unknown residue kind " + kind);
}

}  // namespace kmd
