#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmd/fields.hpp"

namespace kmd {

using Vec = std::vector<Elem>;

/// The binary form a*[1,b] = a(X^2 + XY + bY^2).
struct QPair {
  Elem a, b;
};

/// <scalar> * <<slots..., b]].
struct PfisterTerm {
  Elem scalar;
  std::vector<Elem> slots;
  Elem b;
};

/// Orthogonal sum of a_i[1,b_i] plus a diagonal quasilinear part. Coordinates
/// are (x_1, y_1, ..., x_m, y_m, z_1, ...).
struct QForm {
  TowerPtr field;
  std::vector<QPair> pairs;
  std::vector<Elem> quasi;
  std::optional<int> level_tag;
  std::vector<PfisterTerm> witness;  // supports level_tag

  int dim() const { return static_cast<int>(2 * pairs.size() + quasi.size()); }
};

/// Diagonal bilinear form <a_1, ..., a_n>.
struct BilForm {
  TowerPtr field;
  std::vector<Elem> entries;
};

/// sum_{i <= j} q[i][j] X_i X_j (only the upper triangle is read).
struct RawQuadratic {
  TowerPtr field;
  int dim = 0;
  std::vector<std::vector<Elem>> q;
};

QForm make_qform(const TowerPtr& F, std::vector<QPair> pairs, std::vector<Elem> quasi = {});
QForm hyperbolic(const TowerPtr& F, int planes);
/// [1,b], the form X^2 + XY + bY^2.
QForm unit_pair(const Elem& b);
QForm orth_sum(const QForm& p, const QForm& q);
QForm scale(const Elem& c, const QForm& q);
/// Base change to a larger tower (e.g. F to K).
QForm extend(const QForm& q, const TowerPtr& K);
Elem qform_value(const QForm& q, const Vec& v);
Elem qform_polar(const QForm& q, const Vec& v, const Vec& w);
RawQuadratic to_raw(const QForm& q);
std::string to_string(const QForm& q);

BilForm bil_pfister(const TowerPtr& F, const std::vector<Elem>& slots);
/// B tensor q.
QForm tensor(const BilForm& B, const QForm& q);
/// <<s_1..s_n>> tensor q, keeping the level tag and witness.
QForm pfister_multiple(const std::vector<Elem>& slots, const QForm& q);
std::string to_string(const BilForm& B);

RawQuadratic make_raw(const TowerPtr& F, int dim);
Elem raw_value(const RawQuadratic& r, const Vec& v);
Elem raw_polar(const RawQuadratic& r, const Vec& v, const Vec& w);

/// Elementary basis operation on the working vectors of normalize:
/// add: v_i += c v_j; scale: v_i *= c; swap: v_i <-> v_j.
struct ChainStep {
  enum class Kind { add, scale, swap } kind;
  int i = 0, j = 0;
  Elem c;
};

struct Normalization {
  QForm form;
  std::vector<ChainStep> chain;
  /// Positions of the working vectors that carry e_1, f_1, ..., then quasi.
  std::vector<int> order;
  bool degenerate = false;  // isotropic radical directions were dropped
  int dropped = 0;
};

Normalization normalize(const RawQuadratic& r);
/// Replays the chain on the standard basis and checks that the raw form in
/// the resulting basis is exactly the canonical one.
bool verify_normalization(const RawQuadratic& r, const Normalization& n);

/// Representative of the Arf invariant, sum of b_i. Throws with a quasilinear part.
Elem arf(const QForm& q);

struct HyperbolicPair {
  Vec e, f;
};

struct WittResult {
  Verdict verdict = Verdict::undecided;
  /// chain | invariants | arf | residue | local_invariant | finite_field | ...
  std::string method;
  std::vector<HyperbolicPair> chain;
  std::string obstruction;
  std::optional<Place> place;
  std::optional<QForm> residue;  // residue form certified nontrivial
  std::vector<std::string> diagnostics;
};

struct WittOptions {
  int search_degree = 1;     // isotropy search bound used while splitting
  int lower_degree = 1;      // bound for variables below the top one
  long budget = 200000;      // per isotropy search
  bool use_residues = true;
};

/// Q(e)=Q(f)=0, b(e_i,f_j)=delta_ij, other pairings zero, half-dimensional.
bool verify_chain(const QForm& q, const std::vector<HyperbolicPair>& chain);
WittResult witt_trivial(const QForm& q, const WittOptions& opt = {});
/// Witt-equivalence test via witt_trivial(p + q).
WittResult witt_equal(const QForm& p, const QForm& q, const WittOptions& opt = {});

struct IsotropyOptions {
  int lower_degree = 1;
  long budget = 5000000;
};
/// Nonzero v with q(v) = 0 and every coordinate a polynomial of degree
/// <= degree_bound in the top variable (and <= lower_degree below), or none.
/// The enumeration-order-minimal vector is returned.
std::optional<Vec> isotropy_search(const QForm& q, int degree_bound, const IsotropyOptions& opt = {});

/// Trace transfer of a form over K = F[alpha] to F, coordinates ordered
/// (z_1 = u_1 + alpha v_1, ...) -> (u_1, v_1, ...).
RawQuadratic transfer_raw(const QForm& q);
QForm transfer(const QForm& q);

QForm pfister(const std::vector<Elem>& slots, const Elem& b);
/// Whether q is a Pfister form (single unit-scalar witness term).
bool is_pfister(const QForm& q);

struct Represents {
  Verdict verdict = Verdict::undecided;
  std::optional<Elem> norm_preimage;
  WittResult detail;
};
Represents represents(const QForm& pf, const Elem& c, const WittOptions& opt = {});

/// Level-1 witness for an Arf-trivial form: terms <<a_i, b_i]].
std::vector<PfisterTerm> arf_trivial_witness(const QForm& q);
/// The form described by a witness.
QForm witness_form(const TowerPtr& F, const std::vector<PfisterTerm>& terms);

/// Square-class components x = sum_eps x_eps^2 t^eps (2^n entries).
std::vector<Elem> square_components(const Elem& x);
/// Square root if x is a square.
std::optional<Elem> sqrt_if_square(const Elem& x);

}  // namespace kmd
