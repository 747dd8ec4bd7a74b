#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmd/fields.hpp"
#include "kmd/forms.hpp"
#include "kmd/kato.hpp"

namespace kmd {

/// [a, b): i^2 + i = a, j^2 = b, j i j^-1 = i + 1.
struct QuatSymbol {
  Elem a, b;
};

QuatSymbol make_quat(const Elem& a, const Elem& b);

struct BiquatAlg {
  QuatSymbol q1, q2;
  const TowerPtr& field() const { return q1.a.tower(); }
};

BiquatAlg make_biquat(const QuatSymbol& q1, const QuatSymbol& q2);
BiquatAlg extend(const BiquatAlg& B, const TowerPtr& K);
std::string to_string(const QuatSymbol& q);
std::string to_string(const BiquatAlg& B);

/// Class of a db/b; the norm form is <<b, a]].
CohClass quat_class(const QuatSymbol& q);
CohClass biquat_class(const BiquatAlg& B);

/// [1, a1 + a2] + b1[1, a1] + b2[1, a2], with a level-1 witness
/// <<b1, a1]] + <<b2, a2]].
QForm albert_form(const BiquatAlg& B);

struct CorZero {
  Verdict verdict = Verdict::undecided;
  std::optional<ZeroTest> omega;  // tr_form route
  std::optional<ZeroTest> forms;  // transfer of the Albert form
  std::vector<std::string> diagnostics;
};

CorZero cor_zero(const BiquatAlg& B);

}  // namespace kmd
