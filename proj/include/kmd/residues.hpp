#pragma once

#include <optional>
#include <string>

#include "kmd/fields.hpp"
#include "kmd/forms.hpp"
#include "kmd/kato.hpp"

namespace kmd {

/// Second (which = 2) or first (which = 1) residue of a diagonal bilinear
/// form with respect to the uniformizer (default: the place's own).
BilForm residue_bil(const BilForm& B, const Place& P, int which, const std::optional<Elem>& pi = {});

/// delta keeps the pairs whose scalar has odd valuation; Delta keeps all.
/// Every b_i must be integral at P.
QForm residue_delta(const QForm& q, const Place& P, const std::optional<Elem>& pi = {});
QForm residue_Delta(const QForm& q, const Place& P, const std::optional<Elem>& pi = {});

/// kind is "delta" or "Delta".
QForm residue_quad(const QForm& q, const Place& P, const std::string& kind, const std::optional<Elem>& pi = {});

/// Rewrites every b_i by as_reduce at P; throws when a pole survives.
QForm residue_ready(const QForm& q, const Place& P);

/// xi and chi on a class of degree p >= 1 given by symbols; the result has
/// degree p - 1 (xi) or p (chi) over the residue field.
CohClass residue_xi(const CohClass& c, const Place& P, const std::optional<Elem>& pi = {});
CohClass residue_chi(const CohClass& c, const Place& P, const std::optional<Elem>& pi = {});
/// kind is "xi" or "chi".
CohClass residue_h3(const CohClass& c, const Place& P, const std::string& kind, const std::optional<Elem>& pi = {});

}  // namespace kmd
