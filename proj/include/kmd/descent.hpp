#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmd/brauer.hpp"
#include "kmd/forms.hpp"
#include "kmd/kato.hpp"

namespace kmd {

/// lambda = w0 + alpha w1 with w0, w1 polynomials in the top variable of
/// degree <= degree (coefficient degree <= lower_degree below the top).
struct LambdaBounds {
  int degree = 2;
  int lower_degree = 0;
  long budget = 20000;  // candidates tried
  WittOptions witt{0, 0, 200000, true};
};

struct LambdaSearch {
  std::optional<Elem> lambda;
  long tried = 0;
  bool budget_exhausted = false;
  std::string report;
};

/// First lambda in pool order with transfer(lambda phi) Witt-trivial. Pool
/// order: height, then w1 before w0, coefficients in increasing order; the
/// leading coefficient is 1.
LambdaSearch lambda_search(const QForm& phi, const LambdaBounds& bounds = {});

struct Reconstruction {
  QForm phi0;       // over F, [1, d1] + c2[1, d2] + c3[1, d3]
  BiquatAlg B0;     // over F
  Elem lambda;      // (phi0)_K ~ lambda phi
  bool repaired = false;  // Arf fixed by adding wp(alpha) to one slot
};

/// Reads an Albert form over F off lambda phi. Pairs whose scalar is not in F
/// are rescaled by values of [1, d] up to `bound`.
std::optional<Reconstruction> reconstruct(const Elem& lambda, const QForm& phi, int bound = 2,
                                          std::string* note = nullptr);

enum class DescentVerdict { descends, no_descent_certified, unknown };
std::string to_string(DescentVerdict v);

struct DescentReport {
  BiquatAlg input;
  CorZero cor_check;
  QForm phi;
  QForm tr_phi;
  std::optional<CohClass> e3_rep;
  std::string e3_note;
  DescentVerdict verdict = DescentVerdict::unknown;
  std::optional<Elem> certificate;
  std::optional<WittResult> certificate_check;
  std::optional<Reconstruction> reconstructed;
  std::string reconstruction_note;
  LambdaBounds search_budget;
  long lambdas_tried = 0;
  std::vector<std::string> diagnostics;
};

/// Transfer of the Albert form with its I^2 witness when both Kummer slots
/// lie in F; otherwise without one (reason in note).
QForm albert_transfer(const BiquatAlg& B, std::string* note = nullptr);

DescentReport delta_decide(const BiquatAlg& B, const LambdaBounds& bounds = {}, int reconstruct_bound = 2);

struct ScaleIdentity {
  Verdict verdict = Verdict::undecided;
  std::string status;                 // holds | violated | inconclusive
  std::optional<ZeroTest> difference;  // H^3 difference of both sides
  std::vector<ZeroTest> level_one;     // per factor: e(Tr <<lambda, a_j]]) - Tr(a_j dlog lambda)
  std::vector<std::string> diagnostics;
};

/// e3(Tr phi) = e3(Tr lambda phi) + Tr(dlog lambda ^ [B]) for phi = albert_form(B).
ScaleIdentity scale_identity_check(const BiquatAlg& B, const Elem& lambda);

struct PlaceNote {
  std::string place;
  bool supported = false;
};

struct InjectionReport {
  bool t_divides_f = false;
  CohClass z, xi, chi;
  std::optional<ZeroTest> xi_formula;  // xi(z) against its closed form
  std::optional<ZeroTest> xi_zero;
  std::optional<Represents> norm_condition;  // case (i)
  std::optional<ZeroTest> c_condition;       // case (ii)
  std::optional<ZeroTest> w_condition;
  std::vector<PlaceNote> places;
  int unsupported = 0;
  Verdict verdict = Verdict::undecided;  // yes: conclusions reproduced
  std::vector<std::string> diagnostics;
};

/// z = (c + a dt/t) ^ df/f over L = F(t), t the top variable of f's field;
/// w, c and a live over F.
InjectionReport injection_instance(const CohClass& w, const CohClass& c, const Elem& a, const Elem& f);

struct OddExtension {
  int m = 1;
  LambdaSearch extended, base;
  bool violation = false;
  std::string report;
};

OddExtension odd_extension_check(const BiquatAlg& B, int m, const LambdaBounds& ext_bounds = {},
                                 const LambdaBounds& base_bounds = {});

}  // namespace kmd
