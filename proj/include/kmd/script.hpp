#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kmd::script {

struct Diagnostic {
  int line = 0;
  int column = 0;
  std::string message;
  std::vector<std::string> expected;
};

/// Source text of an element expression; evaluated against a tower at run time.
struct Expr {
  std::string text;
  int line = 0;
  int column = 0;
};

struct FormTerm {
  enum class Kind { pair, pfister, hyperbolic, ref, transfer, extend, group };
  Kind kind = Kind::pair;
  std::optional<Expr> scalar;
  std::vector<Expr> args;         // pair: a, b; pfister: slots..., b
  std::string ref;                // ref, transfer, extend
  std::vector<FormTerm> group;    // parenthesised sum
};

struct ClassTerm {
  enum class Kind { symbol, ref, clifford, quat };
  Kind kind = Kind::symbol;
  Expr coeff;                // symbol
  std::vector<Expr> slots;   // symbol
  std::string ref;           // ref, clifford, quat
};

struct Option {
  std::string key, value;
};

struct Stmt {
  enum class Kind { field, ext, let, form, quat, biq, cls, check };
  Kind kind = Kind::field;
  int line = 0;
  std::string name;
  int k = 1;                       // field: GF(2^k)
  std::vector<std::string> vars;   // field
  std::string base, gen;           // ext
  std::vector<Expr> exprs;         // ext: a; let: value; quat: a, b; check: arguments
  std::string over;                // quat
  std::vector<FormTerm> form;
  std::vector<ClassTerm> cls;
  std::string q1, q2;              // biq
  std::string query;               // check
  std::vector<Option> options;     // check
};

struct Ast {
  std::vector<Stmt> stmts;
};

struct ParseResult {
  Ast ast;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

/// Line-oriented; '#' starts a comment.
ParseResult parse(const std::string& text);
/// Canonical text; parse(print(a)) reproduces a.
std::string print(const Ast& ast);
std::string print(const Stmt& s);

struct Flags {
  int degree_bound = 2;
  bool oracle = true;
  unsigned long seed = 1;
};

struct RunOutput {
  std::string json;        // the report
  int errors = 0;          // statements that raised
};

/// Runs every statement; parse diagnostics are reported as errors.
RunOutput run(const std::string& text, const Flags& flags);
RunOutput run(const Ast& ast, const std::string& text, const Flags& flags);

/// Replays the certificates of a report; errors counts failed checks.
RunOutput verify(const std::string& report_json);

}  // namespace kmd::script
