#include <cctype>
#include <set>
#include <sstream>

#include "kmd/script.hpp"

namespace kmd::script {

namespace {

struct Tok {
  enum class T { ident, number, punct, end };
  T type = T::end;
  std::string s;
  int col = 0;  // 1-based start
  int end = 0;  // 1-based, one past the last character
};

struct Fail {
  Diagnostic d;
};

std::vector<Tok> lex(const std::string& line, int lineno) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Tok t;
    t.col = static_cast<int>(i) + 1;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_')) ++j;
      t.type = Tok::T::ident;
      t.s = line.substr(i, j - i);
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      t.type = Tok::T::number;
      t.s = line.substr(i, j - i);
      i = j;
    } else if (line.compare(i, 2, "<<") == 0 || line.compare(i, 2, "]]") == 0) {
      t.type = Tok::T::punct;
      t.s = line.substr(i, 2);
      i += 2;
    } else if (std::string("=()[],+*^/;-<>").find(c) != std::string::npos) {
      t.type = Tok::T::punct;
      t.s = std::string(1, c);
      ++i;
    } else {
      throw Fail{{lineno, t.col, std::string("unexpected character '") + c + "'", {}}};
    }
    t.end = static_cast<int>(i) + 1;
    out.push_back(t);
  }
  Tok e;
  e.type = Tok::T::end;
  e.col = static_cast<int>(line.size()) + 1;
  e.end = e.col;
  out.push_back(e);
  return out;
}

class LineParser {
 public:
  LineParser(const std::string& line, int lineno, std::set<std::string>& forms)
      : line_(line), lineno_(lineno), toks_(lex(line, lineno)), forms_(forms) {}

  Stmt statement() {
    Stmt s;
    s.line = lineno_;
    const Tok& kw = peek();
    static const std::vector<std::string> kws{"field", "ext", "let", "form", "quat", "biq", "class", "check"};
    if (kw.type != Tok::T::ident) fail(kw, "expected a statement keyword", kws);
    next();
    if (kw.s == "field") {
      s.kind = Stmt::Kind::field;
      s.name = ident("field name");
      expect("=");
      field_rhs(s);
    } else if (kw.s == "ext") {
      s.kind = Stmt::Kind::ext;
      s.name = ident("extension name");
      expect("=");
      s.base = ident("base field name");
      expect("[");
      s.gen = ident("generator name");
      expect("]");
      expect_word("where");
      expect_word("wp");
      expect("(");
      const Tok& g = peek();
      if (ident("generator name") != s.gen) fail(g, "generator must match the bracket", {s.gen});
      expect(")");
      expect("=");
      s.exprs.push_back(expr({}));
    } else if (kw.s == "let") {
      s.kind = Stmt::Kind::let;
      s.name = ident("name");
      expect("=");
      s.exprs.push_back(expr({}));
    } else if (kw.s == "form") {
      s.kind = Stmt::Kind::form;
      s.name = ident("form name");
      expect("=");
      s.form = form_sum({});
      forms_.insert(s.name);
    } else if (kw.s == "quat") {
      s.kind = Stmt::Kind::quat;
      s.name = ident("symbol name");
      expect("=");
      expect("[");
      s.exprs.push_back(expr({","}));
      expect(",");
      s.exprs.push_back(expr({")"}));
      expect(")");
      expect_word("over");
      s.over = ident("field name");
    } else if (kw.s == "biq") {
      s.kind = Stmt::Kind::biq;
      s.name = ident("algebra name");
      expect("=");
      s.q1 = ident("quaternion name");
      expect("*");
      s.q2 = ident("quaternion name");
    } else if (kw.s == "class") {
      s.kind = Stmt::Kind::cls;
      s.name = ident("class name");
      expect("=");
      s.cls = class_sum();
    } else if (kw.s == "check") {
      s.kind = Stmt::Kind::check;
      s.query = ident("query name");
      if (!at_end() && !is_word("with")) {
        s.exprs.push_back(expr({","}, true));
        while (accept(",")) s.exprs.push_back(expr({","}, true));
      }
      if (is_word("with")) {
        next();
        do {
          Option o;
          o.key = ident("option name");
          expect("=");
          const Tok& v = peek();
          if (v.type != Tok::T::ident && v.type != Tok::T::number) fail(v, "expected an option value", {"value"});
          o.value = v.s;
          next();
          s.options.push_back(o);
        } while (accept(","));
      }
    } else {
      fail(kw, "unknown statement '" + kw.s + "'", kws);
    }
    if (!at_end()) fail(peek(), "unexpected '" + peek().s + "'", {"end of line"});
    return s;
  }

 private:
  const std::string& line_;
  int lineno_;
  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
  std::set<std::string>& forms_;

  const Tok& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Tok& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  const Tok& prev() const { return toks_[pos_ ? pos_ - 1 : 0]; }
  bool at_end() const { return peek().type == Tok::T::end; }
  bool is(const std::string& p, std::size_t ahead = 0) const {
    return peek(ahead).type == Tok::T::punct && peek(ahead).s == p;
  }
  bool is_word(const std::string& w, std::size_t ahead = 0) const {
    return peek(ahead).type == Tok::T::ident && peek(ahead).s == w;
  }

  [[noreturn]] void fail(const Tok& t, const std::string& msg, std::vector<std::string> expected) {
    // At the end of the line point at the last token read.
    int col = t.col;
    std::string m = msg;
    if (t.type == Tok::T::end && pos_ > 0) {
      col = prev().col;
      m = "unexpected end of line after '" + prev().s + "'";
    }
    throw Fail{{lineno_, col, m, std::move(expected)}};
  }

  bool accept(const std::string& p) {
    if (!is(p)) return false;
    next();
    return true;
  }

  void expect(const std::string& p) {
    if (!accept(p)) fail(peek(), "expected '" + p + "'", {p});
  }

  void expect_word(const std::string& w) {
    if (!is_word(w)) fail(peek(), "expected '" + w + "'", {w});
    next();
  }

  std::string ident(const std::string& what) {
    const Tok& t = peek();
    if (t.type != Tok::T::ident) fail(t, "expected " + what, {what});
    next();
    return t.s;
  }

  int number() {
    const Tok& t = peek();
    if (t.type != Tok::T::number) fail(t, "expected a number", {"number"});
    next();
    if (t.s.size() > 8) fail(t, "number too large", {});
    return std::stoi(t.s);
  }

  void field_rhs(Stmt& s) {
    const Tok& g = peek();
    if (ident("GF") != "GF") fail(g, "expected 'GF'", {"GF"});
    expect("(");
    const Tok& nt = peek();
    int q = number();
    if (accept("^")) {
      if (q != 2) fail(nt, "base must be 2", {"2"});
      s.k = number();
    } else {
      int k = 0;
      while (q > 1 && q % 2 == 0) {
        q /= 2;
        ++k;
      }
      if (q != 1 || k == 0) fail(nt, "field size must be a power of 2", {"2^k"});
      s.k = k;
    }
    expect(")");
    if (accept("(")) {
      s.vars.push_back(ident("variable name"));
      while (accept(",")) s.vars.push_back(ident("variable name"));
      expect(")");
    }
  }

  // Tokens up to a delimiter at parenthesis depth 0.
  Expr expr(const std::set<std::string>& stops, bool check_arg = false) {
    const std::size_t start = pos_;
    int depth = 0;
    while (!at_end()) {
      const Tok& t = peek();
      if (t.type == Tok::T::punct) {
        if (depth == 0 && (stops.count(t.s) || t.s == "]" || t.s == "]]" || t.s == ";" || t.s == ")")) break;
        if (t.s == "(") ++depth;
        if (t.s == ")") --depth;
        if (t.s == "[" || t.s == "<<" || t.s == "=") fail(t, "unexpected '" + t.s + "' in an expression", {"element"});
      } else if (depth == 0 && t.type == Tok::T::ident && (t.s == "with" || t.s == "over") &&
                 (check_arg || t.s == "over")) {
        break;
      }
      next();
    }
    if (pos_ == start) fail(peek(), "expected an element", {"element"});
    Expr e;
    e.line = lineno_;
    e.column = toks_[start].col;
    e.text = line_.substr(toks_[start].col - 1, toks_[pos_ - 1].end - toks_[start].col);
    return e;
  }

  std::size_t matching(std::size_t open) const {
    int depth = 0;
    for (std::size_t i = open; i < toks_.size(); ++i) {
      if (toks_[i].type != Tok::T::punct) continue;
      if (toks_[i].s == "(") ++depth;
      if (toks_[i].s == ")" && --depth == 0) return i;
    }
    return toks_.size() - 1;
  }

  bool atom_start(std::size_t ahead) const {
    const Tok& t = peek(ahead);
    if (t.type == Tok::T::punct) return t.s == "[" || t.s == "<<" || t.s == "(";
    if (t.type != Tok::T::ident) return false;
    return t.s == "H" || t.s == "transfer" || t.s == "extend" || forms_.count(t.s);
  }

  std::vector<FormTerm> form_sum(const std::set<std::string>& stops) {
    std::vector<FormTerm> out{form_term()};
    while (!at_end() && !(peek().type == Tok::T::punct && stops.count(peek().s))) {
      expect("+");
      out.push_back(form_term());
    }
    return out;
  }

  FormTerm form_term() {
    // A scalar is everything before the last '*' that precedes a form atom.
    std::size_t star = 0;
    int depth = 0;
    for (std::size_t i = pos_; i < toks_.size(); ++i) {
      const Tok& t = toks_[i];
      if (t.type == Tok::T::end) break;
      if (t.type == Tok::T::punct) {
        if (t.s == "(") ++depth;
        if (t.s == ")") --depth;
        if (depth < 0) break;
        if (depth == 0 && (t.s == "+" || t.s == "[" || t.s == "<<")) break;
        if (depth == 0 && t.s == "*" && atom_start(i + 1 - pos_)) {
          star = i;
          break;
        }
      }
    }
    FormTerm term;
    if (star) {
      Expr e;
      e.line = lineno_;
      std::size_t a = pos_, b = star;  // [a, b)
      if (is("(") && matching(pos_) + 1 == star) {
        ++a;
        --b;
      }
      if (a >= b) fail(peek(), "expected a scalar", {"element"});
      e.column = toks_[a].col;
      e.text = line_.substr(toks_[a].col - 1, toks_[b - 1].end - toks_[a].col);
      pos_ = star + 1;
      term = form_atom();
      if (term.scalar) fail(toks_[star], "only one scalar per term", {});
      term.scalar = e;
      return term;
    }
    return form_atom();
  }

  FormTerm form_atom() {
    FormTerm t;
    const Tok& tok = peek();
    if (accept("[")) {
      t.kind = FormTerm::Kind::pair;
      t.args.push_back(expr({","}));
      expect(",");
      t.args.push_back(expr({}));
      expect("]");
    } else if (accept("<<")) {
      t.kind = FormTerm::Kind::pfister;
      t.args.push_back(expr({","}));
      while (accept(",")) t.args.push_back(expr({","}));
      expect("]]");
    } else if (accept("(")) {
      t.kind = FormTerm::Kind::group;
      t.group = form_sum({")"});
      expect(")");
    } else if (tok.type == Tok::T::ident && (tok.s == "transfer" || tok.s == "extend")) {
      next();
      t.kind = tok.s == "transfer" ? FormTerm::Kind::transfer : FormTerm::Kind::extend;
      expect("(");
      t.ref = form_name();
      expect(")");
    } else if (tok.type == Tok::T::ident && tok.s == "H") {
      next();
      t.kind = FormTerm::Kind::hyperbolic;
    } else if (tok.type == Tok::T::ident && forms_.count(tok.s)) {
      next();
      t.kind = FormTerm::Kind::ref;
      t.ref = tok.s;
    } else {
      fail(tok, tok.type == Tok::T::ident ? "unknown form '" + tok.s + "'" : "expected a form",
           {"[", "<<", "(", "H", "transfer", "extend", "form name"});
    }
    return t;
  }

  std::string form_name() {
    const Tok& t = peek();
    std::string n = ident("form name");
    if (!forms_.count(n)) fail(t, "unknown form '" + n + "'", {"form name"});
    return n;
  }

  std::vector<ClassTerm> class_sum() {
    std::vector<ClassTerm> out{class_term()};
    while (accept("+")) out.push_back(class_term());
    return out;
  }

  ClassTerm class_term() {
    ClassTerm c;
    const Tok& t = peek();
    std::string w = ident("class term");
    if (w == "sym") {
      c.kind = ClassTerm::Kind::symbol;
      expect("(");
      c.coeff = expr({",", ";"});
      if (accept(";")) {
        c.slots.push_back(expr({","}));
        while (accept(",")) c.slots.push_back(expr({","}));
      }
      expect(")");
    } else if (w == "clifford" || w == "quat") {
      c.kind = w == "clifford" ? ClassTerm::Kind::clifford : ClassTerm::Kind::quat;
      expect("(");
      c.ref = ident("name");
      expect(")");
    } else if (w == "with" || w == "over") {
      fail(t, "expected a class term", {"sym", "clifford", "quat", "class name"});
    } else {
      c.kind = ClassTerm::Kind::ref;
      c.ref = w;
    }
    return c;
  }
};

std::string join(const std::vector<Expr>& es, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < es.size(); ++i) out += (i ? sep : "") + es[i].text;
  return out;
}

std::string print_terms(const std::vector<FormTerm>& ts);

std::string print_term(const FormTerm& t) {
  std::string s = t.scalar ? "(" + t.scalar->text + ") * " : "";
  switch (t.kind) {
    case FormTerm::Kind::pair:
      return s + "[" + join(t.args, ", ") + "]";
    case FormTerm::Kind::pfister:
      return s + "<<" + join(t.args, ", ") + "]]";
    case FormTerm::Kind::hyperbolic:
      return s + "H";
    case FormTerm::Kind::ref:
      return s + t.ref;
    case FormTerm::Kind::transfer:
      return s + "transfer(" + t.ref + ")";
    case FormTerm::Kind::extend:
      return s + "extend(" + t.ref + ")";
    case FormTerm::Kind::group:
      return s + "(" + print_terms(t.group) + ")";
  }
  return s;
}

std::string print_terms(const std::vector<FormTerm>& ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) out += (i ? " + " : "") + print_term(ts[i]);
  return out;
}

}  // namespace

ParseResult parse(const std::string& text) {
  ParseResult r;
  std::set<std::string> forms;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      r.ast.stmts.push_back(LineParser(line, lineno, forms).statement());
    } catch (const Fail& f) {
      r.diagnostics.push_back(f.d);
    }
  }
  return r;
}

std::string print(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::field: {
      std::string out = "field " + s.name + " = GF(2^" + std::to_string(s.k) + ")";
      if (!s.vars.empty()) {
        out += "(";
        for (std::size_t i = 0; i < s.vars.size(); ++i) out += (i ? ", " : "") + s.vars[i];
        out += ")";
      }
      return out;
    }
    case Stmt::Kind::ext:
      return "ext " + s.name + " = " + s.base + "[" + s.gen + "] where wp(" + s.gen + ") = " + s.exprs[0].text;
    case Stmt::Kind::let:
      return "let " + s.name + " = " + s.exprs[0].text;
    case Stmt::Kind::form:
      return "form " + s.name + " = " + print_terms(s.form);
    case Stmt::Kind::quat:
      return "quat " + s.name + " = [" + s.exprs[0].text + ", " + s.exprs[1].text + ") over " + s.over;
    case Stmt::Kind::biq:
      return "biq " + s.name + " = " + s.q1 + " * " + s.q2;
    case Stmt::Kind::cls: {
      std::string out = "class " + s.name + " = ";
      for (std::size_t i = 0; i < s.cls.size(); ++i) {
        const auto& c = s.cls[i];
        out += i ? " + " : "";
        switch (c.kind) {
          case ClassTerm::Kind::symbol:
            out += "sym(" + c.coeff.text + (c.slots.empty() ? "" : "; " + join(c.slots, ", ")) + ")";
            break;
          case ClassTerm::Kind::clifford:
            out += "clifford(" + c.ref + ")";
            break;
          case ClassTerm::Kind::quat:
            out += "quat(" + c.ref + ")";
            break;
          case ClassTerm::Kind::ref:
            out += c.ref;
            break;
        }
      }
      return out;
    }
    case Stmt::Kind::check: {
      std::string out = "check " + s.query;
      if (!s.exprs.empty()) out += " " + join(s.exprs, ", ");
      for (std::size_t i = 0; i < s.options.size(); ++i)
        out += (i ? ", " : " with ") + s.options[i].key + "=" + s.options[i].value;
      return out;
    }
  }
  return {};
}

std::string print(const Ast& ast) {
  std::string out;
  for (const auto& s : ast.stmts) out += print(s) + "\n";
  return out;
}

}  // namespace kmd::script
