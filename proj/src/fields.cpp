#include "kmd/fields.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "kmd/error.hpp"

namespace kmd {

namespace {

bool valid_name(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

void require_same(const Elem& a, const Elem& b) {
  if (!a.tower() || !b.tower()) throw Error("uninitialized element");
  if (a.tower() != b.tower() && !same_tower(a.tower(), b.tower()))
    throw Error("elements from different fields");
}

}  // namespace

TowerPtr make_field(int k, std::vector<std::string> vars) {
  if (k < 1 || k > 24) throw Error("GF(2^k): k must be in 1..24");
  if (static_cast<int>(vars.size()) > kMaxVars)
    throw Error("at most " + std::to_string(kMaxVars) + " variables are supported");
  std::set<std::string> seen;
  for (const auto& v : vars) {
    if (!valid_name(v)) throw Error("invalid variable name '" + v + "'");
    if (v == "g") throw Error("'g' is reserved for the generator of GF(2^k)");
    if (!seen.insert(v).second) throw Error("duplicate variable '" + v + "'");
  }
  auto ar = std::make_shared<const Arith>(GF2m::get(k));
  std::vector<TowerPtr> chain;
  for (std::size_t j = 0; j <= vars.size(); ++j) {
    auto t = std::make_shared<Tower>();
    t->k = k;
    t->vars.assign(vars.begin(), vars.begin() + j);
    t->ar = ar;
    t->prefix = chain;
    chain.push_back(t);
  }
  return chain.back();
}

bool same_tower(const TowerPtr& a, const TowerPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->k != b->k || a->vars != b->vars || a->has_ext != b->has_ext) return false;
  if (a->has_ext)
    return a->ext_name == b->ext_name && a->arith().equal(a->ext_a, b->ext_a);
  return true;
}

TowerPtr base_field(const TowerPtr& t) { return t->has_ext ? t->base : t; }

TowerPtr truncated(const TowerPtr& t, int j) {
  if (j < 0 || j > t->n()) throw Error("internal: bad truncation");
  TowerPtr b = base_field(t);
  return j == b->n() ? b : b->prefix[j];
}

std::string describe(const TowerPtr& t) {
  std::string s = "GF(2^" + std::to_string(t->k) + ")";
  if (t->n() > 0) {
    s += "(";
    for (int i = 0; i < t->n(); ++i) s += (i ? "," : "") + t->vars[i];
    s += ")";
  }
  if (t->has_ext) s += "[" + t->ext_name + ": wp = " + to_string(Elem(t->base, t->ext_a)) + "]";
  return s;
}

Elem::Elem(TowerPtr t, Rat w0) : t_(std::move(t)), w0_(std::move(w0)) {
  w1_ = t_->arith().zero(t_->n());
  if (w0_.level() != t_->n()) throw Error("internal: element level mismatch");
}

Elem::Elem(TowerPtr t, Rat w0, Rat w1) : t_(std::move(t)), w0_(std::move(w0)), w1_(std::move(w1)) {
  if (w0_.level() != t_->n() || w1_.level() != t_->n())
    throw Error("internal: element level mismatch");
  if (!t_->has_ext && !w1_.is_zero()) throw Error("internal: alpha component without extension");
}

bool Elem::is_one() const { return w1_.is_zero() && ar().is_one(w0_); }

Elem operator+(const Elem& a, const Elem& b) {
  require_same(a, b);
  const Arith& A = a.ar();
  return Elem(a.tower(), A.add(a.w0(), b.w0()), A.add(a.w1(), b.w1()));
}

Elem operator-(const Elem& a, const Elem& b) { return a + b; }

Elem operator*(const Elem& a, const Elem& b) {
  require_same(a, b);
  const Arith& A = a.ar();
  if (a.in_base() && b.in_base()) return Elem(a.tower(), A.mul(a.w0(), b.w0()));
  // alpha^2 = alpha + a
  Rat x0y0 = A.mul(a.w0(), b.w0());
  Rat x1y1 = A.mul(a.w1(), b.w1());
  Rat cross = A.add(A.mul(a.w0(), b.w1()), A.mul(a.w1(), b.w0()));
  return Elem(a.tower(), A.add(x0y0, A.mul(a.tower()->ext_a, x1y1)), A.add(cross, x1y1));
}

Elem inv(const Elem& a) {
  if (a.is_zero()) throw Error("division by zero");
  const Arith& A = a.ar();
  if (a.in_base()) return Elem(a.tower(), A.inv(a.w0()));
  Rat n = norm(a).w0();
  Elem c = conj(a);
  Rat ni = A.inv(n);
  return Elem(a.tower(), A.mul(c.w0(), ni), A.mul(c.w1(), ni));
}

Elem operator/(const Elem& a, const Elem& b) { return a * inv(b); }

bool operator==(const Elem& a, const Elem& b) { return compare(a, b) == 0; }

int compare(const Elem& a, const Elem& b) {
  require_same(a, b);
  const Arith& A = a.ar();
  if (int c = A.compare(a.w1(), b.w1())) return c;
  return A.compare(a.w0(), b.w0());
}

Elem sqr(const Elem& a) { return a * a; }

Elem pow(const Elem& a, long e) {
  if (e < 0) return pow(inv(a), -e);
  Elem r = one(a.tower()), b = a;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

Elem zero(const TowerPtr& t) { return Elem(t, t->arith().zero(t->n())); }
Elem one(const TowerPtr& t) { return Elem(t, t->arith().one(t->n())); }
Elem constant(const TowerPtr& t, GF2m::Value c) { return Elem(t, t->arith().constant(c, t->n())); }

Elem var(const TowerPtr& t, int j) {
  if (j < 1 || j > t->n()) throw Error("internal: variable index out of range");
  return Elem(t, t->arith().var(j, t->n()));
}

Elem alpha(const TowerPtr& t) {
  if (!t->has_ext) throw Error("field has no quadratic extension");
  const Arith& A = t->arith();
  return Elem(t, A.zero(t->n()), A.one(t->n()));
}

Elem lift(const Elem& x, const TowerPtr& t) {
  const TowerPtr& s = x.tower();
  if (s == t) return x;
  if (s->k != t->k || s->n() > t->n() ||
      !std::equal(s->vars.begin(), s->vars.end(), t->vars.begin()))
    throw Error("cannot embed " + describe(s) + " into " + describe(t));
  if (s->has_ext) {
    if (!same_tower(s, t)) throw Error("cannot embed " + describe(s) + " into " + describe(t));
    return Elem(t, x.w0(), x.w1());
  }
  const Arith& A = t->arith();
  return Elem(t, A.lift(x.w0(), t->n()));
}

Elem to_base(const Elem& x) {
  if (!x.in_base()) throw Error("element is not in the base field");
  return Elem(base_field(x.tower()), x.w0());
}

namespace {

std::string wrap(const std::string& s) {
  if (s.find_first_of("+/") == std::string::npos) return s;
  return "(" + s + ")";
}

}  // namespace

std::string to_string(const Elem& x) {
  const Tower& t = *x.tower();
  const Arith& A = t.arith();
  std::string s0 = A.format(x.w0(), t.vars);
  if (x.in_base()) return s0;
  std::string s1 = A.format(x.w1(), t.vars);
  std::string a1 = A.is_one(x.w1()) ? t.ext_name : wrap(s1) + "*" + t.ext_name;
  if (x.w0().is_zero()) return a1;
  return s0 + " + " + a1;
}

// Element parser

namespace {

class ElemParser {
 public:
  ElemParser(const TowerPtr& t, const std::string& s, const ElemLookup* lookup = nullptr)
      : t_(t), s_(s), lookup_(lookup) {}

  Elem parse() {
    Elem e = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'", {"+", "*", "/", "^", "end"});
    return e;
  }

 private:
  const TowerPtr& t_;
  const std::string& s_;
  const ElemLookup* lookup_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) {
    throw ParseError(msg, static_cast<int>(pos_) + 1, std::move(expected));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Elem expr() {
    Elem e = term();
    while (accept('+') || accept('-')) e = e + term();
    return e;
  }

  Elem term() {
    Elem e = power();
    for (;;) {
      if (accept('*')) {
        e = e * power();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Elem d = power();
        if (d.is_zero()) {
          pos_ = at;
          skip();
          fail("division by zero", {});
        }
        e = e / d;
      } else {
        return e;
      }
    }
  }

  Elem power() {
    Elem b = unary();
    if (accept('^')) {
      skip();
      bool neg = false;
      if (pos_ < s_.size() && s_[pos_] == '-') {
        neg = true;
        ++pos_;
      }
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
        fail("expected an integer exponent", {"integer"});
      long e = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        e = e * 10 + (s_[pos_++] - '0');
        if (e > 100000) fail("exponent too large", {});
      }
      if (neg && b.is_zero()) fail("division by zero", {});
      return pow(b, neg ? -e : e);
    }
    return b;
  }

  Elem unary() {
    if (accept('-')) return unary();
    return primary();
  }

  Elem primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression", {"number", "identifier", "("});
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Elem e = expr();
      if (!accept(')')) fail("expected ')'", {")"});
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      int v = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        v = (s_[pos_++] - '0') % 2;  // only the parity matters
      return constant(t_, static_cast<GF2m::Value>(v));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      for (int j = 0; j < t_->n(); ++j)
        if (t_->vars[j] == id) return var(t_, j + 1);
      if (t_->has_ext && id == t_->ext_name) return alpha(t_);
      if (id == "g") return constant(t_, t_->k == 1 ? 1 : 2);
      if (lookup_ && *lookup_)
        if (auto v = (*lookup_)(id)) return *v;
      pos_ = start;
      std::vector<std::string> exp(t_->vars.begin(), t_->vars.end());
      if (t_->has_ext) exp.push_back(t_->ext_name);
      exp.push_back("g");
      fail("unknown identifier '" + id + "'", exp);
    }
    fail("unexpected '" + std::string(1, c) + "'", {"number", "identifier", "("});
  }
};

}  // namespace

Elem parse_elem(const TowerPtr& t, const std::string& text) { return ElemParser(t, text).parse(); }

Elem parse_elem(const TowerPtr& t, const std::string& text, const ElemLookup& lookup) {
  return ElemParser(t, text, &lookup).parse();
}

Elem wp(const Elem& x) { return x * x + x; }

Elem conj(const Elem& x) {
  if (x.in_base()) return x;
  const Arith& A = x.ar();
  return Elem(x.tower(), A.add(x.w0(), x.w1()), x.w1());
}

Elem trace(const Elem& x) {
  if (!x.tower()->has_ext) throw Error("field has no quadratic extension");
  return Elem(x.tower()->base, x.w1());
}

Elem norm(const Elem& x) {
  if (!x.tower()->has_ext) throw Error("field has no quadratic extension");
  const Arith& A = x.ar();
  Rat n = A.add(A.add(A.sqr(x.w0()), A.mul(x.w0(), x.w1())),
                A.mul(x.tower()->ext_a, A.sqr(x.w1())));
  return Elem(x.tower()->base, n);
}

TowerPtr make_ext(const TowerPtr& F, const std::string& name, const Elem& a) {
  if (F->has_ext) throw Error("field already has a quadratic extension");
  if (!valid_name(name) || name == "g" ||
      std::find(F->vars.begin(), F->vars.end(), name) != F->vars.end())
    throw Error("invalid extension generator name '" + name + "'");
  Elem ab = lift(a, F);
  auto m = wp_membership(ab);
  if (m.verdict == Verdict::yes)
    throw Error("wp(" + name + ") = " + to_string(ab) + " lies in wp(F); the extension splits (witness " +
                to_string(m.witness) + ")");
  auto t = std::make_shared<Tower>(*F);
  t->has_ext = true;
  t->ext_name = name;
  t->ext_a = ab.w0();
  t->base = F;
  return t;
}

Rat map_constants(const Rat& x, const Arith& dst, const std::function<GF2m::Value(GF2m::Value)>& f) {
  if (x.level() == 0) return dst.constant(f(x.base_value()), 0);
  if (x.is_zero()) return dst.zero(x.level());
  Poly n, d;
  for (const auto& c : x.num()) n.push_back(map_constants(c, dst, f));
  for (const auto& c : x.den()) d.push_back(map_constants(c, dst, f));
  return dst.frac(std::move(n), std::move(d), x.level());
}

ConstantExtension constant_extend(const TowerPtr& t, int m) {
  if (m < 1) throw Error("extension degree must be >= 1");
  ConstantExtension ce;
  if (m == 1) {
    ce.tower = t;
    ce.gen_image = t->k == 1 ? 1 : 2;
    ce.embed = [](const Elem& x) { return x; };
    return ce;
  }
  const int K = t->k * m;
  if (K > 24) throw Error("constant extension too large");
  TowerPtr F = make_field(K, base_field(t)->vars);
  const GF2m::Value gi = gfp::embed_generator(t->k, K);
  auto big = GF2m::get(K);
  auto cmap = [big, gi](GF2m::Value c) { return gfp::embed_value(*big, c, gi); };
  const Arith& dst = F->arith();
  TowerPtr target = F;
  if (t->has_ext) {
    Elem a(F, map_constants(t->ext_a, dst, cmap));
    target = make_ext(F, t->ext_name, a);
  }
  ce.tower = target;
  ce.gen_image = gi;
  ce.embed = [target, cmap](const Elem& x) {
    const Arith& D = target->arith();
    TowerPtr dest = x.tower()->has_ext ? target : base_field(target);
    if (x.tower()->n() != target->n()) dest = truncated(target, x.tower()->n());
    if (x.tower()->has_ext)
      return Elem(dest, map_constants(x.w0(), D, cmap), map_constants(x.w1(), D, cmap));
    return Elem(dest, map_constants(x.w0(), D, cmap));
  };
  return ce;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes:
      return "yes";
    case Verdict::no:
      return "no";
    default:
      return "undecided";
  }
}

}  // namespace kmd
