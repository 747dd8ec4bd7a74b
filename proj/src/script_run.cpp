#include <chrono>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>

#include "json.hpp"
#include "kmd/brauer.hpp"
#include "kmd/descent.hpp"
#include "kmd/error.hpp"
#include "kmd/residues.hpp"
#include "kmd/script.hpp"

namespace kmd::script {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

// Serialization

json js(const std::vector<Elem>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

json js(const QForm& q) {
  json pairs = json::array();
  for (const auto& p : q.pairs) pairs.push_back({to_string(p.a), to_string(p.b)});
  json o{{"field", describe(q.field)}, {"dim", q.dim()}, {"value", to_string(q)}, {"pairs", pairs}};
  if (!q.quasi.empty()) o["quasi"] = js(q.quasi);
  if (q.level_tag) o["level"] = *q.level_tag;
  return o;
}

json js(const CohClass& c) {
  json o{{"field", describe(c.rep.field)}, {"degree", c.rep.degree}, {"rep", to_string(c.rep)}};
  if (c.has_symbols) {
    json syms = json::array();
    for (const auto& s : c.symbols) syms.push_back({{"b", to_string(s.b)}, {"slots", js(s.slots)}});
    o["symbols"] = syms;
  }
  return o;
}

json js(const std::vector<HyperbolicPair>& chain) {
  json a = json::array();
  for (const auto& h : chain) a.push_back({{"e", js(h.e)}, {"f", js(h.f)}});
  return a;
}

json js(const WittResult& w) {
  json o{{"verdict", to_string(w.verdict)}, {"method", w.method}};
  if (!w.chain.empty()) o["chain"] = js(w.chain);
  if (!w.obstruction.empty()) o["obstruction"] = w.obstruction;
  if (w.place) o["place"] = w.place->name();
  if (w.residue) o["residue"] = js(*w.residue);
  if (!w.diagnostics.empty()) o["diagnostics"] = w.diagnostics;
  return o;
}

json js(const ZeroTest& z) {
  json o{{"verdict", to_string(z.verdict)}, {"method", z.method}};
  if (z.place) o["place"] = z.place->name();
  if (!z.obstruction.empty()) o["obstruction"] = z.obstruction;
  if (!z.diagnostics.empty()) o["diagnostics"] = z.diagnostics;
  return o;
}

json js(const Represents& r) {
  json o{{"verdict", to_string(r.verdict)}};
  if (r.norm_preimage) o["norm_preimage"] = to_string(*r.norm_preimage);
  o["detail"] = js(r.detail);
  return o;
}

json js(const LambdaSearch& s) {
  json o{{"lambda", s.lambda ? json(to_string(*s.lambda)) : json(nullptr)},
         {"tried", s.tried},
         {"budget_exhausted", s.budget_exhausted}};
  if (!s.report.empty()) o["report"] = s.report;
  return o;
}

json js(const CorZero& c) {
  json o{{"verdict", to_string(c.verdict)}};
  if (c.omega) o["omega_route"] = js(*c.omega);
  if (c.forms) o["forms_route"] = js(*c.forms);
  if (!c.diagnostics.empty()) o["diagnostics"] = c.diagnostics;
  return o;
}

json js(const Reconstruction& r) {
  return {{"phi0", js(r.phi0)}, {"B0", to_string(r.B0)}, {"lambda", to_string(r.lambda)}, {"repaired", r.repaired}};
}

json js(const LambdaBounds& b) {
  return {{"degree", b.degree}, {"lower_degree", b.lower_degree}, {"budget", b.budget}};
}

std::vector<HyperbolicPair> read_chain(const json& a, const TowerPtr& T) {
  std::vector<HyperbolicPair> out;
  for (const auto& h : a) {
    HyperbolicPair p;
    for (const auto& s : h.at("e")) p.e.push_back(parse_elem(T, s.get<std::string>()));
    for (const auto& s : h.at("f")) p.f.push_back(parse_elem(T, s.get<std::string>()));
    out.push_back(std::move(p));
  }
  return out;
}

bool budget_error(const Error& e) { return std::string(e.what()).find("budget exceeded") != std::string::npos; }

// Typed option access; unknown keys are rejected by finish().
class Options {
 public:
  explicit Options(const std::vector<Option>& opts) {
    for (const auto& o : opts)
      if (!map_.emplace(o.key, o.value).second) throw Error("duplicate option '" + o.key + "'");
  }
  long integer(const std::string& key, long def) {
    auto it = take(key);
    if (!it) return def;
    if (!std::regex_match(*it, std::regex("[0-9]{1,9}"))) throw Error("option '" + key + "' expects an integer");
    return std::stol(*it);
  }
  bool boolean(const std::string& key, bool def) {
    auto it = take(key);
    if (!it) return def;
    if (*it == "on" || *it == "true") return true;
    if (*it == "off" || *it == "false") return false;
    throw Error("option '" + key + "' expects on or off");
  }
  std::string choice(const std::string& key, const std::vector<std::string>& allowed, const std::string& def) {
    auto it = take(key);
    if (!it) return def;
    for (const auto& a : allowed)
      if (*it == a) return a;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw Error("option '" + key + "' expects one of " + list);
  }
  void finish(const std::string& query) const {
    for (const auto& [k, v] : map_)
      if (!used_.count(k)) throw Error("unknown option '" + k + "' for " + query);
  }

 private:
  std::map<std::string, std::string> map_;
  std::set<std::string> used_;
  std::optional<std::string> take(const std::string& key) {
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }
};

struct Interp {
  Flags flags;
  std::mt19937_64 rng;
  TowerPtr scope;
  std::map<std::string, TowerPtr> towers;
  std::map<std::string, Elem> elems;
  std::map<std::string, QForm> forms;
  std::map<std::string, CohClass> classes;
  std::map<std::string, QuatSymbol> quats;
  std::map<std::string, BiquatAlg> biqs;

  explicit Interp(const Flags& f) : flags(f), rng(f.seed) {}

  void fresh(const std::string& name) {
    if (towers.count(name) || elems.count(name) || forms.count(name) || classes.count(name) || quats.count(name) ||
        biqs.count(name))
      throw Error("name '" + name + "' is already defined");
    if (name == "g") throw Error("'g' is reserved for the generator of GF(2^k)");
    for (const auto& [n, t] : towers)
      if (std::find(t->vars.begin(), t->vars.end(), name) != t->vars.end() || (t->has_ext && t->ext_name == name))
        throw Error("name '" + name + "' shadows a field variable");
  }

  const TowerPtr& current() const {
    if (!scope) throw Error("no field declared");
    return scope;
  }

  Elem random_elem(const TowerPtr& T, int deg) {
    const TowerPtr F = base_field(T);
    const Arith& A = F->arith();
    std::function<Rat(int)> poly = [&](int level) -> Rat {
      if (level == 0) return A.constant(static_cast<GF2m::Value>(rng() % A.gf().order()), 0);
      Poly p;
      const int d = level == F->n() ? deg : 1;
      for (int i = 0; i <= d; ++i) p.push_back(poly(level - 1));
      while (!p.empty() && p.back().is_zero()) p.pop_back();
      return A.from_poly(p, level);
    };
    Elem x = lift(Elem(F, poly(F->n())), T);
    if (T->has_ext) x = x + lift(Elem(F, poly(F->n())), T) * alpha(T);
    return x;
  }

  Elem elem(const Expr& e, const TowerPtr& T) {
    static const std::regex rnd(R"(\s*random\s*\(\s*([0-9]{1,2})\s*\)\s*)");
    std::smatch m;
    if (std::regex_match(e.text, m, rnd)) return random_elem(T, std::stoi(m[1]));
    ElemLookup look = [&](const std::string& id) -> std::optional<Elem> {
      auto it = elems.find(id);
      if (it == elems.end()) return std::nullopt;
      try {
        return lift(it->second, T);
      } catch (const Error&) {
        return std::nullopt;
      }
    };
    try {
      return parse_elem(T, e.text, look);
    } catch (const ParseError& p) {
      std::string exp;
      for (const auto& x : p.expected()) exp += (exp.empty() ? "" : ", ") + x;
      throw Error(std::string(p.what()) + " at line " + std::to_string(e.line) + ", column " +
                  std::to_string(e.column + p.column() - 1) + (exp.empty() ? "" : " (expected " + exp + ")"));
    }
  }

  template <class M>
  const typename M::mapped_type& find(const M& m, const std::string& name, const std::string& what) const {
    auto it = m.find(name);
    if (it == m.end()) throw Error("unknown " + what + " '" + name + "'");
    return it->second;
  }

  const QForm& form_arg(const std::vector<Expr>& a, std::size_t i) const {
    if (i >= a.size()) throw Error("missing form argument");
    return find(forms, trim(a[i].text), "form");
  }
  const CohClass& class_arg(const std::vector<Expr>& a, std::size_t i) const {
    if (i >= a.size()) throw Error("missing class argument");
    return find(classes, trim(a[i].text), "class");
  }
  const BiquatAlg& biq_arg(const std::vector<Expr>& a, std::size_t i) const {
    if (i >= a.size()) throw Error("missing algebra argument");
    return find(biqs, trim(a[i].text), "biquaternion algebra");
  }
  Elem elem_arg(const std::vector<Expr>& a, std::size_t i, const TowerPtr& T) {
    if (i >= a.size()) throw Error("missing element argument");
    return elem(a[i], T);
  }
  static void arity(const Stmt& s, std::size_t lo, std::size_t hi) {
    if (s.exprs.size() < lo || s.exprs.size() > hi)
      throw Error(s.query + " takes " + (lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi)) +
                  " argument(s)");
  }
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
  }

  QForm form_terms(const std::vector<FormTerm>& terms) {
    std::optional<QForm> acc;
    for (const auto& t : terms) {
      QForm q = form_term(t);
      if (acc && !same_tower(acc->field, q.field))
        throw Error("cannot add forms over " + describe(acc->field) + " and " + describe(q.field));
      acc = acc ? orth_sum(*acc, q) : q;
    }
    return *acc;
  }

  QForm form_term(const FormTerm& t) {
    QForm q;
    switch (t.kind) {
      case FormTerm::Kind::pair: {
        const TowerPtr& T = current();
        Elem a = elem(t.args[0], T), b = elem(t.args[1], T);
        q = a.is_zero() ? hyperbolic(T, 1) : make_qform(T, {QPair{a, a * b}});
        break;
      }
      case FormTerm::Kind::pfister: {
        const TowerPtr& T = current();
        std::vector<Elem> slots;
        for (std::size_t i = 0; i + 1 < t.args.size(); ++i) slots.push_back(elem(t.args[i], T));
        q = pfister(slots, elem(t.args.back(), T));
        break;
      }
      case FormTerm::Kind::hyperbolic:
        q = hyperbolic(current(), 1);
        break;
      case FormTerm::Kind::ref:
        q = find(forms, t.ref, "form");
        break;
      case FormTerm::Kind::transfer:
        q = transfer(find(forms, t.ref, "form"));
        break;
      case FormTerm::Kind::extend:
        q = extend(find(forms, t.ref, "form"), current());
        break;
      case FormTerm::Kind::group:
        q = form_terms(t.group);
        break;
    }
    if (t.scalar) q = scale(elem(*t.scalar, q.field), q);
    return q;
  }

  CohClass class_terms(const std::vector<ClassTerm>& terms) {
    std::optional<CohClass> acc;
    for (const auto& t : terms) {
      CohClass c;
      switch (t.kind) {
        case ClassTerm::Kind::symbol: {
          const TowerPtr& T = current();
          std::vector<Elem> slots;
          for (const auto& s : t.slots) slots.push_back(elem(s, T));
          c = class_of_symbols(T, static_cast<int>(slots.size()), {Symbol{elem(t.coeff, T), slots}});
          break;
        }
        case ClassTerm::Kind::clifford:
          c = clifford(find(forms, t.ref, "form"));
          break;
        case ClassTerm::Kind::quat:
          c = quat_class(find(quats, t.ref, "quaternion symbol"));
          break;
        case ClassTerm::Kind::ref:
          c = find(classes, t.ref, "class");
          break;
      }
      if (acc && (!same_tower(acc->rep.field, c.rep.field) || acc->rep.degree != c.rep.degree))
        throw Error("cannot add classes of different fields or degrees");
      acc = acc ? *acc + c : c;
    }
    return *acc;
  }

  json declare(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::field: {
        fresh(s.name);
        for (const auto& v : s.vars)
          if (v == "g" || towers.count(v) || elems.count(v) || forms.count(v) || classes.count(v) || quats.count(v) ||
              biqs.count(v))
            throw Error("variable '" + v + "' clashes with a defined name");
        if (s.k < 1 || s.k > 16) throw Error("GF(2^k) needs 1 <= k <= 16");
        TowerPtr T = make_field(s.k, s.vars);
        towers[s.name] = T;
        scope = T;
        return {{"field", describe(T)}};
      }
      case Stmt::Kind::ext: {
        fresh(s.name);
        fresh(s.gen);
        const TowerPtr& F = find(towers, s.base, "field");
        if (F->has_ext) throw Error("'" + s.base + "' is already an extension");
        TowerPtr K = make_ext(F, s.gen, elem(s.exprs[0], F));
        towers[s.name] = K;
        scope = K;
        return {{"field", describe(K)}};
      }
      case Stmt::Kind::let: {
        fresh(s.name);
        Elem x = elem(s.exprs[0], current());
        elems[s.name] = x;
        return {{"value", to_string(x)}};
      }
      case Stmt::Kind::form: {
        fresh(s.name);
        QForm q = form_terms(s.form);
        forms[s.name] = q;
        return js(q);
      }
      case Stmt::Kind::quat: {
        fresh(s.name);
        const TowerPtr& T = find(towers, s.over, "field");
        QuatSymbol q = make_quat(elem(s.exprs[0], T), elem(s.exprs[1], T));
        quats[s.name] = q;
        return {{"value", to_string(q)}};
      }
      case Stmt::Kind::biq: {
        fresh(s.name);
        BiquatAlg B = make_biquat(find(quats, s.q1, "quaternion symbol"), find(quats, s.q2, "quaternion symbol"));
        biqs[s.name] = B;
        return {{"value", to_string(B)}};
      }
      case Stmt::Kind::cls: {
        fresh(s.name);
        CohClass c = class_terms(s.cls);
        classes[s.name] = c;
        return js(c);
      }
      case Stmt::Kind::check:
        break;
    }
    throw Error("not a declaration");
  }

  WittOptions witt_opts(Options& o) {
    WittOptions w;
    w.search_degree = static_cast<int>(o.integer("search_degree", w.search_degree));
    w.lower_degree = static_cast<int>(o.integer("lower_degree", w.lower_degree));
    w.budget = o.integer("budget", w.budget);
    w.use_residues = o.boolean("residues", w.use_residues);
    return w;
  }

  LambdaBounds lambda_opts(Options& o) {
    LambdaBounds b;
    b.degree = static_cast<int>(o.integer("degree", flags.degree_bound));
    b.lower_degree = static_cast<int>(o.integer("lower_degree", b.lower_degree));
    b.budget = o.integer("budget", b.budget);
    return b;
  }

  // Cross-check of a Witt verdict: chains are replayed, and a "no" is
  // confronted with a bounded isotropy search.
  json oracle(const QForm& q, const WittResult& w, Options& o) {
    const bool on = o.boolean("oracle", flags.oracle);
    const int degree = static_cast<int>(o.integer("oracle_degree", flags.degree_bound));
    IsotropyOptions iso;
    iso.lower_degree = static_cast<int>(o.integer("oracle_lower", iso.lower_degree));
    iso.budget = o.integer("oracle_budget", iso.budget);
    if (!on) return {{"status", "off"}};
    if (w.verdict == Verdict::yes) {
      if (w.chain.empty() && q.dim() > 0) return {{"status", "no_chain"}};
      if (!verify_chain(q, w.chain)) throw Error("oracle: the splitting chain does not verify");
      return {{"status", "chain_verified"}};
    }
    if (w.verdict != Verdict::no) return {{"status", "skipped"}};
    json r{{"degree", degree}, {"lower_degree", iso.lower_degree}};
    std::optional<Vec> v;
    try {
      v = isotropy_search(q, degree, iso);
    } catch (const Error& e) {
      if (!budget_error(e)) throw;
      r["status"] = "skipped";
      r["reason"] = e.what();
      return r;
    }
    if (!v) {
      r["status"] = "no_isotropy_in_bound";
      return r;
    }
    r["status"] = "isotropic";
    r["vector"] = js(*v);
    // Isotropy contradicts "not hyperbolic" only for Pfister and binary forms.
    if (q.dim() == 2 || is_pfister(q)) throw Error("oracle found an isotropic vector for a form certified nontrivial");
    return r;
  }

  json check(const Stmt& s) {
    Options o(s.options);
    json r = check_body(s, o);
    o.finish(s.query);
    return r;
  }

  json check_body(const Stmt& s, Options& o) {
    const std::string& qn = s.query;
    const auto& a = s.exprs;
    if (qn == "witt_trivial") {
      arity(s, 1, 1);
      const QForm& q = form_arg(a, 0);
      WittResult w = witt_trivial(q, witt_opts(o));
      json r = js(w);
      r["oracle"] = oracle(q, w, o);
      return r;
    }
    if (qn == "witt_equal") {
      arity(s, 2, 2);
      const QForm& p = form_arg(a, 0);
      const QForm& q = form_arg(a, 1);
      WittResult w = witt_equal(p, q, witt_opts(o));
      json r = js(w);
      r["oracle"] = oracle(orth_sum(p, q), w, o);
      return r;
    }
    if (qn == "arf") {
      arity(s, 1, 1);
      Elem v = arf(form_arg(a, 0));
      WpMembership m = wp_membership(v);
      json r{{"verdict", to_string(m.verdict)}, {"value", to_string(v)}};
      if (m.verdict == Verdict::yes) r["witness"] = to_string(m.witness);
      if (!m.obstruction.empty()) r["obstruction"] = m.obstruction;
      return r;
    }
    if (qn == "normalize") {
      arity(s, 1, 1);
      RawQuadratic raw = to_raw(form_arg(a, 0));
      Normalization n = normalize(raw);
      const bool ok = verify_normalization(raw, n);
      json steps = json::array();
      for (const auto& st : n.chain) {
        const char* k = st.kind == ChainStep::Kind::add ? "add" : st.kind == ChainStep::Kind::scale ? "scale" : "swap";
        json j{{"op", k}, {"i", st.i}, {"j", st.j}};
        if (st.kind != ChainStep::Kind::swap) j["c"] = to_string(st.c);
        steps.push_back(j);
      }
      return {{"verdict", ok ? "yes" : "no"}, {"form", js(n.form)},     {"steps", steps},
              {"order", n.order},           {"degenerate", n.degenerate}, {"dropped", n.dropped}};
    }
    if (qn == "isotropy") {
      arity(s, 1, 1);
      const QForm& q = form_arg(a, 0);
      const int degree = static_cast<int>(o.integer("degree", flags.degree_bound));
      IsotropyOptions iso;
      iso.lower_degree = static_cast<int>(o.integer("lower_degree", iso.lower_degree));
      iso.budget = o.integer("budget", iso.budget);
      auto v = isotropy_search(q, degree, iso);
      json r{{"verdict", v ? "yes" : "undecided"}, {"degree", degree}, {"lower_degree", iso.lower_degree}};
      if (v) r["vector"] = js(*v);
      return r;
    }
    if (qn == "represents") {
      arity(s, 2, 2);
      const QForm& q = form_arg(a, 0);
      return js(represents(q, elem_arg(a, 1, q.field), witt_opts(o)));
    }
    if (qn == "transfer") {
      arity(s, 1, 1);
      return {{"form", js(transfer(form_arg(a, 0)))}};
    }
    if (qn == "zero_test") {
      arity(s, 1, 1);
      return js(zero_test(class_arg(a, 0)));
    }
    if (qn == "clifford") {
      arity(s, 1, 1);
      return {{"class", js(clifford(form_arg(a, 0)))}};
    }
    if (qn == "e_map") {
      arity(s, 1, 1);
      const int level = static_cast<int>(o.integer("level", 1));
      return {{"class", js(e_map(form_arg(a, 0), level))}};
    }
    if (qn == "residue" || qn == "residue_h3") {
      arity(s, 2, 3);
      const bool h3 = qn == "residue_h3";
      const TowerPtr T = h3 ? class_arg(a, 0).rep.field : form_arg(a, 0).field;
      const std::string place_text = trim(a[1].text);
      Place P = place_text == "inf" ? place_infinity(T) : place_at(T, elem(a[1], T));
      std::optional<Elem> pi;
      if (a.size() == 3) pi = elem(a[2], base_field(T));
      json r{{"place", P.name()}, {"supported", P.supported()}};
      if (pi) r["uniformizer"] = to_string(*pi);
      if (h3) {
        const std::string kind = o.choice("kind", {"xi", "chi"}, "xi");
        r["kind"] = kind;
        r["class"] = js(residue_h3(class_arg(a, 0), P, kind, pi));
      } else {
        const std::string kind = o.choice("kind", {"delta", "Delta"}, "delta");
        r["kind"] = kind;
        QForm q = form_arg(a, 0);
        if (o.boolean("reduce", false)) q = residue_ready(q, P);
        QForm res = residue_quad(q, P, kind, pi);
        r["value"] = to_string(res);
        r["form"] = js(res);
      }
      return r;
    }
    if (qn == "quat_class") {
      arity(s, 1, 1);
      return {{"class", js(quat_class(find(quats, trim(a[0].text), "quaternion symbol")))}};
    }
    if (qn == "albert") {
      arity(s, 1, 1);
      const BiquatAlg& B = biq_arg(a, 0);
      QForm phi = albert_form(B);
      Elem ar = arf(phi);
      ZeroTest z = zero_test(class_of(clifford_form(phi)) + biquat_class(B));
      const bool ok = ar.is_zero() && z.verdict == Verdict::yes;
      return {{"verdict", ok ? "yes" : to_string(z.verdict == Verdict::undecided ? Verdict::undecided : Verdict::no)},
              {"form", js(phi)},
              {"arf", to_string(ar)},
              {"clifford_check", js(z)}};
    }
    if (qn == "cor_zero") {
      arity(s, 1, 1);
      return js(cor_zero(biq_arg(a, 0)));
    }
    if (qn == "delta_decide") {
      arity(s, 1, 1);
      LambdaBounds b = lambda_opts(o);
      const int rb = static_cast<int>(o.integer("reconstruct_bound", 2));
      const bool on = o.boolean("oracle", flags.oracle);
      DescentReport d = delta_decide(biq_arg(a, 0), b, rb);
      json r{{"verdict", to_string(d.verdict)}, {"input", to_string(d.input)}, {"cor_zero", js(d.cor_check)},
             {"phi", js(d.phi)},                {"tr_phi", js(d.tr_phi)}};
      if (d.e3_rep) r["e3"] = js(*d.e3_rep);
      if (!d.e3_note.empty()) r["e3_note"] = d.e3_note;
      if (d.certificate) {
        json c{{"lambda", to_string(*d.certificate)}};
        if (d.certificate_check) {
          c["check"] = js(*d.certificate_check);
          if (on && !verify_chain(transfer(scale(*d.certificate, d.phi)), d.certificate_check->chain))
            throw Error("oracle: the descent certificate does not verify");
        }
        r["certificate"] = c;
      }
      r["reconstruction"] = d.reconstructed ? js(*d.reconstructed) : json(nullptr);
      if (!d.reconstruction_note.empty()) r["reconstruction_note"] = d.reconstruction_note;
      r["search"] = js(d.search_budget);
      r["lambdas_tried"] = d.lambdas_tried;
      if (!d.diagnostics.empty()) r["diagnostics"] = d.diagnostics;
      return r;
    }
    if (qn == "lambda_search") {
      arity(s, 1, 1);
      const QForm& q = form_arg(a, 0);
      LambdaBounds b = lambda_opts(o);
      LambdaSearch ls = lambda_search(q, b);
      json r{{"verdict", ls.lambda ? "yes" : "undecided"}};
      r.update(js(ls));
      if (ls.lambda) r["check"] = js(witt_trivial(transfer(scale(*ls.lambda, q)), b.witt));
      return r;
    }
    if (qn == "reconstruct") {
      arity(s, 2, 2);
      const QForm& q = form_arg(a, 1);
      Elem lambda = elem_arg(a, 0, q.field);
      std::string note;
      auto rc = reconstruct(lambda, q, static_cast<int>(o.integer("bound", 2)), &note);
      json r{{"verdict", rc ? "yes" : "undecided"}};
      if (rc) r.update(js(*rc));
      if (!note.empty()) r["note"] = note;
      return r;
    }
    if (qn == "scale_identity") {
      arity(s, 2, 2);
      const BiquatAlg& B = biq_arg(a, 0);
      ScaleIdentity si = scale_identity_check(B, elem_arg(a, 1, B.field()));
      json lv = json::array();
      for (const auto& z : si.level_one) lv.push_back(js(z));
      json r{{"verdict", to_string(si.verdict)}, {"status", si.status}, {"level_one", lv}};
      if (si.difference) r["difference"] = js(*si.difference);
      if (!si.diagnostics.empty()) r["diagnostics"] = si.diagnostics;
      return r;
    }
    if (qn == "injection") {
      arity(s, 4, 4);
      const CohClass& w = class_arg(a, 0);
      const CohClass& c = class_arg(a, 1);
      InjectionReport ir = injection_instance(w, c, elem_arg(a, 2, c.rep.field), elem_arg(a, 3, current()));
      json places = json::array();
      for (const auto& p : ir.places) places.push_back({{"place", p.place}, {"supported", p.supported}});
      json r{{"verdict", to_string(ir.verdict)}, {"t_divides_f", ir.t_divides_f}, {"z", js(ir.z)},
             {"xi", js(ir.xi)},                  {"chi", js(ir.chi)}};
      if (ir.xi_formula) r["xi_formula"] = js(*ir.xi_formula);
      if (ir.xi_zero) r["xi_zero"] = js(*ir.xi_zero);
      if (ir.norm_condition) r["norm_condition"] = js(*ir.norm_condition);
      if (ir.c_condition) r["c_condition"] = js(*ir.c_condition);
      if (ir.w_condition) r["w_condition"] = js(*ir.w_condition);
      r["places"] = places;
      r["unsupported"] = ir.unsupported;
      if (!ir.diagnostics.empty()) r["diagnostics"] = ir.diagnostics;
      return r;
    }
    if (qn == "odd_extension") {
      arity(s, 1, 1);
      const int m = static_cast<int>(o.integer("m", 3));
      LambdaBounds b = lambda_opts(o);
      OddExtension oe = odd_extension_check(biq_arg(a, 0), m, b, b);
      const char* v = oe.violation ? "no" : oe.extended.lambda && oe.base.lambda ? "yes" : "undecided";
      json r{{"verdict", v}, {"m", oe.m}, {"extended", js(oe.extended)}, {"base", js(oe.base)},
             {"violation", oe.violation}};
      if (!oe.report.empty()) r["report"] = oe.report;
      return r;
    }
    throw Error("unknown query '" + qn + "'");
  }
};

const char* kind_name(Stmt::Kind k) {
  switch (k) {
    case Stmt::Kind::field: return "field";
    case Stmt::Kind::ext: return "ext";
    case Stmt::Kind::let: return "let";
    case Stmt::Kind::form: return "form";
    case Stmt::Kind::quat: return "quat";
    case Stmt::Kind::biq: return "biq";
    case Stmt::Kind::cls: return "class";
    case Stmt::Kind::check: return "check";
  }
  return "";
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

json diagnostics_json(const std::vector<Diagnostic>& ds) {
  json a = json::array();
  for (const auto& d : ds)
    a.push_back({{"line", d.line}, {"column", d.column}, {"message", d.message}, {"expected", d.expected}});
  return a;
}

// Runs one statement; errors and unsupported inputs are folded into the entry.
json execute(Interp& in, const Stmt& s, int index, int& errors) {
  json e{{"index", index}, {"line", s.line}, {"kind", kind_name(s.kind)}, {"source", print(s)}};
  if (s.kind == Stmt::Kind::check)
    e["query"] = s.query;
  else
    e["name"] = s.name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    e["result"] = s.kind == Stmt::Kind::check ? in.check(s) : in.declare(s);
  } catch (const Unsupported& u) {
    e["result"] = {{"verdict", "undecided"}, {"diagnostics", {std::string("unsupported: ") + u.what()}}};
  } catch (const Error& err) {
    if (s.kind == Stmt::Kind::check && budget_error(err)) {
      e["result"] = {{"verdict", "undecided"}, {"diagnostics", {err.what()}}};
    } else {
      e["error"] = err.what();
      ++errors;
    }
  } catch (const std::exception& err) {
    e["error"] = std::string("internal error: ") + err.what();
    ++errors;
  }
  e["time_ms"] = ms_since(t0);
  return e;
}

}  // namespace

RunOutput run(const Ast& ast, const std::string& text, const Flags& flags) {
  const auto t0 = std::chrono::steady_clock::now();
  Interp in(flags);
  RunOutput out;
  json stmts = json::array();
  for (std::size_t i = 0; i < ast.stmts.size(); ++i)
    stmts.push_back(execute(in, ast.stmts[i], static_cast<int>(i), out.errors));
  json report{{"schema", 1},
              {"version", kVersion},
              {"mode", "run"},
              {"seed", flags.seed},
              {"flags", {{"degree_bound", flags.degree_bound}, {"oracle", flags.oracle ? "on" : "off"}}},
              {"script", text},
              {"diagnostics", json::array()},
              {"statements", stmts},
              {"errors", out.errors},
              {"time_ms", ms_since(t0)}};
  out.json = report.dump(2);
  return out;
}

RunOutput run(const std::string& text, const Flags& flags) {
  ParseResult p = parse(text);
  RunOutput out = run(p.ast, text, flags);
  if (p.ok()) return out;
  json report = json::parse(out.json);
  report["diagnostics"] = diagnostics_json(p.diagnostics);
  out.errors += static_cast<int>(p.diagnostics.size());
  report["errors"] = out.errors;
  out.json = report.dump(2);
  return out;
}

RunOutput verify(const std::string& report_json) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutput out;
  json src;
  try {
    src = json::parse(report_json);
  } catch (const json::exception& e) {
    out.errors = 1;
    out.json = json{{"schema", 1}, {"mode", "verify"}, {"error", std::string("malformed report: ") + e.what()}}.dump(2);
    return out;
  }
  json checks = json::array();
  auto fail_all = [&](const std::string& why) {
    out.errors = 1;
    out.json = json{{"schema", 1}, {"mode", "verify"}, {"error", why}}.dump(2);
    return out;
  };
  if (!src.contains("schema") || src["schema"] != 1 || !src.contains("script") || !src.contains("statements"))
    return fail_all("not a schema 1 run report");

  Flags flags;
  flags.seed = src.value("seed", 1UL);
  flags.degree_bound = src["flags"].value("degree_bound", 2);
  flags.oracle = false;
  ParseResult p = parse(src["script"].get<std::string>());
  if (!p.ok()) return fail_all("the embedded script does not parse");
  const json& entries = src["statements"];
  if (entries.size() != p.ast.stmts.size()) return fail_all("statement count does not match the script");

  Interp in(flags);
  for (std::size_t i = 0; i < p.ast.stmts.size(); ++i) {
    const Stmt& s = p.ast.stmts[i];
    const json& e = entries[i];
    if (s.kind != Stmt::Kind::check) {
      try {
        in.declare(s);
      } catch (const Error&) {
        // The run recorded the same failure; later uses fail the same way.
      }
      continue;
    }
    if (!e.contains("result")) continue;
    const json& r = e["result"];
    const std::string verdict = r.value("verdict", "");
    if (verdict != "yes" && verdict != "descends") continue;
    json c{{"index", i}, {"line", s.line}, {"query", s.query}, {"verdict", verdict}};
    bool ok = false;
    try {
      if ((s.query == "witt_trivial" || s.query == "witt_equal") && r.contains("chain")) {
        QForm q = in.form_arg(s.exprs, 0);
        if (s.query == "witt_equal") q = orth_sum(q, in.form_arg(s.exprs, 1));
        c["method"] = "chain";
        ok = verify_chain(q, read_chain(r["chain"], q.field));
      } else if (s.query == "delta_decide" && r.contains("certificate") && r["certificate"].contains("check") &&
                 r["certificate"]["check"].contains("chain")) {
        const BiquatAlg& B = in.biq_arg(s.exprs, 0);
        const Elem lambda = parse_elem(B.field(), r["certificate"]["lambda"].get<std::string>());
        const QForm tq = transfer(scale(lambda, albert_form(B)));
        c["method"] = "chain";
        ok = verify_chain(tq, read_chain(r["certificate"]["check"]["chain"], tq.field));
      } else if (s.query == "lambda_search" && r.contains("check") && r["check"].contains("chain")) {
        const QForm& q = in.form_arg(s.exprs, 0);
        const Elem lambda = parse_elem(q.field, r["lambda"].get<std::string>());
        const QForm tq = transfer(scale(lambda, q));
        c["method"] = "chain";
        ok = verify_chain(tq, read_chain(r["check"]["chain"], tq.field));
      } else if (s.query == "isotropy" && r.contains("vector")) {
        const QForm& q = in.form_arg(s.exprs, 0);
        Vec v;
        for (const auto& x : r["vector"]) v.push_back(parse_elem(q.field, x.get<std::string>()));
        bool nonzero = false;
        for (const auto& x : v) nonzero = nonzero || !x.is_zero();
        c["method"] = "vector";
        ok = nonzero && static_cast<int>(v.size()) == q.dim() && qform_value(q, v).is_zero();
      } else {
        c["method"] = "recomputed";
        json again = in.check(s);
        ok = again.value("verdict", "") == verdict;
      }
    } catch (const std::exception& err) {
      c["error"] = err.what();
    }
    c["ok"] = ok;
    if (!ok) ++out.errors;
    checks.push_back(c);
  }
  json report{{"schema", 1},      {"version", kVersion},   {"mode", "verify"},
              {"checks", checks}, {"errors", out.errors}, {"time_ms", ms_since(t0)}};
  out.json = report.dump(2);
  return out;
}

}  // namespace kmd::script
