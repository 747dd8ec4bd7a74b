#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include "kmd/brauer.hpp"
#include "kmd/descent.hpp"
#include "kmd/error.hpp"
#include "kmd/residues.hpp"
#include "kmd/script.hpp"

namespace py = pybind11;
using namespace kmd;

namespace {

py::list strings(const std::vector<Elem>& v) {
  py::list out;
  for (const auto& x : v) out.append(to_string(x));
  return out;
}

py::dict witt_dict(const WittResult& w) {
  py::dict d;
  d["verdict"] = to_string(w.verdict);
  d["method"] = w.method;
  py::list chain;
  for (const auto& h : w.chain) chain.append(py::make_tuple(strings(h.e), strings(h.f)));
  d["chain"] = chain;
  d["obstruction"] = w.obstruction;
  d["place"] = w.place ? py::cast(w.place->name()) : py::none();
  d["residue"] = w.residue ? py::cast(to_string(*w.residue)) : py::none();
  return d;
}

py::dict zero_dict(const ZeroTest& z) {
  py::dict d;
  d["verdict"] = to_string(z.verdict);
  d["method"] = z.method;
  d["place"] = z.place ? py::cast(z.place->name()) : py::none();
  d["obstruction"] = z.obstruction;
  return d;
}

struct Field {
  TowerPtr t;
};

Place place_of(const TowerPtr& T, const py::object& where) {
  if (py::isinstance<py::str>(where)) {
    const auto s = where.cast<std::string>();
    if (s == "inf") return place_infinity(T);
    return place_at(T, parse_elem(base_field(T), s));
  }
  return place_at(T, where.cast<Elem>());
}

}  // namespace

PYBIND11_MODULE(kmd, m) {
  m.doc() = "Quadratic forms and Kato-Milne cohomology over towers of function fields in characteristic 2";

  auto base_error = py::register_exception<Error>(m, "KmdError", PyExc_RuntimeError);
  py::register_exception<Unsupported>(m, "Unsupported", base_error.ptr());

  py::class_<Field>(m, "Field")
      .def_property_readonly("k", [](const Field& f) { return f.t->k; })
      .def_property_readonly("vars", [](const Field& f) { return f.t->vars; })
      .def_property_readonly("is_extension", [](const Field& f) { return f.t->has_ext; })
      .def_property_readonly("base", [](const Field& f) { return Field{base_field(f.t)}; })
      .def("__eq__", [](const Field& a, const Field& b) { return same_tower(a.t, b.t); })
      .def("__repr__", [](const Field& f) { return describe(f.t); });

  m.def(
      "field", [](int k, std::vector<std::string> vars) { return Field{make_field(k, std::move(vars))}; },
      py::arg("k"), py::arg("vars") = std::vector<std::string>{}, "GF(2^k)(vars...)");
  m.def(
      "extension",
      [](const Field& F, const std::string& name, const py::object& a) {
        Elem x = py::isinstance<py::str>(a) ? parse_elem(F.t, a.cast<std::string>()) : a.cast<Elem>();
        return Field{make_ext(F.t, name, x)};
      },
      py::arg("base"), py::arg("name"), py::arg("a"), "base[name] with name^2 + name = a");

  py::class_<Elem>(m, "Elem")
      .def_property_readonly("field", [](const Elem& x) { return Field{x.tower()}; })
      .def("is_zero", &Elem::is_zero)
      .def("is_one", &Elem::is_one)
      .def(py::self + py::self)
      .def(py::self * py::self)
      .def(py::self / py::self)
      .def(py::self == py::self)
      .def("__str__", [](const Elem& x) { return to_string(x); })
      .def("__repr__", [](const Elem& x) { return "Elem(" + to_string(x) + ")"; });
  m.def("elem", [](const Field& F, const std::string& s) { return parse_elem(F.t, s); });
  m.def("var", [](const Field& F, int j) { return var(F.t, j); });
  m.def("alpha", [](const Field& F) { return alpha(F.t); });
  m.def("lift", [](const Elem& x, const Field& F) { return lift(x, F.t); });
  m.def("wp", &wp);
  m.def("trace", &trace);
  m.def("norm", &norm);
  m.def("wp_membership", [](const Elem& x) {
    WpMembership w = wp_membership(x);
    py::dict d;
    d["verdict"] = to_string(w.verdict);
    d["witness"] = w.verdict == Verdict::yes ? py::cast(to_string(w.witness)) : py::none();
    d["obstruction"] = w.obstruction;
    return d;
  });

  py::class_<QForm>(m, "QForm")
      .def_property_readonly("field", [](const QForm& q) { return Field{q.field}; })
      .def_property_readonly("dim", &QForm::dim)
      .def_property_readonly("pairs",
                             [](const QForm& q) {
                               py::list out;
                               for (const auto& p : q.pairs) out.append(py::make_tuple(p.a, p.b));
                               return out;
                             })
      .def("__add__", [](const QForm& p, const QForm& q) { return orth_sum(p, q); })
      .def("__rmul__", [](const QForm& q, const Elem& c) { return scale(c, q); })
      .def("__str__", [](const QForm& q) { return to_string(q); })
      .def("__repr__", [](const QForm& q) { return "QForm(" + to_string(q) + ")"; });
  m.def("pair", [](const Elem& a, const Elem& b) { return make_qform(a.tower(), {QPair{a, b}}); },
        py::arg("a"), py::arg("b"), "a[1,b]");
  m.def("unit_pair", &unit_pair);
  m.def(
      "hyperbolic", [](const Field& F, int planes) { return hyperbolic(F.t, planes); }, py::arg("field"),
      py::arg("planes") = 1);
  m.def("pfister", &pfister, py::arg("slots"), py::arg("b"), "<<slots..., b]]");
  m.def("orth_sum", &orth_sum);
  m.def("scale", &scale);
  m.def("extend", [](const QForm& q, const Field& K) { return extend(q, K.t); });
  m.def("transfer", &transfer);
  m.def("arf", &arf);
  m.def(
      "witt_trivial",
      [](const QForm& q, int search_degree, int lower_degree) {
        WittOptions o;
        o.search_degree = search_degree;
        o.lower_degree = lower_degree;
        return witt_dict(witt_trivial(q, o));
      },
      py::arg("q"), py::arg("search_degree") = 1, py::arg("lower_degree") = 1);
  m.def("witt_equal", [](const QForm& p, const QForm& q) { return witt_dict(witt_equal(p, q)); });
  m.def(
      "isotropy_search",
      [](const QForm& q, int degree, int lower_degree, long budget) -> py::object {
        auto v = isotropy_search(q, degree, IsotropyOptions{lower_degree, budget});
        if (!v) return py::none();
        return strings(*v);
      },
      py::arg("q"), py::arg("degree"), py::arg("lower_degree") = 1, py::arg("budget") = 5000000);
  m.def(
      "residue",
      [](const QForm& q, const py::object& place, const std::string& kind) {
        return residue_quad(q, place_of(q.field, place), kind);
      },
      py::arg("q"), py::arg("place"), py::arg("kind") = "delta");

  py::class_<CohClass>(m, "CohClass")
      .def_property_readonly("degree", [](const CohClass& c) { return c.rep.degree; })
      .def("__add__", [](const CohClass& a, const CohClass& b) { return a + b; })
      .def("__str__", [](const CohClass& c) { return to_string(c); });
  m.def(
      "symbol_class",
      [](const Field& F, const std::vector<std::pair<Elem, std::vector<Elem>>>& syms) {
        std::vector<Symbol> out;
        int degree = syms.empty() ? 0 : static_cast<int>(syms[0].second.size());
        for (const auto& [b, slots] : syms) out.push_back({b, slots});
        return class_of_symbols(F.t, degree, out);
      },
      py::arg("field"), py::arg("symbols"), "sum of b dlog s_1 ^ ... ^ dlog s_p");
  m.def("clifford", &clifford);
  m.def("e_map", &e_map, py::arg("q"), py::arg("level") = 1);
  m.def("zero_test", [](const CohClass& c) { return zero_dict(zero_test(c)); });

  py::class_<QuatSymbol>(m, "Quat").def("__str__", [](const QuatSymbol& q) { return to_string(q); });
  py::class_<BiquatAlg>(m, "Biquat").def("__str__", [](const BiquatAlg& b) { return to_string(b); });
  m.def("quat", &make_quat, py::arg("a"), py::arg("b"), "[a, b)");
  m.def("biquat", &make_biquat);
  m.def("albert_form", &albert_form);
  m.def("cor_zero", [](const BiquatAlg& B) {
    CorZero c = cor_zero(B);
    py::dict d;
    d["verdict"] = to_string(c.verdict);
    d["omega_route"] = c.omega ? py::object(zero_dict(*c.omega)) : py::none();
    d["forms_route"] = c.forms ? py::object(zero_dict(*c.forms)) : py::none();
    return d;
  });
  m.def(
      "delta_decide",
      [](const BiquatAlg& B, int degree, int lower_degree, long budget) {
        LambdaBounds b;
        b.degree = degree;
        b.lower_degree = lower_degree;
        b.budget = budget;
        DescentReport r = delta_decide(B, b);
        py::dict d;
        d["verdict"] = to_string(r.verdict);
        d["lambda"] = r.certificate ? py::cast(to_string(*r.certificate)) : py::none();
        d["certificate_verified"] =
            r.certificate && r.certificate_check &&
            verify_chain(transfer(scale(*r.certificate, r.phi)), r.certificate_check->chain);
        d["phi0"] = r.reconstructed ? py::cast(to_string(r.reconstructed->phi0)) : py::none();
        d["B0"] = r.reconstructed ? py::cast(to_string(r.reconstructed->B0)) : py::none();
        d["lambdas_tried"] = r.lambdas_tried;
        return d;
      },
      py::arg("B"), py::arg("degree") = 2, py::arg("lower_degree") = 0, py::arg("budget") = 20000);

  m.def(
      "run_script",
      [](const std::string& text, int degree_bound, bool oracle, unsigned long seed) {
        script::Flags f;
        f.degree_bound = degree_bound;
        f.oracle = oracle;
        f.seed = seed;
        script::RunOutput out = script::run(text, f);
        return py::make_tuple(out.json, out.errors);
      },
      py::arg("text"), py::arg("degree_bound") = 2, py::arg("oracle") = true, py::arg("seed") = 1,
      "Run a script; returns (report JSON, error count)");
  m.def(
      "verify_report",
      [](const std::string& report) {
        script::RunOutput out = script::verify(report);
        return py::make_tuple(out.json, out.errors);
      },
      "Replay the certificates of a report; returns (JSON, failed checks)");
}
