#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lvorb/errors.hpp"
#include "lvorb/io.hpp"
#include "lvorb/orbifold.hpp"

namespace py = pybind11;
using namespace lvorb;

namespace {

py::dict series_dict(const QSeries& s) {
  py::list terms;
  for (const auto& [e, c] : s.terms()) terms.append(py::make_tuple(e.get_str(), c.str(), c.to_complex()));
  py::dict d;
  d["order"] = s.order() ? s.order()->get_str() : std::string("exact");
  d["summary"] = s.summary();
  d["terms"] = terms;
  d["text"] = s.str();
  return d;
}

ZMat to_zmat(const std::vector<std::vector<long>>& rows) {
  std::vector<std::vector<ZZ>> z;
  for (const auto& r : rows) z.emplace_back(r.begin(), r.end());
  return ZMat::from_rows(z);
}

LiftedGroup group_of(const LatticeFile& f, const std::string& spec, const std::vector<std::string>& words) {
  if (!spec.empty()) return lift_group(f.lattice, f.auts, parse_group_spec(spec));
  GroupSpec s;
  s.kind = GroupKind::Generic;
  for (const auto& w : words)
    if (w != "e" && !w.empty()) s.generators.push_back(w);
  if (s.generators.empty()) return cyclic_lifted(identity_lift(f.lattice), "e");
  return lift_group(f.lattice, f.auts, s);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact characters of lattice VOA orbifolds";

  static py::exception<Error> exc(m, "LvorbError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = exc;
      py::object inst = err(std::string(e.name()) + ": " + e.what());
      inst.attr("name") = e.name();
      inst.attr("exit_code") = static_cast<int>(e.code());
      PyErr_SetObject(err.ptr(), inst.ptr());
    }
  });

  m.def("snf", [](const std::vector<std::vector<long>>& rows) {
    std::vector<std::string> out;
    for (const auto& d : smith_normal_form(to_zmat(rows)).divisors) out.push_back(d.get_str());
    return out;
  }, py::arg("matrix"));

  m.def("load_lattice", [](const std::string& path) {
    LatticeFile f = parse_lattice(path);
    py::dict d;
    d["rank"] = f.lattice.rank();
    d["even"] = f.lattice.even;
    d["unimodular"] = f.lattice.unimodular;
    d["automorphisms"] = f.aut_names;
    return d;
  }, py::arg("path"));

  m.def("analyze", [](const std::string& path, const std::string& aut) {
    LatticeFile f = parse_lattice(path);
    auto it = f.auts.find(aut);
    if (it == f.auts.end()) throw ValidationError("unknown automorphism '" + aut + "'");
    AutomorphismData A = analyze_automorphism(f.lattice, it->second);
    py::dict d;
    d["order"] = A.order;
    d["cycle_type"] = A.cycle_type.str();
    d["rho"] = A.rho().get_str();
    d["fixed_rank"] = A.fixed_rank();
    std::vector<std::string> divs;
    for (const auto& x : A.divisors) divs.push_back(x.get_str());
    d["divisors"] = divs;
    d["type"] = type_of(f.lattice, standard_lift(f.lattice, it->second));
    return d;
  }, py::arg("path"), py::arg("aut"));

  m.def("twining", [](const std::string& path, const std::string& g, const std::string& h, const std::string& order,
                      const std::string& group) {
    LatticeFile f = parse_lattice(path);
    Orbifold orb(f.lattice, group_of(f, group, {g, h}));
    std::size_t a = orb.group().parse_word(g), b = orb.group().parse_word(h);
    py::dict d = series_dict(orb.twining(a, b, parse_rational(order)));
    d["provenance"] = orb.provenance(a, b);
    return d;
  }, py::arg("path"), py::arg("g"), py::arg("h"), py::arg("order") = "2", py::arg("group") = "");

  m.def("anomaly", [](const std::string& path, const std::string& group) {
    LatticeFile f = parse_lattice(path);
    return anomaly_check(lift_group(f.lattice, f.auts, parse_group_spec(group)), f.lattice).str();
  }, py::arg("path"), py::arg("group"));

  m.def("orbifold", [](const std::string& path, const std::string& group, const std::string& order) {
    LatticeFile f = parse_lattice(path);
    Orbifold orb(f.lattice, lift_group(f.lattice, f.auts, parse_group_spec(group)));
    return series_dict(orb.general_orbifold(parse_rational(order)).character);
  }, py::arg("path"), py::arg("group"), py::arg("order") = "2");

  m.def("module_characters", [](const std::string& path, const std::string& group, const std::string& order) {
    LatticeFile f = parse_lattice(path);
    Orbifold orb(f.lattice, lift_group(f.lattice, f.auts, parse_group_spec(group)));
    py::dict out;
    for (const auto& mc : orb.module_characters(parse_rational(order))) out[py::str(mc.label)] = series_dict(mc.series);
    return out;
  }, py::arg("path"), py::arg("group"), py::arg("order") = "2");

  m.def("bounds", [](long d, long n, std::optional<long> observed) {
    BoundsReport b = abelian_lower_bounds(primitive_exponents(d, n), n, observed);
    py::dict r;
    r["d"] = b.d;
    r["level2"] = b.level2;
    r["bound2"] = b.bound2;
    r["level3"] = b.level3;
    r["bound3"] = b.bound3;
    r["excluded"] = b.excluded;
    r["text"] = b.str();
    return r;
  }, py::arg("d"), py::arg("n"), py::arg("observed") = py::none());
}
