#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "lvorb/errors.hpp"
#include "lvorb/io.hpp"
#include "lvorb/orbifold.hpp"

using namespace lvorb;
using json = nlohmann::ordered_json;

namespace {

struct Common {
  std::string format = "text";
  std::string order = "2";
  std::string cache;
  std::string theta;
  std::string lattice;
  std::string group;
};

json series_json(const QSeries& s) {
  json t = json::array();
  for (const auto& [e, c] : s.terms()) t.push_back({{"exponent", e.get_str()}, {"coefficient", c.str()}});
  return {{"order", s.order() ? s.order()->get_str() : "exact"}, {"summary", s.summary()}, {"terms", t}};
}

std::string join(const std::vector<ZZ>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].get_str();
  return s;
}

class Report {
 public:
  Report(std::string cmd, const Common& c) : cmd_(std::move(cmd)), json_(c.format == "json") {}
  void line(const std::string& key, const std::string& value, json j) {
    lines_.push_back(key.empty() ? value : key + ": " + value);
    result_[key.empty() ? "value" : key] = std::move(j);
  }
  void line(const std::string& key, const std::string& value) { line(key, value, value); }
  void text(const std::string& t) { lines_.push_back(t); }
  json& result() { return result_; }
  void print() const {
    if (json_) {
      std::cout << json{{"command", cmd_}, {"status", "ok"}, {"result", result_}}.dump(2) << "\n";
    } else {
      for (const auto& l : lines_) std::cout << l << "\n";
    }
  }

 private:
  std::string cmd_;
  bool json_;
  std::vector<std::string> lines_;
  json result_ = json::object();
};

struct Loaded {
  LatticeFile file;
  std::unique_ptr<CharacterCache> cache;
};

Loaded load(const Common& c) {
  Loaded l{parse_lattice(c.lattice), nullptr};
  if (!c.cache.empty()) l.cache = std::make_unique<CharacterCache>(c.cache);
  if (!c.theta.empty()) {
    std::ifstream in(c.theta);
    if (!in) throw IoError("cannot open '" + c.theta + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    set_full_theta(l.file.lattice, QSeries::deserialize(ss.str()));
  }
  return l;
}

const ZMat& aut(const LatticeFile& f, const std::string& name) {
  auto it = f.auts.find(name);
  if (it == f.auts.end()) throw ValidationError("unknown automorphism '" + name + "' in " + f.path);
  return it->second;
}

LiftedGroup group_for(const LatticeFile& f, const std::string& spec) {
  if (spec.empty()) throw ValidationError("--group is required");
  return lift_group(f.lattice, f.auts, parse_group_spec(spec));
}

// names occurring in group words such as "t^2*s"
std::vector<std::string> word_names(const std::vector<std::string>& words) {
  std::vector<std::string> out;
  for (const auto& w : words) {
    std::istringstream is(w);
    for (std::string tok; std::getline(is, tok, '*');) {
      std::string n = tok.substr(0, tok.find('^'));
      if (n.empty() || n == "e" || n == "1") continue;
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    }
  }
  return out;
}

json matrix_json(const CMat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j).str());
    rows.push_back(r);
  }
  return rows;
}

void cmd_snf(const Common& c, const std::string& mat) {
  Report r("snf", c);
  auto s = smith_normal_form(parse_matrix(mat));
  json d = json::array();
  for (const auto& x : s.divisors) d.push_back(x.get_str());
  r.line("", join(s.divisors), d);
  r.result()["nullity"] = s.nullity;
  r.print();
}

void cmd_analyze(const Common& c, const std::string& name) {
  Report r("analyze", c);
  auto l = load(c);
  const GramLattice& L = l.file.lattice;
  r.line("rank", std::to_string(L.rank()), L.rank());
  r.line("even", L.even ? "yes" : "no", L.even);
  r.line("unimodular", L.unimodular ? "yes" : "no", L.unimodular);
  if (name.empty() || name == "e") {
    r.print();
    return;
  }
  const ZMat& g = aut(l.file, name);
  AutomorphismData A = analyze_automorphism(L, g);
  r.line("order", std::to_string(A.order), A.order);
  r.line("cycle type", A.cycle_type.str());
  r.line("rho", A.rho().get_str());
  r.line("fixed rank", std::to_string(A.fixed_rank()), A.fixed_rank());
  json d = json::array();
  for (const auto& x : A.divisors) d.push_back(x.get_str());
  r.line("elementary divisors of 1-g", join(A.divisors), d);
  QuotientPresentation Q = torsion_quotient(L, g);
  r.line("|N|", Q.cardinality.get_str());
  try {
    r.line("defect dimension", Q.defect_dimension().get_str());
  } catch (const NonSquareQuotient&) {
    r.line("defect dimension", "none (|N| is not a square)", nullptr);
  }
  r.print();
}

void cmd_lift(const Common& c, const std::string& name) {
  Report r("lift", c);
  auto l = load(c);
  Lift x = standard_lift(l.file.lattice, aut(l.file, name));
  json w = json::array();
  std::string ws;
  for (const auto& v : x.basis_phases()) {
    w.push_back(v.get_str());
    ws += (ws.empty() ? "" : " ") + v.get_str();
  }
  r.line("basis phases", ws, w);
  LiftOrder o = lift_order(x);
  r.line("lattice order", std::to_string(o.lattice_order), o.lattice_order);
  r.line("lift order", std::to_string(o.lift_order), o.lift_order);
  r.line("order doubled", o.doubled() ? "yes" : "no", o.doubled());
  r.line("standard", is_standard(x) ? "yes" : "no", is_standard(x));
  r.print();
}

void cmd_split(const Common& c) {
  Report r("split-lift", c);
  auto l = load(c);
  LiftedGroup G = group_for(l.file, c.group);
  r.line("group order", std::to_string(G.group.size()), G.group.size());
  r.line("acting generator adjusted", G.split_adjusted ? "yes" : "no", G.split_adjusted);
  for (std::size_t i = 0; i < G.gen_lifts.size(); ++i) {
    std::string ws;
    for (const auto& v : G.gen_lifts[i].basis_phases()) ws += (ws.empty() ? "" : " ") + v.get_str();
    r.line(G.group.generator_names[i], ws);
  }
  r.print();
}

void cmd_twisted(const Common& c, const std::string& name) {
  Report r("twisted", c);
  auto l = load(c);
  const GramLattice& L = l.file.lattice;
  TwistedModuleData W = build_twisted_module(L, standard_lift(L, aut(l.file, name)));
  r.line("defect dimension", std::to_string(W.dim), W.dim);
  std::string ns;
  json nj = json::array();
  for (long v : W.darboux.n) {
    ns += (ns.empty() ? "" : " ") + std::to_string(v);
    nj.push_back(v);
  }
  r.line("Darboux orders", ns.empty() ? "-" : ns, nj);
  r.line("rho", W.rho.get_str());
  long bad = 0, total = 0;
  for (const auto& v : vectors_by_norm(L.gram, QQ(2))) {
    ++total;
    if (!twist_compat_check(W, v)) ++bad;
  }
  r.line("twist compatibility", std::to_string(total - bad) + "/" + std::to_string(total) + " vectors of norm <= 4");
  r.result()["twist compatibility failures"] = bad;
  r.print();
}

void cmd_twining(const Common& c, const std::string& gw, const std::string& hw) {
  Report r("twining", c);
  auto l = load(c);
  const GramLattice& L = l.file.lattice;
  LiftedGroup G;
  if (!c.group.empty()) {
    G = group_for(l.file, c.group);
  } else {
    auto names = word_names({gw, hw});
    if (names.empty()) {
      G = cyclic_lifted(identity_lift(L), "e");
    } else {
      GroupSpec s;
      s.kind = GroupKind::Generic;
      s.generators = names;
      G = lift_group(L, l.file.auts, s);
    }
  }
  Orbifold orb(L, G, l.cache.get());
  std::size_t g = orb.group().parse_word(gw), h = orb.group().parse_word(hw);
  if (!orb.group().commute(g, h)) throw NotCommuting(gw + " and " + hw + " do not commute");
  const QSeries& s = orb.twining(g, h, parse_rational(c.order));
  r.line("T(" + orb.group().names[g] + "," + orb.group().names[h] + ")", s.str(), series_json(s));
  r.line("provenance", orb.provenance(g, h));
  r.line("normalization", orb.action(g).normalization);
  r.print();
}

void cmd_type(const Common& c, const std::string& name) {
  Report r("type", c);
  auto l = load(c);
  long t = type_of(l.file.lattice, standard_lift(l.file.lattice, aut(l.file, name)));
  r.line("type", std::to_string(t), t);
  r.print();
}

json type_list(const std::vector<TypeEntry>& v) {
  json a = json::array();
  for (const auto& e : v) a.push_back({{"name", e.name}, {"order", e.order}, {"type", e.type}});
  return a;
}

void cmd_anomaly(const Common& c) {
  Report r("anomaly", c);
  auto l = load(c);
  LiftedGroup G = group_for(l.file, c.group);
  AnomalyReport a = anomaly_check(G, l.file.lattice);
  r.line("", a.str());
  r.result()["verdict"] = a.verdict == Verdict::Trivial ? "trivial" : a.verdict == Verdict::Anomalous ? "anomalous" : "undecided";
  r.result()["decisive"] = type_list(a.decisive);
  r.result()["cyclic subgroups"] = type_list(a.cyclic);
  for (const auto& e : a.cyclic) r.text("  <" + e.name + "> order " + std::to_string(e.order) + " type " + std::to_string(e.type));
  r.print();
}

void cmd_orbifold(const Common& c, bool effcyc) {
  Report r("orbifold", c);
  auto l = load(c);
  const GramLattice& L = l.file.lattice;
  const QQ order = parse_rational(c.order);
  GroupSpec spec = parse_group_spec(c.group);
  LiftedGroup G = lift_group(L, l.file.auts, spec);
  QSeries ch;
  if (effcyc) {
    if (spec.kind != GroupKind::Semidirect) throw ValidationError("--effcyc needs a semidirect group");
    AnomalyReport a = anomaly_check(G, L);
    if (a.verdict != Verdict::Trivial) throw AnomalousOrbifold("the cohomological twist is non-trivial: " + a.str());
    ch = effcyc_orbifold_char(L, G.gen_lifts[1], G.gen_lifts[0], spec.q, spec.p, spec.phi, order, l.cache.get());
  } else {
    Orbifold orb(L, G, l.cache.get());
    OrbifoldResult res = orb.general_orbifold(order);
    ch = res.character;
    json orbits = json::array();
    for (const auto& o : res.orbits) {
      json e = {{"length", o.pairs.size()}, {"meets untwisted", o.meets_untwisted}, {"positive weights", o.positive_weights}};
      if (!o.meets_untwisted && o.positive_weights) e["contribution"] = series_json(o.contribution);
      orbits.push_back(e);
    }
    r.result()["orbits"] = orbits;
    r.result()["direct equals shortcut"] = res.direct == res.character;
  }
  if (spec.kind == GroupKind::Semidirect) {
    auto ct = [&](std::size_t i) { return analyze_automorphism(L, G.gen_lifts[i].matrix()).cycle_type.str(); };
    r.text(std::to_string(spec.q) + "\t" + ct(1) + "\t" + std::to_string(spec.p) + "\t" + ct(0) + "\t" +
           std::to_string(spec.phi) + "\t" + ch.summary());
  }
  r.line("character", ch.summary(), series_json(ch));
  r.line("series", ch.str());
  r.print();
}

void cmd_modules(const Common& c) {
  Report r("modules", c);
  auto l = load(c);
  Orbifold orb(l.file.lattice, group_for(l.file, c.group), l.cache.get());
  json mods = json::array();
  for (const auto& m : orb.module_characters(parse_rational(c.order))) {
    r.text("chi_" + m.label + " = " + m.series.str());
    json w = json::object();
    for (const auto& [h, x] : m.weights) w[orb.group().names[h]] = x.str();
    mods.push_back({{"label", m.label}, {"degree", m.degree}, {"weights", w}, {"series", series_json(m.series)}});
  }
  r.result()["modules"] = mods;
  r.print();
}

void cmd_st(const Common& c) {
  Report r("stmatrices", c);
  auto l = load(c);
  Orbifold orb(l.file.lattice, group_for(l.file, c.group), l.cache.get());
  ModularData md = orb.st_matrices(parse_rational(c.order));
  const std::size_t M = md.labels.size();
  r.result()["labels"] = md.labels;
  r.line("exact", md.exact ? "yes" : "no (least-squares fit of the S-transformation)", md.exact);
  std::ostringstream def;
  def << md.unitarity_defect;
  r.line("unitarity defect", def.str(), md.unitarity_defect);
  json T = json::array();
  for (std::size_t i = 0; i < M; ++i) {
    T.push_back(md.T(i, i).str());
    r.text("T[" + md.labels[i] + "] = " + md.T(i, i).str());
  }
  r.result()["T"] = T;
  if (md.exact) {
    r.result()["S"] = matrix_json(md.S);
    for (std::size_t i = 0; i < M; ++i) {
      std::string row = "S[" + md.labels[i] + "] =";
      for (std::size_t j = 0; j < M; ++j) row += " " + md.S(i, j).str();
      r.text(row);
    }
  } else {
    json S = json::array();
    for (std::size_t i = 0; i < M; ++i) {
      json row = json::array();
      std::ostringstream os;
      os << "S[" << md.labels[i] << "] =";
      for (std::size_t j = 0; j < M; ++j) {
        const auto& z = md.S_numeric[i][j];
        row.push_back({z.real(), z.imag()});
        os << " " << std::fixed << std::setprecision(6) << std::abs(z) << "@" << std::setprecision(1)
           << std::arg(z) * 180 / M_PI;
      }
      S.push_back(row);
      r.text(os.str());
    }
    r.result()["S"] = S;
  }
  r.print();
}

void cmd_bounds(const Common& c, long d, long n, long observed, const std::string& exps) {
  Report r("bounds", c);
  std::vector<long> e;
  if (exps.empty()) {
    e = primitive_exponents(d, n);
  } else {
    std::istringstream is(exps);
    for (std::string w; is >> w;) e.push_back(parse_rational(w).get_num().get_si());
  }
  BoundsReport b = abelian_lower_bounds(e, n, observed >= 0 ? std::optional<long>(observed) : std::nullopt);
  r.line("", b.str());
  r.result() = {{"d", b.d}, {"level2", b.level2}, {"bound2", b.bound2}, {"level3", b.level3}, {"bound3", b.bound3}};
  if (b.observed) {
    r.result()["observed"] = *b.observed;
    r.result()["excluded"] = b.excluded;
  }
  r.print();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characters of non-cyclic orbifolds of lattice vertex operator algebras"};
  app.require_subcommand(1);
  Common c;
  auto common = [&](CLI::App* s, bool lattice) {
    s->add_option("--format", c.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    s->add_option("--order", c.order, "truncation order (rational)");
    s->add_option("--cache", c.cache, "character cache directory");
    if (lattice) {
      s->add_option("lattice", c.lattice, "lattice file")->required();
      s->add_option("--theta", c.theta, "theta series of the full lattice (serialized q-series)");
    }
  };
  std::string mat, a, b, exps;
  long d = 0, n = 0, observed = -1;
  bool effcyc = false;

  auto* snf = app.add_subcommand("snf", "Smith normal form of an integer matrix");
  common(snf, false);
  snf->add_option("--matrix", mat, "rows separated by ';'")->required();
  auto* analyze = app.add_subcommand("analyze", "lattice and automorphism invariants");
  common(analyze, true);
  analyze->add_option("aut", a, "automorphism name");
  auto* lift = app.add_subcommand("lift", "standard lift of an automorphism");
  common(lift, true);
  lift->add_option("aut", a)->required();
  auto* split = app.add_subcommand("split-lift", "lift the generators of a group preserving its relations");
  common(split, true);
  split->add_option("--group", c.group)->required();
  auto* twisted = app.add_subcommand("twisted", "twisted module data");
  common(twisted, true);
  twisted->add_option("aut", a)->required();
  auto* twining = app.add_subcommand("twining", "twining character T(g,h)");
  common(twining, true);
  twining->add_option("twist", a, "group word g")->required();
  twining->add_option("twine", b, "group word h")->required();
  twining->add_option("--group", c.group, "group spec providing the lifts");
  auto* type = app.add_subcommand("type", "type of the cyclic group generated by an automorphism");
  common(type, true);
  type->add_option("aut", a)->required();
  auto* anomaly = app.add_subcommand("anomaly", "cohomological twist of a lifted group");
  common(anomaly, true);
  anomaly->add_option("--group", c.group)->required();
  auto* orbifold = app.add_subcommand("orbifold", "character of the holomorphic orbifold");
  common(orbifold, true);
  orbifold->add_option("--group", c.group)->required();
  orbifold->add_flag("--effcyc", effcyc, "use the effectively cyclic formula");
  auto* modules = app.add_subcommand("modules", "characters of the irreducible modules of the fixed point algebra");
  common(modules, true);
  modules->add_option("--group", c.group)->required();
  auto* st = app.add_subcommand("stmatrices", "S and T matrices on the module characters");
  common(st, true);
  st->add_option("--group", c.group)->required();
  auto* bounds = app.add_subcommand("bounds", "invariant dimension bounds for an abelian eigenvalue pattern");
  common(bounds, false);
  bounds->add_option("--d", d)->required();
  bounds->add_option("--n", n)->required();
  bounds->add_option("--observed", observed, "observed level-2 invariant dimension");
  bounds->add_option("--exponents", exps, "eigenvalue exponents c_i (default: primitive conjugate pairs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::Validation);
  }
  try {
    if (*snf) cmd_snf(c, mat);
    else if (*analyze) cmd_analyze(c, a);
    else if (*lift) cmd_lift(c, a);
    else if (*split) cmd_split(c);
    else if (*twisted) cmd_twisted(c, a);
    else if (*twining) cmd_twining(c, a, b);
    else if (*type) cmd_type(c, a);
    else if (*anomaly) cmd_anomaly(c);
    else if (*orbifold) cmd_orbifold(c, effcyc);
    else if (*modules) cmd_modules(c);
    else if (*st) cmd_st(c);
    else if (*bounds) cmd_bounds(c, d, n, observed, exps);
  } catch (const Error& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "InternalInconsistency: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Internal);
  }
  return 0;
}
