#include "lvorb/group.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

#include "lvorb/errors.hpp"

namespace lvorb {

std::string lift_key(const Lift& a) {
  std::ostringstream os;
  const ZMat& m = a.matrix();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) os << m(i, j) << ',';
  os << '|';
  for (const auto& w : a.basis_phases()) os << w << ',';
  return os.str();
}

std::size_t FiniteGroup::power(std::size_t a, long k) const {
  std::size_t b = k >= 0 ? a : inv[a], r = 0;
  for (long i = 0; i < std::labs(k); ++i) r = mul[r][b];
  return r;
}

std::vector<std::size_t> FiniteGroup::centralizer(std::size_t a) const {
  std::vector<std::size_t> c;
  for (std::size_t x = 0; x < size(); ++x)
    if (commute(a, x)) c.push_back(x);
  return c;
}

std::vector<std::size_t> FiniteGroup::cyclic_subgroup(std::size_t a) const {
  std::vector<std::size_t> c;
  for (long k = 0; k < orders[a]; ++k) c.push_back(power(a, k));
  return c;
}

bool FiniteGroup::abelian() const {
  for (std::size_t a = 0; a < size(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      if (!commute(a, b)) return false;
  return true;
}

std::size_t FiniteGroup::index_of(const Lift& a) const {
  auto it = index_.find(lift_key(a));
  if (it == index_.end()) throw ValidationError("lift is not an element of the group");
  return it->second;
}

std::size_t FiniteGroup::parse_word(const std::string& w0) const {
  std::string w;
  for (char c : w0)
    if (!std::isspace(static_cast<unsigned char>(c))) w += c;
  if (w.empty() || w == "e" || w == "1") return 0;
  std::size_t r = 0;
  std::istringstream is(w);
  std::string tok;
  while (std::getline(is, tok, '*')) {
    std::string name = tok;
    long e = 1;
    auto caret = tok.find('^');
    if (caret != std::string::npos) {
      name = tok.substr(0, caret);
      try {
        std::size_t used = 0;
        e = std::stol(tok.substr(caret + 1), &used);
        if (used != tok.size() - caret - 1) throw ParseError("bad exponent");
      } catch (const std::logic_error&) {
        throw ParseError("bad exponent in word '" + w0 + "'");
      }
    }
    if (name == "e") continue;
    auto it = std::find(generator_names.begin(), generator_names.end(), name);
    if (it == generator_names.end()) throw ParseError("unknown generator '" + name + "' in word '" + w0 + "'");
    r = mul[r][power(generators[it - generator_names.begin()], e)];
  }
  return r;
}

FiniteGroup generate_group(const std::vector<std::pair<std::string, Lift>>& gens, std::size_t limit) {
  if (gens.empty()) throw ValidationError("group needs at least one generator");
  FiniteGroup G;
  using Word = std::vector<std::pair<std::size_t, long>>;
  std::vector<Word> words;
  auto add = [&](const Lift& x, Word w) {
    std::string k = lift_key(x);
    auto it = G.index_.find(k);
    if (it != G.index_.end()) return it->second;
    if (G.elements.size() >= limit) throw ValidationError("group exceeds " + std::to_string(limit) + " elements");
    std::size_t i = G.elements.size();
    G.index_.emplace(k, i);
    G.elements.push_back(x);
    words.push_back(std::move(w));
    return i;
  };
  add(lift_power(gens[0].second, 0), {});
  for (const auto& [n, g] : gens) G.generator_names.push_back(n);
  std::deque<std::size_t> todo{0};
  while (!todo.empty()) {
    std::size_t i = todo.front();
    todo.pop_front();
    for (std::size_t j = 0; j < gens.size(); ++j) {
      Word w = words[i];
      if (!w.empty() && w.back().first == j)
        ++w.back().second;
      else
        w.push_back({j, 1});
      std::size_t before = G.elements.size();
      add(lift_compose(G.elements[i], gens[j].second), w);
      if (G.elements.size() > before) todo.push_back(before);
    }
  }
  for (const auto& [n, g] : gens) G.generators.push_back(G.index_of(g));
  const std::size_t N = G.size();
  for (std::size_t i = 0; i < N; ++i) {
    if (words[i].empty()) {
      G.names.push_back("e");
      continue;
    }
    std::string s;
    for (const auto& [j, e] : words[i]) {
      if (!s.empty()) s += "*";
      s += gens[j].first;
      if (e != 1) s += "^" + std::to_string(e);
    }
    G.names.push_back(s);
  }
  G.mul.assign(N, std::vector<std::size_t>(N));
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) G.mul[a][b] = G.index_of(lift_compose(G.elements[a], G.elements[b]));
  G.inv.resize(N);
  G.orders.resize(N);
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = 0; b < N; ++b)
      if (G.mul[a][b] == 0) G.inv[a] = b;
    long o = 1;
    for (std::size_t x = a; x != 0; x = G.mul[x][a]) ++o;
    G.orders[a] = a == 0 ? 1 : o;
  }
  G.class_of.assign(N, N);
  for (std::size_t a = 0; a < N; ++a) {
    if (G.class_of[a] != N) continue;
    std::set<std::size_t> cl;
    for (std::size_t g = 0; g < N; ++g) cl.insert(G.conjugate(a, g));
    for (std::size_t x : cl) G.class_of[x] = G.classes.size();
    G.classes.emplace_back(cl.begin(), cl.end());
  }
  return G;
}

namespace {

std::vector<std::string> split(const std::string& s, char c) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, c)) out.push_back(cur);
  return out;
}

long to_long_arg(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("expected an integer for " + what + ", got '" + s + "'");
  }
}

std::map<std::string, ZMat>::const_iterator need(const std::map<std::string, ZMat>& auts, const std::string& n) {
  auto it = auts.find(n);
  if (it == auts.end()) throw ValidationError("unknown automorphism '" + n + "'");
  return it;
}

}  // namespace

GroupSpec parse_group_spec(const std::string& s) {
  GroupSpec g;
  g.text = s;
  auto parts = split(s, ':');
  if (parts.size() < 2) throw ParseError("group spec must look like kind:generators, got '" + s + "'");
  const std::string& kind = parts[0];
  if (kind == "cyclic") {
    g.kind = GroupKind::Cyclic;
    g.generators = split(parts[1], ',');
    if (g.generators.size() != 1) throw ParseError("cyclic group takes one generator");
  } else if (kind == "s3") {
    g.kind = GroupKind::Semidirect;
    g.generators = split(parts[1], ',');
    if (g.generators.size() != 2) throw ParseError("s3 takes generators s,t");
    g.q = 3, g.p = 2, g.phi = 2;
  } else if (kind == "z2xz2" || kind == "z3xz3" || kind == "z5xz5") {
    g.kind = GroupKind::ProductPP;
    g.generators = split(parts[1], ',');
    if (g.generators.size() != 2) throw ParseError(kind + " takes two generators");
    g.q = g.p = kind[1] - '0';
    g.phi = 1;
  } else if (kind == "sdp") {
    if (parts.size() != 3) throw ParseError("sdp spec is sdp:q,p,phi:a,A");
    auto nums = split(parts[1], ',');
    if (nums.size() != 3) throw ParseError("sdp spec is sdp:q,p,phi:a,A");
    g.kind = GroupKind::Semidirect;
    g.q = to_long_arg(nums[0], "q");
    g.p = to_long_arg(nums[1], "p");
    g.phi = to_long_arg(nums[2], "phi");
    g.generators = split(parts[2], ',');
    if (g.generators.size() != 2) throw ParseError("sdp takes generators a,A");
    // the s3 convention lists the acting generator first
    std::swap(g.generators[0], g.generators[1]);
  } else if (kind == "gens") {
    g.kind = GroupKind::Generic;
    g.generators = split(parts[1], ',');
  } else {
    throw ParseError("unknown group kind '" + kind + "'");
  }
  for (const auto& n : g.generators)
    if (n.empty()) throw ParseError("empty generator name in '" + s + "'");
  return g;
}

LiftedGroup lift_group(const GramLattice& L, const std::map<std::string, ZMat>& auts, const GroupSpec& spec) {
  LiftedGroup out;
  out.spec = spec;
  std::vector<std::pair<std::string, Lift>> gens;
  switch (spec.kind) {
    case GroupKind::Cyclic:
    case GroupKind::Generic:
      for (const auto& n : spec.generators) {
        Lift x = standard_lift(L, need(auts, n)->second);
        if (lift_order(x).doubled()) throw OrderDoubled("standard lift of " + n + " doubles its order");
        gens.push_back({n, x});
      }
      break;
    case GroupKind::Semidirect: {
      // generators listed as (acting, normal)
      const std::string& An = spec.generators[0];
      const std::string& an = spec.generators[1];
      SplitResult r = split_lift_semidirect(L, need(auts, an)->second, need(auts, An)->second, spec.phi, spec.q, spec.p);
      out.split_adjusted = r.adjusted;
      gens = {{An, r.acting}, {an, r.normal}};
      break;
    }
    case GroupKind::ProductPP: {
      const std::string& an = spec.generators[0];
      const std::string& bn = spec.generators[1];
      SplitResult r = split_lift_semidirect(L, need(auts, an)->second, need(auts, bn)->second, 1, spec.p, spec.p);
      out.split_adjusted = r.adjusted;
      gens = {{an, r.normal}, {bn, r.acting}};
      break;
    }
  }
  for (const auto& [n, x] : gens) out.gen_lifts.push_back(x);
  out.group = generate_group(gens);
  return out;
}

Cyclotomic CharacterTable::value(std::size_t i, std::size_t element) const {
  auto it = std::find(elements.begin(), elements.end(), element);
  if (it == elements.end()) throw InternalInconsistency("element outside the character table's group");
  return chi[i][it - elements.begin()];
}

std::vector<std::size_t> abelian_generators(const FiniteGroup& G, const std::vector<std::size_t>& H) {
  std::vector<std::size_t> gens;
  std::set<std::size_t> span{0};
  while (span.size() < H.size()) {
    std::size_t best = H.size();
    for (std::size_t i = 0; i < H.size(); ++i)
      if (!span.count(H[i]) && (best == H.size() || G.orders[H[i]] > G.orders[H[best]])) best = i;
    gens.push_back(H[best]);
    std::deque<std::size_t> todo(span.begin(), span.end());
    while (!todo.empty()) {
      std::size_t x = todo.front();
      todo.pop_front();
      for (std::size_t g : gens) {
        std::size_t y = G.mul[x][g];
        if (span.insert(y).second) todo.push_back(y);
      }
    }
  }
  return gens;
}

CharacterTable abelian_characters(const FiniteGroup& G, const std::vector<std::size_t>& H) {
  for (std::size_t a : H)
    for (std::size_t b : H)
      if (!G.commute(a, b)) throw Unsupported("subgroup is not abelian");
  CharacterTable t;
  t.elements = H;
  std::vector<std::size_t> gens = abelian_generators(G, H);
  std::vector<long> ord;
  for (std::size_t g : gens) ord.push_back(G.orders[g]);
  std::vector<long> e(gens.size(), 0);
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < H.size(); ++i) pos[H[i]] = i;
  while (true) {
    std::vector<std::optional<QQ>> val(H.size());
    val[pos.at(0)] = QQ(0);
    std::deque<std::size_t> todo{0};
    bool ok = true;
    while (!todo.empty() && ok) {
      std::size_t x = todo.front();
      todo.pop_front();
      for (std::size_t j = 0; j < gens.size(); ++j) {
        std::size_t y = G.mul[x][gens[j]];
        QQ v = frac(*val[pos.at(x)] + qq(e[j], ord[j]));
        auto& slot = val[pos.at(y)];
        if (!slot) {
          slot = v;
          todo.push_back(y);
        } else if (*slot != v) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      std::vector<Cyclotomic> row;
      for (const auto& v : val) row.push_back(Cyclotomic::exp2pi(*v));
      t.chi.push_back(row);
      t.degree.push_back(1);
      std::string lab;
      for (std::size_t j = 0; j < e.size(); ++j) lab += (j ? "," : "") + std::to_string(e[j]);
      t.labels.push_back(lab.empty() ? "0" : lab);
    }
    std::size_t j = 0;
    while (j < e.size() && ++e[j] == ord[j]) e[j++] = 0;
    if (j == e.size()) break;
  }
  if (t.chi.size() != H.size()) throw InternalInconsistency("abelian character count differs from the group order");
  return t;
}

CharacterTable semidirect_characters(const FiniteGroup& G, std::size_t a, std::size_t A, long q, long p, long phi) {
  CharacterTable t;
  std::vector<std::pair<long, long>> xy(G.size(), {-1, -1});
  for (long x = 0; x < q; ++x)
    for (long y = 0; y < p; ++y) xy[G.mul[G.power(a, x)][G.power(A, y)]] = {x, y};
  for (std::size_t i = 0; i < G.size(); ++i) {
    if (xy[i].first < 0) throw ValidationError("group is not generated as a^x A^y");
    t.elements.push_back(i);
  }
  auto m = [](long v, long n) { return ((v % n) + n) % n; };
  std::vector<bool> seen(q, false);
  for (long j = 0; j < q; ++j) {
    if (seen[j]) continue;
    std::vector<long> orbit;
    for (long k = j; !seen[k]; k = m(k * phi, q)) {
      seen[k] = true;
      orbit.push_back(k);
    }
    const long s = orbit.size();
    if (p % s) throw InternalInconsistency("orbit size does not divide p");
    const long ext = p / s;
    for (long l = 0; l < ext; ++l) {
      std::vector<Cyclotomic> row;
      for (std::size_t i = 0; i < G.size(); ++i) {
        auto [x, y] = xy[i];
        if (y % s) {
          row.push_back(Cyclotomic(0));
          continue;
        }
        Cyclotomic v;
        for (long k : orbit) v += Cyclotomic::root_of_unity(k * x, q);
        row.push_back(v * Cyclotomic::root_of_unity(l * (y / s), ext));
      }
      t.chi.push_back(row);
      t.degree.push_back(s);
      if (s == 1)
        t.labels.push_back(l == 0 ? "0" : (p == 2 ? "sgn" : "lin" + std::to_string(l)));
      else
        t.labels.push_back(std::to_string(s) + (ext > 1 || q > 3 ? "." + std::to_string(j) + "." + std::to_string(l) : ""));
    }
  }
  return t;
}

bool check_orthogonality(const FiniteGroup& G, const CharacterTable& t) {
  (void)G;
  const QQ inv_order = qq(1, static_cast<long>(t.elements.size()));
  for (std::size_t i = 0; i < t.chi.size(); ++i)
    for (std::size_t j = 0; j < t.chi.size(); ++j) {
      Cyclotomic s;
      for (std::size_t k = 0; k < t.elements.size(); ++k) s += t.chi[i][k] * t.chi[j][k].conj();
      if (s.scaled(inv_order) != Cyclotomic(i == j ? 1 : 0)) return false;
    }
  return true;
}

}  // namespace lvorb
