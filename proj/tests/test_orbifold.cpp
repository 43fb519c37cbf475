#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "lvorb/errors.hpp"
#include "lvorb/orbifold.hpp"

using namespace lvorb;

namespace {

Orbifold make(const char* spec) {
  const auto& f = e8();
  return Orbifold(f.lattice, lift_group(f.lattice, f.auts, parse_group_spec(spec)));
}

std::optional<Cyclotomic> ratio(const QSeries& a, const QSeries& b) {
  if (b.is_zero()) return a.is_zero() ? std::optional<Cyclotomic>(Cyclotomic(1)) : std::nullopt;
  const auto& [e, c] = *b.terms().begin();
  Cyclotomic r = a.coeff(e) / c;
  if (!a.equals_to(b.scaled(r), *b.order())) return std::nullopt;
  return r;
}

}  // namespace

TEST_CASE("untwisted twining characters") {
  const auto& f = e8();
  QSeries T = untwisted_twining(f.lattice, identity_lift(f.lattice), QQ(3));
  CHECK(T.coeff(qq(-1, 3)) == Cyclotomic(1));
  CHECK(T.coeff(qq(2, 3)) == Cyclotomic(248));
  // traces on the weight one space are the adjoint characters
  CHECK(untwisted_twining(f.lattice, standard_lift(f.lattice, f.auts.at("s")), QQ(1)).coeff(qq(2, 3)) == Cyclotomic(24));
  CHECK(untwisted_twining(f.lattice, standard_lift(f.lattice, f.auts.at("m")), QQ(1)).coeff(qq(2, 3)) == Cyclotomic(-8));
  CHECK(untwisted_twining(f.lattice, standard_lift(f.lattice, f.auts.at("t")), QQ(1)).coeff(qq(2, 3)) == Cyclotomic(14));
  CHECK(untwisted_twining(f.lattice, standard_lift(f.lattice, f.auts.at("g")), QQ(1)).coeff(qq(2, 3)) == Cyclotomic(5));
}

TEST_CASE("types") {
  const auto& f = e8();
  const std::map<std::string, long> want = {{"s", 1}, {"ms", 1}, {"t", 2}, {"g", 0}, {"h", 0}, {"m", 0}};
  for (const auto& [n, r] : want) CHECK(type_of(f.lattice, standard_lift(f.lattice, f.auts.at(n))) == r);
  CHECK_THROWS_AS(cyclic_orbifold_char(f.lattice, standard_lift(f.lattice, f.auts.at("s")), QQ(1)), AnomalousOrbifold);
}

TEST_CASE("anomaly verdicts") {
  CHECK(make("s3:s,t").anomaly().str() == "anomalous (r_s=1, r_t=2)");
  CHECK(make("z3xz3:g,h").anomaly().verdict == Verdict::Trivial);
  CHECK(make("z2xz2:s,ms").anomaly().verdict == Verdict::Anomalous);
  CHECK(make("sdp:3,2,1:g,m").anomaly().verdict == Verdict::Trivial);
}

TEST_CASE("Schur-Weyl completeness") {
  for (const char* spec : {"s3:s,t", "z3xz3:g,h"}) {
    CAPTURE(spec);
    Orbifold orb = make(spec);
    const QQ order(1);
    auto mods = orb.module_characters(order);
    for (const auto& cl : orb.group().classes) {
      const std::size_t k = cl.front();
      QSeries sum = QSeries::zero_to(order);
      for (const auto& m : mods)
        if (m.class_rep == k) sum += m.series.scaled(Cyclotomic(m.degree));
      CHECK(sum.equals_to(orb.twining(k, 0, order), order));
    }
  }
}

TEST_CASE("T-transformation gives a root of unity") {
  for (const char* spec : {"s3:s,t", "z3xz3:g,h", "z2xz2:s,ms"}) {
    CAPTURE(spec);
    Orbifold orb = make(spec);
    const auto& G = orb.group();
    const QQ order(2);
    for (std::size_t k = 0; k < G.size(); ++k) {
      if (G.classes[G.class_of[k]].front() != k) continue;
      for (std::size_t h : G.centralizer(k)) {
        CAPTURE(G.names[k]);
        CAPTURE(G.names[h]);
        QSeries shifted = t_transform(orb.twining(k, h, order), 1);
        auto r = ratio(shifted, orb.twining(k, G.mul[k][h], order));
        REQUIRE(r);
        CHECK(r->root_exponent());
      }
    }
  }
}

TEST_CASE("S-transformation preserves moduli at tau = i") {
  for (const char* spec : {"s3:s,t", "z3xz3:g,h", "z2xz2:s,ms"}) {
    CAPTURE(spec);
    Orbifold orb = make(spec);
    const auto& G = orb.group();
    const QQ order(5);
    auto rep = [&](std::size_t k, std::size_t h) {
      for (std::size_t g = 0; g < G.size(); ++g)
        if (G.conjugate(k, g) == G.classes[G.class_of[k]].front()) return std::make_pair(G.conjugate(k, g), G.conjugate(h, g));
      return std::make_pair(k, h);
    };
    for (std::size_t k = 0; k < G.size(); ++k)
      for (std::size_t h : G.centralizer(k)) {
        auto [a, b] = rep(k, h);
        auto [c, d] = rep(h, G.inv[k]);
        NumericValue x = eval_at_tau(orb.twining(a, b, order), {0, 1}, HUGE_VAL);
        NumericValue y = eval_at_tau(orb.twining(c, d, order), {0, 1}, HUGE_VAL);
        double tails = x.tail_bound + y.tail_bound;
        CHECK(tails < 1e-6);
        CHECK(std::abs(std::abs(x.value) - std::abs(y.value)) <= 1e-6 * std::max(1.0, std::abs(x.value)) + tails);
      }
  }
}

TEST_CASE("Z2 x Z2 twisted twining characters") {
  Orbifold orb = make("z2xz2:s,ms");
  const auto& G = orb.group();
  std::size_t g = G.generators[0], h = G.generators[1];
  const QQ order(2);
  QSeries direct = orb.twining(g, h, order);
  QSeries closed = eta_expand({{QQ(1), 8}, {qq(1, 2), -4}, {QQ(2), -4}}, order).scaled(Cyclotomic(2));
  CHECK(direct.equals_to(closed, order));
  CHECK(orb.provenance(g, h) == "direct construction");
}

TEST_CASE("Z3 x Z3 orbits") {
  Orbifold orb = make("z3xz3:g,h");
  auto orbits = orb.sl2z_orbits();
  std::multiset<std::size_t> sizes;
  for (const auto& o : orbits) sizes.insert(o.pairs.size());
  CHECK(sizes == std::multiset<std::size_t>{1, 8, 8, 8, 8, 24, 24});
  for (const auto& cl : orb.group().classes) CHECK(orb.action(cl.front()).linear);
}

TEST_CASE("orbifolds of E8 return E8") {
  const auto& f = e8();
  const QQ order(2);
  QSeries e8char = untwisted_twining(f.lattice, identity_lift(f.lattice), order);
  for (const char* spec : {"z3xz3:g,h", "sdp:3,2,1:g,m", "cyclic:g", "cyclic:m"}) {
    CAPTURE(spec);
    OrbifoldResult r = make(spec).general_orbifold(order);
    CHECK(r.character.equals_to(e8char, order));
    CHECK(r.direct.equals_to(e8char, order));
  }
  CHECK_THROWS_AS(make("s3:s,t").general_orbifold(order), AnomalousOrbifold);
}

TEST_CASE("effectively cyclic formula") {
  CHECK(effcyc_r(3, 2, 1) == 1);
  CHECK(effcyc_r(3, 2, 2) == 2);
  CHECK(effcyc_r(7, 6, 2) == 3);
  CHECK_THROWS_AS(effcyc_r(7, 4, 2), ValidationError);
}

TEST_CASE("abelian lower bounds") {
  BoundsReport small = abelian_lower_bounds({1, 2}, 3);
  CHECK(small.level2 == 1);
  CHECK(small.level3 == 2 + 2);
  BoundsReport big = abelian_lower_bounds(primitive_exponents(72, 73), 73, 12);
  CHECK(big.level2 == 36);
  CHECK(big.bound2 == 36);
  CHECK(big.excluded);
  CHECK_THROWS_AS(abelian_lower_bounds({1, 1}, 3), ValidationError);
}

TEST_CASE("supplied full-lattice theta series") {
  const auto& L = e8().lattice;
  const QQ order(2);
  QSeries theta = theta_expand({L.gram, {}, {}}, QQ(4));
  QSeries before = untwisted_twining(L, identity_lift(L), order);
  set_full_theta(L, theta.truncated(QQ(1)));
  CHECK_THROWS_AS(untwisted_twining(L, identity_lift(L), order), InsufficientTruncation);
  set_full_theta(L, theta);
  CHECK(untwisted_twining(L, identity_lift(L), order) == before);
  CHECK_THROWS_AS(set_full_theta(L, theta.scaled(Cyclotomic(2))), ValidationError);
}
