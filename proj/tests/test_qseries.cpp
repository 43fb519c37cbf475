#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "lvorb/errors.hpp"
#include "lvorb/qseries.hpp"

using namespace lvorb;

TEST_CASE("eta products") {
  // Ramanujan tau
  QSeries delta = eta_expand({{QQ(1), 24}}, QQ(4));
  CHECK(delta.coeff(QQ(1)) == Cyclotomic(1));
  CHECK(delta.coeff(QQ(2)) == Cyclotomic(-24));
  CHECK(delta.coeff(QQ(3)) == Cyclotomic(252));
  CHECK(delta.coeff(QQ(4)) == Cyclotomic(-1472));
  // pentagonal numbers
  QSeries eta = eta_expand({{QQ(1), 1}}, QQ(8));
  CHECK(eta.terms().size() == 5);
  CHECK(eta.coeff(qq(1, 24) + 5) == Cyclotomic(1));
  CHECK(eta.coeff(qq(1, 24) + 7) == Cyclotomic(1));
  // eta(t tau) steps by t
  QSeries half = eta_expand({{qq(1, 2), 1}}, QQ(2));
  CHECK(half.coeff(qq(1, 48) + qq(1, 2)) == Cyclotomic(-1));
  CHECK(half.coeff(qq(1, 48) + 1) == Cyclotomic(-1));
  CHECK(half.coeff(qq(1, 48) + qq(5, 2)).is_zero());
}

TEST_CASE("series arithmetic") {
  QSeries a = eta_expand({{QQ(1), 3}, {QQ(2), -1}}, QQ(5));
  QSeries b = a.inverse();
  CHECK((a * b).equals_to(QSeries::constant(Cyclotomic(1)), QQ(4)));
  CHECK(QSeries::deserialize(a.serialize()) == a);
  CHECK(QSeries::deserialize(QSeries().serialize()) == QSeries());
  QSeries s = QSeries::monomial(qq(1, 3), Cyclotomic(2));
  CHECK(t_transform(s, 1).coeff(qq(1, 3)) == Cyclotomic::exp2pi(qq(1, 3)) * Cyclotomic(2));
}

TEST_CASE("E8 theta series is E4") {
  const auto& L = e8().lattice;
  QSeries th = theta_expand({L.gram, {}, {}}, QQ(4));
  const long e4[] = {1, 240, 2160, 6720, 17520};
  for (long n = 0; n <= 4; ++n) CHECK(th.coeff(QQ(n)) == Cyclotomic(e4[n]));
}

TEST_CASE("numeric evaluation") {
  // eta(i) = Gamma(1/4) / (2 pi^{3/4})
  QSeries eta = eta_expand({{QQ(1), 1}}, QQ(10));
  auto v = eval_at_tau(eta, {0, 1}, 1e-10);
  CHECK(std::abs(v.value.real() - 0.768225422326057) < 1e-12);
  CHECK(std::abs(v.value.imag()) < 1e-12);
  QSeries short_series = eta_expand({{QQ(1), -24}}, QQ(1));
  CHECK_THROWS_AS(eval_at_tau(short_series, {0, 0.3}, 1e-12), InsufficientTruncation);
}
