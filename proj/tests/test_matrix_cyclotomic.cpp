#include <doctest.h>

#include <random>

#include "lvorb/cyclotomic.hpp"
#include "lvorb/lattice.hpp"

using namespace lvorb;

namespace {

Cyclotomic random_element(std::mt19937& rng, long m) {
  std::uniform_int_distribution<int> u(-4, 4);
  Cyclotomic x;
  for (long k = 0; k < m; ++k) x += Cyclotomic::root_of_unity(k, m).scaled(qq(u(rng), 1 + (k % 3)));
  return x;
}

ZMat random_matrix(std::mt19937& rng, std::size_t r, std::size_t c) {
  std::uniform_int_distribution<int> u(-6, 6);
  ZMat m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

}  // namespace

TEST_CASE("cyclotomic polynomials and totients") {
  CHECK(euler_phi(12) == 4);
  CHECK(euler_phi(73) == 72);
  CHECK(cyclotomic_polynomial(6) == std::vector<long>{1, -1, 1});
  CHECK(cyclotomic_polynomial(12) == std::vector<long>{1, 0, -1, 0, 1});
}

TEST_CASE("roots of unity") {
  for (long m : {1, 2, 3, 4, 5, 8, 9, 12, 15}) {
    Cyclotomic z = Cyclotomic::root_of_unity(1, m);
    CHECK(z.pow(m) == Cyclotomic(1));
    Cyclotomic s;
    for (long k = 0; k < m; ++k) s += z.pow(k);
    CHECK(s == Cyclotomic(m == 1 ? 1 : 0));
    CHECK(z * z.conj() == Cyclotomic(1));
    CHECK(*z.root_exponent() == frac(qq(1, m)));
  }
  CHECK(Cyclotomic::exp2pi(qq(5, 4)) == Cyclotomic::root_of_unity(1, 4));
  CHECK(Cyclotomic::exp2pi(qq(1, 2)) == Cyclotomic(-1));
  CHECK(!Cyclotomic(2).root_exponent());
  CHECK(principal_root(Cyclotomic::exp2pi(qq(2, 3)), 2) == Cyclotomic::exp2pi(qq(1, 3)));
  Cyclotomic r2 = sqrt_rational(QQ(8));
  CHECK(r2 * r2 == Cyclotomic(8));
  CHECK(std::abs(r2.to_complex() - std::sqrt(8.0)) < 1e-12);
}

TEST_CASE("field axioms on random elements") {
  std::mt19937 rng(7);
  for (long m : {3, 4, 7, 9, 12, 24}) {
    for (int trial = 0; trial < 10; ++trial) {
      Cyclotomic a = random_element(rng, m), b = random_element(rng, m), c = random_element(rng, m);
      CHECK((a + b) * c == a * c + b * c);
      CHECK((a * b) * c == a * (b * c));
      CHECK((a * b).conj() == a.conj() * b.conj());
      if (!a.is_zero()) CHECK(a * a.inverse() == Cyclotomic(1));
      CHECK(std::abs((a * b).to_complex() - a.to_complex() * b.to_complex()) < 1e-9);
      CHECK(Cyclotomic::deserialize(a.serialize()) == a);
    }
  }
}

TEST_CASE("mixed conductors embed into a common field") {
  Cyclotomic a = Cyclotomic::root_of_unity(1, 3), b = Cyclotomic::root_of_unity(1, 4);
  Cyclotomic p = a * b;
  CHECK(p == Cyclotomic::root_of_unity(7, 12));
  CHECK((a + b - a) == b);
}

TEST_CASE("Smith normal form invariants") {
  auto s = smith_normal_form(ZMat::from_rows({{2, 4}, {6, 8}}));
  CHECK(s.divisors == std::vector<ZZ>{2, 4});
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t r = 1 + trial % 5, c = 1 + (trial / 5) % 5;
    ZMat A = random_matrix(rng, r, c);
    if (trial % 7 == 0) A.set_row(0, std::vector<ZZ>(c, 0));
    auto d = smith_normal_form(A);
    CHECK(d.P * A * d.Q == d.S);
    CHECK(bool(abs(determinant(d.P)) == 1));
    CHECK(bool(abs(determinant(d.Q)) == 1));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (i != j) CHECK(d.S(i, j) == 0);
    for (std::size_t i = 0; i + 1 < d.divisors.size(); ++i) CHECK(bool(d.divisors[i + 1] % d.divisors[i] == 0));
    for (const auto& x : d.divisors) CHECK(x > 0);
    CHECK(d.rank() == rank(to_q(A)));
  }
}

TEST_CASE("rational linear algebra") {
  QMat m = QMat::from_rows({{QQ(2), QQ(1)}, {QQ(1), QQ(1)}});
  CHECK(inverse(m) * m == QMat::identity(2));
  CHECK(determinant(m) == 1);
  CHECK(frac(qq(-1, 3)) == qq(2, 3));
  CHECK(inverse_unimodular(ZMat::from_rows({{1, 2}, {0, 1}})) == ZMat::from_rows({{1, -2}, {0, 1}}));
}
