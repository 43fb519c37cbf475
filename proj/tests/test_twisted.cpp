#include <doctest.h>

#include <complex>

#include "fixtures.hpp"
#include "lvorb/group.hpp"
#include "lvorb/twisted.hpp"

using namespace lvorb;

namespace {

std::vector<std::pair<std::string, TwistedModuleData>> modules() {
  const auto& f = e8();
  std::vector<std::pair<std::string, TwistedModuleData>> out;
  for (const auto& [n, g] : f.auts) out.emplace_back(n, build_twisted_module(f.lattice, standard_lift(f.lattice, g)));
  auto G = lift_group(f.lattice, f.auts, parse_group_spec("s3:s,t")).group;
  for (std::size_t i = 1; i < G.size(); ++i)
    out.emplace_back("s3 " + G.names[i], build_twisted_module(f.lattice, G.elements[i]));
  return out;
}

const std::vector<std::pair<std::string, TwistedModuleData>>& all() {
  static const auto m = modules();
  return m;
}

LVec basis(const TwistedModuleData& W, std::size_t i) { return to_long(W.A.coinvariant_basis.row(i)); }

LVec add(const LVec& a, const LVec& b) {
  LVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

}  // namespace

TEST_CASE("defect dimensions") {
  const std::map<std::string, std::size_t> want = {{"g", 3}, {"h", 3}, {"m", 16}, {"s", 2}, {"ms", 2}, {"t", 1}};
  for (const auto& [n, W] : all()) {
    CAPTURE(n);
    auto it = want.find(n);
    if (it != want.end()) CHECK(W.dim == it->second);
    QuotientPresentation Q = torsion_quotient(W.L, W.lift.matrix());
    CHECK(ZZ(W.dim * W.dim) == Q.cardinality);
  }
}

TEST_CASE("U-operators multiply with the twisted cocycle") {
  for (const auto& [n, W] : all()) {
    CAPTURE(n);
    for (std::size_t i = 0; i < W.k; ++i)
      for (std::size_t j = 0; j < W.k; ++j) {
        LVec x = basis(W, i), y = basis(W, j);
        CMat lhs = u_operator(W, add(x, y)).dense(W.field);
        CMat rhs = (u_operator(W, x) * u_operator(W, y)).scaled(eps_hat(W, x, y)).dense(W.field);
        CHECK(lhs == rhs);
      }
  }
}

TEST_CASE("U-commutator equals the commutator form") {
  for (const auto& [n, W] : all()) {
    CAPTURE(n);
    for (std::size_t i = 0; i < W.k; ++i)
      for (std::size_t j = 0; j < W.k; ++j) {
        LVec x = basis(W, i), y = basis(W, j);
        CMat xy = (u_operator(W, x) * u_operator(W, y)).dense(W.field);
        CMat yx = (u_operator(W, y) * u_operator(W, x)).dense(W.field);
        Cyclotomic c = Cyclotomic::exp2pi(commutator_exponent(W, x, y));
        for (std::size_t a = 0; a < W.dim; ++a)
          for (std::size_t b = 0; b < W.dim; ++b) CHECK(xy(a, b) == c * yx(a, b));
      }
  }
}

TEST_CASE("twist compatibility on basis preimages") {
  for (const auto& [n, W] : all()) {
    CAPTURE(n);
    for (std::size_t i = 0; i < W.A.preimages.rows(); ++i) {
      std::string diag;
      CHECK_MESSAGE(twist_compat_check(W, to_long(W.A.preimages.row(i)), &diag), diag);
    }
  }
}

TEST_CASE("defect representation is irreducible") {
  for (const auto& [n, W] : all()) {
    CAPTURE(n);
    const auto& D = W.darboux;
    std::vector<Monomial> ops;
    for (std::size_t j = 0; j < D.n.size(); ++j) {
      ops.push_back(u_operator(W, W.darboux_a[j]));
      ops.push_back(u_operator(W, W.darboux_b[j]));
    }
    // average of |tr|^2 over the group generated by the Darboux operators, scalars dropped
    std::vector<long> e(ops.size(), 0), ord;
    for (std::size_t j = 0; j < D.n.size(); ++j) ord.insert(ord.end(), {D.n[j], D.n[j]});
    double sum = 0;
    long count = 0;
    while (true) {
      Monomial M = Monomial::identity(W.dim);
      for (std::size_t j = 0; j < ops.size(); ++j) M = M * ops[j].pow(e[j]);
      std::complex<double> tr = 0;
      for (std::size_t c = 0; c < W.dim; ++c)
        if (M.perm[c] == c) tr += std::polar(1.0, 2 * M_PI * M.ph[c].get_d());
      sum += std::norm(tr);
      ++count;
      std::size_t j = 0;
      while (j < e.size() && ++e[j] == ord[j]) e[j++] = 0;
      if (j == e.size()) break;
    }
    CHECK(sum / count == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("coinvariance") {
  const auto& W = all().front().second;
  for (std::size_t i = 0; i < W.k; ++i) CHECK(is_coinvariant(W, basis(W, i)));
}
