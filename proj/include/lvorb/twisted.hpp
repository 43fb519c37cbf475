#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lvorb/cyclotomic.hpp"
#include "lvorb/lattice.hpp"
#include "lvorb/lift.hpp"

namespace lvorb {

using LVec = std::vector<long>;
using CMat = Mat<Cyclotomic>;

LVec to_long(const ZVec& v);
ZVec to_zz(const LVec& v);

// exp(2 pi i phase) * n^nexp * prod_k (1 - xi_n^k)^E[k] * sqrt(2)^sqrt2
struct FactoredScalar {
  QQ phase = 0;
  long nexp = 0;
  std::vector<long> E;
  long sqrt2 = 0;

  FactoredScalar operator*(const FactoredScalar& b) const;
  FactoredScalar& operator*=(const FactoredScalar& b) { return *this = *this * b; }
  FactoredScalar inverse() const;
  FactoredScalar pow(long k) const;
  static FactoredScalar root(const QQ& phase);
};

class ScalarField {
 public:
  explicit ScalarField(long n = 1) : n_(n) {}
  long n() const { return n_; }
  Cyclotomic eval(const FactoredScalar& s) const;

 private:
  long n_;
  mutable std::map<long, Cyclotomic> base_, inv_;
};

// Monomial matrix: column c has a single entry exp(2 pi i ph[c]) * scalar in row perm[c].
struct Monomial {
  std::vector<std::size_t> perm;
  std::vector<QQ> ph;
  FactoredScalar scalar;

  static Monomial identity(std::size_t d);
  std::size_t dim() const { return perm.size(); }
  Monomial operator*(const Monomial& b) const;
  Monomial scaled(const FactoredScalar& s) const;
  Monomial inverse() const;
  Monomial pow(long k) const;
  // phase r when the matrix is exp(2 pi i r) * scalar * Id
  std::optional<QQ> scalar_phase() const;
  CMat dense(const ScalarField& F) const;
};

struct DarbouxBasis {
  std::vector<std::vector<long>> a, b;  // coefficient vectors over the quotient generators
  std::vector<long> n;                  // n_i | n_{i+1}
  // coordinates (p, q) of an element: x = sum p_j a_j + q_j b_j
  std::pair<std::vector<long>, std::vector<long>> coords(const std::vector<long>& x) const;
  std::vector<long> orders;             // orders of the generators
  std::vector<std::vector<QQ>> pairing;  // commutator exponents on the generators
  QQ pair(const std::vector<long>& x, const std::vector<long>& y) const;
};

DarbouxBasis darboux_basis(const std::vector<long>& orders, const std::vector<std::vector<QQ>>& pairing);

struct TwistedModuleData {
  GramLattice L;
  Lift lift;
  AutomorphismData A;
  long n = 1;
  std::size_t k = 0;                   // rank of 1-g, number of coinvariant basis vectors
  std::vector<std::size_t> nontrivial;  // basis indices with s_i > 1
  std::vector<long> s;                 // elementary divisors
  DarbouxBasis darboux;
  std::vector<LVec> darboux_a, darboux_b;  // lattice representatives
  std::vector<FactoredScalar> lambda;
  std::vector<long> lambda_root_order;
  std::vector<Monomial> basis_ops;
  std::size_t dim = 1;
  QQ rho = 0;
  ScalarField field;
  std::vector<std::vector<std::vector<long>>> gk;  // gk[k] = g^k G as long matrix
  ZMat Qsnf;                           // coordinates w.r.t. the coinvariant/complement basis: c = v Q
  std::vector<std::vector<long>> gbar;

  long inner_gk(const LVec& a, long k, const LVec& b) const;  // <a g^k | b>
  long inner(const LVec& a, const LVec& b) const { return inner_gk(a, 0, b); }
  LVec apply(const LVec& a, const ZMat& m) const;
};

TwistedModuleData build_twisted_module(const GramLattice& L, const Lift& g);

QQ commutator_exponent(const TwistedModuleData& W, const LVec& a, const LVec& b);
FactoredScalar b_factor(const TwistedModuleData& W, const LVec& a, const LVec& b);
FactoredScalar eps_hat(const TwistedModuleData& W, const LVec& a, const LVec& b);
FactoredScalar sqrt_b(const TwistedModuleData& W, const LVec& a);
// eta(a)^-1 e(a(1-g), ag) B(a(1-g), ag)^-1 exp(2 pi i b_a)
FactoredScalar twist_scalar(const TwistedModuleData& W, const LVec& a);
Monomial u_operator(const TwistedModuleData& W, const LVec& mu);
bool is_coinvariant(const TwistedModuleData& W, const LVec& v);
// U_{a(1-g)} equals twist_scalar(a) times the identity on Omega_0
bool twist_compat_check(const TwistedModuleData& W, const LVec& a, std::string* diagnostic = nullptr);

}  // namespace lvorb
