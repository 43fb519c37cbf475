#pragma once
#include <string>
#include <utility>

#include "lvorb/cyclotomic.hpp"
#include "lvorb/lattice.hpp"

namespace lvorb {

// Lower-triangular Gbar with Gbar + Gbar^T = G.
ZMat halved_gram(const GramLattice& L);

struct EpsilonCocycle {
  ZMat gbar;
  explicit EpsilonCocycle(const GramLattice& L) : gbar(halved_gram(L)) {}
  EpsilonCocycle() = default;
  // e(a, b) = exp(2 pi i * exponent)
  QQ exponent(const ZVec& a, const ZVec& b) const;
  Cyclotomic operator()(const ZVec& a, const ZVec& b) const { return Cyclotomic::exp2pi(exponent(a, b)); }
};

// A lift (eta_g, g). Phases are stored as exponents r with value exp(2 pi i r):
// eta(a) = a Mbar a^T / 2 + a . w  (mod 1).
class Lift {
 public:
  Lift() = default;
  Lift(const ZMat& gbar, const ZMat& g, const QVec& w);

  const ZMat& matrix() const { return g_; }
  const QVec& basis_phases() const { return w_; }
  const ZMat& mbar() const { return mbar_; }
  const ZMat& gbar() const { return gbar_; }
  std::size_t rank() const { return g_.rows(); }

  QQ eta(const ZVec& a) const;
  Cyclotomic eta_value(const ZVec& a) const { return Cyclotomic::exp2pi(eta(a)); }
  // exponent of xi_g(a) for a basis-phase change v: a . v
  Lift with_phases(const QVec& w) const { return Lift(gbar_, g_, w); }

  bool operator==(const Lift& b) const { return g_ == b.g_ && w_ == b.w_; }
  bool operator!=(const Lift& b) const { return !(*this == b); }
  std::string str() const;

 private:
  ZMat gbar_, g_, mbar_;
  QVec w_;
};

Lift identity_lift(const GramLattice& L);
Lift general_lift(const GramLattice& L, const ZMat& g, const QVec& basis_phases);
Lift standard_lift(const GramLattice& L, const ZMat& g);

// a o b acts by b first; its matrix is B A and eta_{ab}(x) = eta_b(x) eta_a(x B)
Lift lift_compose(const Lift& a, const Lift& b);
Lift lift_inverse(const Lift& a);
Lift lift_power(const Lift& a, long k);
bool is_identity(const Lift& a);
// eta vanishes on a basis of the fixed lattice
bool is_standard(const Lift& a);
// the homomorphism relating lift_compose(a, b) to the zero-phase lift of the product
QQ composition_factor(const Lift& a, const Lift& b, const ZVec& x);

struct LiftOrder {
  long lattice_order;
  long lift_order;
  bool doubled() const { return lift_order != lattice_order; }
};
LiftOrder lift_order(const Lift& a);

struct SplitResult {
  Lift normal;  // order q
  Lift acting;  // order p, acting * normal * acting^-1 = normal^phi
  bool adjusted = false;
};
// Lifts a, A with A a A^-1 = a^phi on the lattice to standard lifts satisfying
// the same relation, correcting A by a homomorphism that is trivial on its
// fixed lattice. Throws ObstructionNonzero when no such correction exists.
SplitResult split_lift_semidirect(const GramLattice& L, const ZMat& a, const ZMat& A, long phi, long q, long p);
// A a A^-1 a^-phi as a lift
Lift relation_word(const Lift& a, const Lift& A, long phi);

}  // namespace lvorb
