#pragma once
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lvorb/matrix.hpp"

namespace lvorb {

struct GramLattice {
  ZMat gram;
  bool even = false;
  bool unimodular = false;

  std::size_t rank() const { return gram.rows(); }
  ZZ norm(const ZVec& v) const { return bilinear(v, gram, v); }
  ZZ inner(const ZVec& a, const ZVec& b) const { return bilinear(a, gram, b); }
  // validates symmetry and fills the flags
  static GramLattice from_gram(const ZMat& g);
};

struct SmithDecomposition {
  ZMat P, S, Q;  // P A Q = S
  std::vector<ZZ> divisors;
  std::size_t nullity = 0;
  std::size_t rank() const { return divisors.size(); }
};

SmithDecomposition smith_normal_form(const ZMat& a);

bool is_automorphism(const GramLattice& L, const ZMat& g);
void require_automorphism(const GramLattice& L, const ZMat& g, const std::string& name = "g");
// multiplicative order of an invertible integer matrix (throws beyond limit)
long matrix_order(const ZMat& g, long limit = 100000);

struct CycleType {
  std::map<long, long> b;  // t -> b_t, zero entries omitted
  std::string str() const;
};

struct AutomorphismData {
  long order = 1;
  CycleType cycle_type;
  ZMat fixed_basis;        // rows spanning L_g
  ZMat coinvariant_basis;  // rows spanning L_g^perp
  ZMat complement;         // rows of Lambda, L = Lambda + L_g^perp
  ZMat preimages;          // row i maps to s_i times coinvariant row i under 1-g
  std::vector<ZZ> divisors;  // elementary divisors of 1-g
  QMat projector;
  std::vector<long> eigen_dims;  // index j: dim of the xi_n^j eigenspace
  SmithDecomposition snf;
  std::size_t fixed_rank() const { return fixed_basis.rows(); }
  // conformal weight of the twisted sector
  QQ rho() const;
};

AutomorphismData analyze_automorphism(const GramLattice& L, const ZMat& g);

struct QuotientPresentation {
  std::vector<ZVec> generators;
  std::vector<ZZ> orders;
  std::vector<ZVec> preimages;  // preimages[i] (1-g) = orders[i] generators[i]
  ZZ cardinality = 1;
  // sqrt(|N|), throws NonSquareQuotient when |N| is not a square
  ZZ defect_dimension() const;
};

QuotientPresentation torsion_quotient(const GramLattice& L, const ZMat& g);

// Calls f(v, |v+shift|^2 / 2) for every integer v with |v+shift|^2 <= 2B,
// in lexicographic order of coordinates.
using NormVisitor = std::function<void(const std::vector<long>&, const QQ&)>;
void enumerate_by_norm(const ZMat& gram, const QQ& bound, const QVec& shift, const NormVisitor& f);
void enumerate_by_norm(const ZMat& gram, const QQ& bound, const NormVisitor& f);
std::vector<std::vector<long>> vectors_by_norm(const ZMat& gram, const QQ& bound);

// (i mod n, j mod m) -> dimension of the joint eigenspace of (xi_n^i, xi_m^j)
std::map<std::pair<long, long>, long> joint_eigenspace_dims(const ZMat& g, const ZMat& h);

// Integer basis (rows) of {u in Z^r : u M = 0} for a rational r x c matrix M.
ZMat integer_left_kernel(const QMat& m);

// Coordinates c with v = c * basis for a unimodular basis matrix.
ZVec coordinates_in(const ZVec& v, const ZMat& basis_inverse);

}  // namespace lvorb
