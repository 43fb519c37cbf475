#include "lvorb/lift.hpp"

#include <sstream>

#include "lvorb/errors.hpp"

namespace lvorb {

ZMat halved_gram(const GramLattice& L) {
  const std::size_t d = L.rank();
  ZMat gb(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    if (L.gram(i, i) % 2 != 0) throw OddLattice("diagonal entry " + std::to_string(i + 1) + " is odd");
    gb(i, i) = L.gram(i, i) / 2;
    for (std::size_t j = 0; j < i; ++j) gb(i, j) = L.gram(i, j);
  }
  return gb;
}

QQ EpsilonCocycle::exponent(const ZVec& a, const ZVec& b) const {
  ZZ v = bilinear(a, gbar, b);
  return mpz_odd_p(v.get_mpz_t()) ? qq(1, 2) : QQ(0);
}

Lift::Lift(const ZMat& gbar, const ZMat& g, const QVec& w) : gbar_(gbar), g_(g) {
  const std::size_t d = g.rows();
  ZMat m = gbar - g * gbar * g.transpose();
  mbar_ = ZMat(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    if (m(i, i) != 0) throw InternalInconsistency("Gbar - g Gbar g^T has a nonzero diagonal");
    for (std::size_t j = 0; j < i; ++j) {
      if (m(i, j) != -m(j, i)) throw NotAnAutomorphism("Gbar - g Gbar g^T is not antisymmetric");
      mbar_(i, j) = m(i, j);
    }
  }
  w_.resize(d);
  for (std::size_t i = 0; i < d; ++i) w_[i] = frac(i < w.size() ? w[i] : QQ(0));
}

QQ Lift::eta(const ZVec& a) const {
  QQ r(bilinear(a, mbar_, a));
  r /= 2;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0) r += QQ(a[i]) * w_[i];
  return frac(r);
}

std::string Lift::str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < w_.size(); ++i) os << (i ? ", " : "") << w_[i];
  os << "]";
  return os.str();
}

Lift identity_lift(const GramLattice& L) {
  return Lift(halved_gram(L), ZMat::identity(L.rank()), QVec(L.rank(), QQ(0)));
}

Lift general_lift(const GramLattice& L, const ZMat& g, const QVec& basis_phases) {
  require_automorphism(L, g);
  if (!basis_phases.empty() && basis_phases.size() != L.rank())
    throw ValidationError("expected " + std::to_string(L.rank()) + " basis phases");
  return Lift(halved_gram(L), g, basis_phases);
}

namespace {

ZMat fixed_basis_of(const ZMat& g) {
  const std::size_t d = g.rows();
  SmithDecomposition s = smith_normal_form(ZMat::identity(d) - g);
  ZMat fb(d - s.rank(), d);
  for (std::size_t i = s.rank(); i < d; ++i) fb.set_row(i - s.rank(), s.P.row(i));
  return fb;
}

}  // namespace

Lift standard_lift(const GramLattice& L, const ZMat& g) {
  Lift base = general_lift(L, g, {});
  const std::size_t d = L.rank();
  SmithDecomposition s = smith_normal_form(ZMat::identity(d) - g);
  QVec t(d, QQ(0));
  for (std::size_t i = s.rank(); i < d; ++i) t[i] = frac(-base.eta(s.P.row(i)));
  // w = P^-1 t, so that P_i . w = t_i
  QMat pinv = inverse(to_q(s.P));
  QVec w(d, QQ(0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) w[i] += pinv(i, j) * t[j];
  Lift out = base.with_phases(w);
  for (std::size_t i = s.rank(); i < d; ++i)
    if (out.eta(s.P.row(i)) != 0) throw InternalInconsistency("standard lift is not trivial on the fixed lattice");
  return out;
}

Lift lift_compose(const Lift& a, const Lift& b) {
  const std::size_t d = a.rank();
  ZMat m = b.matrix() * a.matrix();
  QVec w(d);
  for (std::size_t i = 0; i < d; ++i) {
    ZVec e(d, ZZ(0));
    e[i] = 1;
    w[i] = b.eta(e) + a.eta(b.matrix().row(i));
  }
  return Lift(a.gbar(), m, w);
}

Lift lift_inverse(const Lift& a) {
  const std::size_t d = a.rank();
  ZMat gi = inverse_unimodular(a.matrix());
  QVec w(d);
  Lift base(a.gbar(), gi, QVec(d, QQ(0)));
  for (std::size_t i = 0; i < d; ++i) w[i] = -a.eta(gi.row(i));
  return base.with_phases(w);
}

Lift lift_power(const Lift& a, long k) {
  Lift r(a.gbar(), ZMat::identity(a.rank()), QVec(a.rank(), QQ(0)));
  if (k == 0) return r;
  Lift base = k > 0 ? a : lift_inverse(a);
  long n = k > 0 ? k : -k;
  while (n > 0) {
    if (n & 1) r = lift_compose(r, base);
    n >>= 1;
    if (n) base = lift_compose(base, base);
  }
  return r;
}

bool is_identity(const Lift& a) {
  if (a.matrix() != ZMat::identity(a.rank())) return false;
  for (const auto& x : a.basis_phases())
    if (x != 0) return false;
  return true;
}

bool is_standard(const Lift& a) {
  ZMat fb = fixed_basis_of(a.matrix());
  for (std::size_t i = 0; i < fb.rows(); ++i)
    if (a.eta(fb.row(i)) != 0) return false;
  return true;
}

QQ composition_factor(const Lift& a, const Lift& b, const ZVec& x) {
  Lift ab = lift_compose(a, b);
  Lift zero(a.gbar(), ab.matrix(), QVec(a.rank(), QQ(0)));
  return frac(ab.eta(x) - zero.eta(x));
}

LiftOrder lift_order(const Lift& a) {
  LiftOrder o;
  o.lattice_order = matrix_order(a.matrix());
  Lift p = lift_power(a, o.lattice_order);
  if (is_identity(p)) {
    o.lift_order = o.lattice_order;
    return o;
  }
  if (is_identity(lift_compose(p, p))) {
    o.lift_order = 2 * o.lattice_order;
    return o;
  }
  throw InternalInconsistency("lift order is not n or 2n");
}

Lift relation_word(const Lift& a, const Lift& A, long phi) {
  return lift_compose(lift_compose(lift_compose(A, a), lift_inverse(A)), lift_power(a, -phi));
}

SplitResult split_lift_semidirect(const GramLattice& L, const ZMat& a, const ZMat& A, long phi, long q, long p) {
  require_automorphism(L, a, "a");
  require_automorphism(L, A, "A");
  const std::size_t d = L.rank();
  const ZMat id = ZMat::identity(d);
  if (matpow(a, q) != id) throw ValidationError("a^q != 1 on the lattice");
  if (matpow(A, p) != id) throw ValidationError("A^p != 1 on the lattice");
  ZMat Ainv = inverse_unimodular(A);
  ZMat aphi = phi >= 0 ? matpow(a, phi) : matpow(inverse_unimodular(a), -phi);
  if (Ainv * a * A != aphi) throw ValidationError("A a A^-1 != a^phi on the lattice");

  SplitResult res;
  res.normal = standard_lift(L, a);
  Lift H = standard_lift(L, A);
  for (const Lift* x : {&res.normal, &H}) {
    LiftOrder o = lift_order(*x);
    if (o.doubled()) throw OrderDoubled("standard lift doubles the order " + std::to_string(o.lattice_order));
  }
  Lift base = relation_word(res.normal, H, phi);
  if (base.matrix() != id) throw InternalInconsistency("relation word is not the identity on the lattice");
  if (is_identity(base)) {
    res.acting = H;
    return res;
  }
  const QVec f = base.basis_phases();
  // the relation phases depend affinely on the phases of H; recover the integer
  // linear part by probing with a small rational step
  const ZZ D("1000000007");
  ZMat K(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    QVec w = H.basis_phases();
    w[j] += QQ(1) / QQ(D);
    QVec f2 = relation_word(res.normal, H.with_phases(w), phi).basis_phases();
    for (std::size_t i = 0; i < d; ++i) {
      QQ delta = frac(f2[i] - f[i]) * QQ(D);
      if (delta.get_den() != 1) throw InternalInconsistency("relation phases are not affine in the lift phases");
      ZZ v = delta.get_num();
      if (v > D / 2) v -= D;
      K(i, j) = v;
    }
  }
  ZMat fb = fixed_basis_of(A);
  const std::size_t r = fb.rows();
  ZMat M(d + r, d);
  QVec b(d + r, QQ(0));
  for (std::size_t i = 0; i < d; ++i) {
    M.set_row(i, K.row(i));
    b[i] = -f[i];
  }
  for (std::size_t i = 0; i < r; ++i) M.set_row(d + i, fb.row(i));
  SmithDecomposition s = smith_normal_form(M);
  // M x = b mod 1  <=>  S y = P b mod 1 with x = Q y
  QVec pb(d + r, QQ(0));
  for (std::size_t i = 0; i < d + r; ++i) {
    for (std::size_t j = 0; j < d + r; ++j) pb[i] += QQ(s.P(i, j)) * b[j];
    pb[i] = frac(pb[i]);
  }
  QVec y(d, QQ(0));
  for (std::size_t i = 0; i < d + r; ++i) {
    if (i < s.rank()) {
      y[i] = pb[i] / QQ(s.divisors[i]);
    } else if (pb[i] != 0) {
      throw ObstructionNonzero("splitting obstruction: relation phase " + pb[i].get_str() +
                               " on a kernel generator");
    }
  }
  QVec x(d, QQ(0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) x[i] += QQ(s.Q(i, j)) * y[j];
  QVec w = H.basis_phases();
  for (std::size_t i = 0; i < d; ++i) w[i] += x[i];
  res.acting = H.with_phases(w);
  res.adjusted = true;
  if (!is_identity(relation_word(res.normal, res.acting, phi)))
    throw InternalInconsistency("corrected lifts do not satisfy the relation");
  if (!is_standard(res.acting)) throw InternalInconsistency("corrected lift is not standard");
  if (!is_identity(lift_power(res.acting, p))) throw OrderDoubled("corrected lift has order 2p");
  return res;
}

}  // namespace lvorb
