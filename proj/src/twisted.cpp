#include "lvorb/twisted.hpp"

#include <numeric>

#include "lvorb/errors.hpp"

namespace lvorb {

LVec to_long(const ZVec& v) {
  LVec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].fits_slong_p()) throw ConductorOverflow("vector entry does not fit in a machine word");
    r[i] = v[i].get_si();
  }
  return r;
}

ZVec to_zz(const LVec& v) { return ZVec(v.begin(), v.end()); }

namespace {

long mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

std::vector<std::vector<long>> to_long(const ZMat& m) {
  std::vector<std::vector<long>> r(m.rows(), std::vector<long>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r[i][j] = m(i, j).get_si();
  return r;
}

long ext_gcd(long a, long b, long& x, long& y) {
  if (b == 0) {
    x = a >= 0 ? 1 : -1;
    y = 0;
    return std::labs(a);
  }
  long x1, y1;
  long g = ext_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

}  // namespace

FactoredScalar FactoredScalar::operator*(const FactoredScalar& b) const {
  FactoredScalar r = *this;
  r.phase = frac(r.phase + b.phase);
  r.nexp += b.nexp;
  r.sqrt2 += b.sqrt2;
  if (r.E.size() < b.E.size()) r.E.resize(b.E.size(), 0);
  for (std::size_t k = 0; k < b.E.size(); ++k) r.E[k] += b.E[k];
  return r;
}

FactoredScalar FactoredScalar::inverse() const { return pow(-1); }

FactoredScalar FactoredScalar::pow(long k) const {
  FactoredScalar r = *this;
  r.phase = frac(phase * k);
  r.nexp *= k;
  r.sqrt2 *= k;
  for (auto& e : r.E) e *= k;
  return r;
}

FactoredScalar FactoredScalar::root(const QQ& phase) {
  FactoredScalar r;
  r.phase = frac(phase);
  return r;
}

Cyclotomic ScalarField::eval(const FactoredScalar& s) const {
  const long n = n_;
  QQ phase = s.phase;
  std::vector<long> E(n, 0);
  for (std::size_t k = 1; k < s.E.size(); ++k) {
    if (s.E[k] == 0) continue;
    if (static_cast<long>(k) >= n) throw InternalInconsistency("factor index exceeds the field order");
    // 1 - xi^k = -xi^k (1 - xi^{n-k})
    if (2 * static_cast<long>(k) > n) {
      E[n - k] += s.E[k];
      phase += qq(s.E[k]) * (qq(1, 2) + qq(k, n));
    } else {
      E[k] += s.E[k];
    }
  }
  Cyclotomic r = Cyclotomic::exp2pi(frac(phase));
  if (s.nexp) {
    QQ p = 1;
    for (long i = 0; i < std::labs(s.nexp); ++i) p *= n;
    r = r.scaled(s.nexp > 0 ? p : QQ(1) / p);
  }
  if (s.sqrt2) {
    long e = s.sqrt2;
    long h = e >= 0 ? e / 2 : -((-e + 1) / 2);
    QQ p = 1;
    for (long i = 0; i < std::labs(h); ++i) p *= 2;
    r = r.scaled(h >= 0 ? p : QQ(1) / p);
    if (e - 2 * h) r *= sqrt_rational(QQ(2));
  }
  for (long k = 1; k < n; ++k) {
    if (E[k] == 0) continue;
    auto it = base_.find(k);
    if (it == base_.end()) {
      Cyclotomic b = Cyclotomic(1) - Cyclotomic::root_of_unity(k, n);
      it = base_.emplace(k, b).first;
      inv_.emplace(k, b.inverse());
    }
    r *= (E[k] > 0 ? it->second : inv_.at(k)).pow(std::labs(E[k]));
  }
  return r;
}

Monomial Monomial::identity(std::size_t d) {
  Monomial m;
  m.perm.resize(d);
  std::iota(m.perm.begin(), m.perm.end(), 0);
  m.ph.assign(d, QQ(0));
  return m;
}

Monomial Monomial::operator*(const Monomial& b) const {
  Monomial r;
  const std::size_t d = dim();
  r.perm.resize(d);
  r.ph.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    r.perm[c] = perm[b.perm[c]];
    r.ph[c] = frac(b.ph[c] + ph[b.perm[c]]);
  }
  r.scalar = scalar * b.scalar;
  return r;
}

Monomial Monomial::scaled(const FactoredScalar& s) const {
  Monomial r = *this;
  r.scalar = r.scalar * s;
  return r;
}

Monomial Monomial::inverse() const {
  Monomial r;
  const std::size_t d = dim();
  r.perm.resize(d);
  r.ph.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    r.perm[perm[c]] = c;
    r.ph[perm[c]] = frac(-ph[c]);
  }
  r.scalar = scalar.inverse();
  return r;
}

Monomial Monomial::pow(long k) const {
  Monomial r = identity(dim());
  Monomial b = k >= 0 ? *this : inverse();
  for (long e = std::labs(k); e > 0; e >>= 1) {
    if (e & 1) r = r * b;
    if (e > 1) b = b * b;
  }
  return r;
}

std::optional<QQ> Monomial::scalar_phase() const {
  for (std::size_t c = 0; c < dim(); ++c)
    if (perm[c] != c || ph[c] != ph[0]) return std::nullopt;
  return dim() ? ph[0] : QQ(0);
}

CMat Monomial::dense(const ScalarField& F) const {
  const Cyclotomic s = F.eval(scalar);
  CMat m(dim(), dim());
  for (std::size_t c = 0; c < dim(); ++c) m(perm[c], c) = s * Cyclotomic::exp2pi(ph[c]);
  return m;
}

QQ DarbouxBasis::pair(const std::vector<long>& x, const std::vector<long>& y) const {
  QQ r = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < y.size(); ++j)
      if (y[j]) r += pairing[i][j] * (x[i] * y[j]);
  }
  return frac(r);
}

std::pair<std::vector<long>, std::vector<long>> DarbouxBasis::coords(const std::vector<long>& x) const {
  std::vector<long> p(n.size()), q(n.size());
  std::vector<long> back(orders.size(), 0);
  for (std::size_t j = 0; j < n.size(); ++j) {
    QQ u = pair(x, b[j]) * n[j], v = pair(a[j], x) * n[j];
    if (u.get_den() != 1 || v.get_den() != 1) throw InternalInconsistency("pairing is not n_j-torsion");
    p[j] = mod(u.get_num().get_si(), n[j]);
    q[j] = mod(v.get_num().get_si(), n[j]);
    for (std::size_t i = 0; i < orders.size(); ++i) back[i] += p[j] * a[j][i] + q[j] * b[j][i];
  }
  for (std::size_t i = 0; i < orders.size(); ++i)
    if (mod(back[i] - x[i], orders[i]) != 0) throw InternalInconsistency("Darboux coordinates do not reconstruct the element");
  return {p, q};
}

DarbouxBasis darboux_basis(const std::vector<long>& orders, const std::vector<std::vector<QQ>>& pairing) {
  DarbouxBasis D;
  D.orders = orders;
  D.pairing = pairing;
  const std::size_t r = orders.size();
  auto reduce = [&](std::vector<long> x) {
    for (std::size_t i = 0; i < r; ++i) x[i] = mod(x[i], orders[i]);
    return x;
  };
  auto is_zero = [](const std::vector<long>& x) {
    for (long v : x)
      if (v) return false;
    return true;
  };
  auto order_of = [&](const std::vector<long>& x) {
    long o = 1;
    for (std::size_t i = 0; i < r; ++i) o = lcm_long(o, orders[i] / std::gcd(x[i], orders[i]));
    return o;
  };
  auto scale = [&](const std::vector<long>& x, long c) {
    std::vector<long> y(r);
    for (std::size_t i = 0; i < r; ++i) y[i] = x[i] * c;
    return reduce(y);
  };
  auto add = [&](std::vector<long> x, const std::vector<long>& y) {
    for (std::size_t i = 0; i < r; ++i) x[i] += y[i];
    return reduce(x);
  };

  std::vector<std::vector<long>> gens;
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<long> e(r, 0);
    e[i] = 1;
    if (orders[i] > 1) gens.push_back(reduce(e));
  }
  std::vector<std::pair<std::vector<long>, std::vector<long>>> pairs;
  std::vector<long> ns;
  while (!gens.empty()) {
    long e = 1;
    for (const auto& x : gens) e = lcm_long(e, order_of(x));
    // element of order e: combine elements of maximal p-power order for each prime p | e
    std::vector<long> a(r, 0);
    long rest = e;
    for (long p = 2; rest > 1; ++p) {
      if (rest % p) continue;
      long pe = 1;
      while (rest % p == 0) rest /= p, pe *= p;
      for (const auto& x : gens) {
        long o = order_of(x);
        if (o % pe == 0) {
          a = add(a, scale(x, o / pe));
          break;
        }
      }
    }
    if (order_of(a) != e) throw InternalInconsistency("failed to build an element of maximal order");
    std::vector<long> coef(gens.size(), 0);
    long g = e;
    for (std::size_t j = 0; j < gens.size(); ++j) {
      QQ u = D.pair(a, gens[j]) * e;
      long uj = mod(u.get_num().get_si(), e), x, y;
      long g2 = ext_gcd(g, uj, x, y);
      for (auto& c : coef) c = mod(c * x, e);
      coef[j] = mod(y, e);
      g = g2;
    }
    if (g != 1) throw DegenerateForm("commutator form is degenerate on the quotient");
    std::vector<long> b(r, 0);
    for (std::size_t j = 0; j < gens.size(); ++j) b = add(b, scale(gens[j], coef[j]));
    if (D.pair(a, b) != qq(1, e)) throw InternalInconsistency("Darboux partner has the wrong pairing");
    std::vector<std::vector<long>> next;
    for (const auto& x : gens) {
      long u = QQ(D.pair(a, x) * e).get_num().get_si();
      long v = QQ(D.pair(b, x) * e).get_num().get_si();
      std::vector<long> y = add(add(x, scale(a, v)), scale(b, -u));
      if (!is_zero(y)) next.push_back(y);
    }
    pairs.push_back({a, b});
    ns.push_back(e);
    gens = std::move(next);
  }
  for (std::size_t j = pairs.size(); j-- > 0;) {
    D.a.push_back(pairs[j].first);
    D.b.push_back(pairs[j].second);
    D.n.push_back(ns[j]);
  }
  return D;
}

long TwistedModuleData::inner_gk(const LVec& a, long k, const LVec& b) const {
  const auto& m = gk[mod(k, n)];
  long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    long t = 0;
    for (std::size_t j = 0; j < b.size(); ++j) t += m[i][j] * b[j];
    s += a[i] * t;
  }
  return s;
}

LVec TwistedModuleData::apply(const LVec& a, const ZMat& m) const { return to_long(vecmat(to_zz(a), m)); }

QQ commutator_exponent(const TwistedModuleData& W, const LVec& a, const LVec& b) {
  QQ r = 0;
  for (long k = 0; k < W.n; ++k) {
    long e = W.inner_gk(a, k, b);
    if (e) r -= qq(e) * (qq(1, 2) + qq(k, W.n));
  }
  return frac(r);
}

FactoredScalar b_factor(const TwistedModuleData& W, const LVec& a, const LVec& b) {
  FactoredScalar s;
  s.E.assign(W.n, 0);
  s.nexp = -W.inner(a, b);
  for (long k = 1; k < W.n; ++k) s.E[k] = W.inner_gk(a, k, b);
  return s;
}

FactoredScalar eps_hat(const TwistedModuleData& W, const LVec& a, const LVec& b) {
  FactoredScalar s = b_factor(W, a, b);
  long v = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    long t = 0;
    for (std::size_t j = 0; j < b.size(); ++j) t += W.gbar[i][j] * b[j];
    v += a[i] * t;
  }
  if (v % 2) s.phase = frac(s.phase + qq(1, 2));
  return s;
}

FactoredScalar sqrt_b(const TwistedModuleData& W, const LVec& a) {
  const long n = W.n;
  FactoredScalar s;
  s.E.assign(n, 0);
  long nrm = W.inner(a, a);
  s.nexp = -nrm / 2;
  for (long k = 1; 2 * k < n; ++k) {
    long e = W.inner_gk(a, k, a);
    s.E[k] = e;
    // i xi_{2n}^{-k} (1 - xi_n^k) is positive real
    s.phase = frac(s.phase + qq(e) * (qq(1, 4) - qq(k, 2 * n)));
  }
  if (n % 2 == 0) s.sqrt2 = W.inner_gk(a, n / 2, a);
  return s;
}

FactoredScalar twist_scalar(const TwistedModuleData& W, const LVec& a) {
  const ZMat& g = W.lift.matrix();
  const std::size_t d = g.rows();
  LVec ag = W.apply(a, g), amg(d);
  for (std::size_t i = 0; i < d; ++i) amg[i] = a[i] - ag[i];
  FactoredScalar s = eps_hat(W, amg, ag);
  // eps_hat contains B; we need e / B
  FactoredScalar binv = b_factor(W, amg, ag).inverse();
  binv = binv * binv;
  s = s * binv;
  QVec pa = vecmat(to_q(to_zz(a)), W.A.projector);
  QQ half = bilinear(pa, to_q(W.L.gram), pa) / 2;
  s.phase = frac(s.phase - W.lift.eta(to_zz(a)) + half);
  return s;
}

bool is_coinvariant(const TwistedModuleData& W, const LVec& v) {
  LVec c = W.apply(v, W.Qsnf);
  for (std::size_t i = W.k; i < c.size(); ++i)
    if (c[i]) return false;
  return true;
}

Monomial u_operator(const TwistedModuleData& W, const LVec& mu) {
  LVec c = W.apply(mu, W.Qsnf);
  for (std::size_t i = W.k; i < c.size(); ++i)
    if (c[i]) throw NotCoinvariant("vector is not in the coinvariant lattice " + to_string(to_zz(mu)));
  const ZMat& basis = W.A.coinvariant_basis;
  const std::size_t d = mu.size();
  Monomial U = Monomial::identity(W.dim);
  LVec x(d, 0);
  for (std::size_t i = 0; i < W.k; ++i) {
    if (!c[i]) continue;
    LVec ai = to_long(basis.row(i)), y(d);
    for (std::size_t j = 0; j < d; ++j) y[j] = c[i] * ai[j];
    long t = c[i] * (c[i] - 1) / 2;
    Monomial V = W.basis_ops[i].pow(c[i]).scaled(eps_hat(W, ai, ai).pow(t));
    U = (U * V).scaled(eps_hat(W, x, y));
    for (std::size_t j = 0; j < d; ++j) x[j] += y[j];
  }
  return U;
}

bool twist_compat_check(const TwistedModuleData& W, const LVec& a, std::string* diagnostic) {
  const ZMat& g = W.lift.matrix();
  LVec ag = W.apply(a, g), amg(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) amg[i] = a[i] - ag[i];
  Monomial U = u_operator(W, amg);
  auto ph = U.scalar_phase();
  if (!ph) {
    if (diagnostic) *diagnostic = "U_{a(1-g)} is not scalar";
    return false;
  }
  Cyclotomic lhs = W.field.eval(U.scalar) * Cyclotomic::exp2pi(*ph);
  Cyclotomic rhs = W.field.eval(twist_scalar(W, a));
  if (lhs != rhs) {
    if (diagnostic) *diagnostic = "U_{a(1-g)} = " + lhs.str() + " but expected " + rhs.str();
    return false;
  }
  return true;
}

namespace {

Monomial heisenberg_op(const std::vector<long>& n, const std::vector<long>& p, const std::vector<long>& q) {
  std::size_t dim = 1;
  for (long v : n) dim *= v;
  Monomial m = Monomial::identity(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    std::size_t rem = c, t = 0, stride = 1;
    QQ ph = 0;
    for (std::size_t j = 0; j < n.size(); ++j) {
      long cj = rem % n[j];
      rem /= n[j];
      long tj = mod(cj + q[j], n[j]);
      t += tj * stride;
      stride *= n[j];
      ph += qq(p[j] * tj, n[j]);
    }
    m.perm[c] = t;
    m.ph[c] = frac(ph);
  }
  return m;
}

}  // namespace

TwistedModuleData build_twisted_module(const GramLattice& L, const Lift& g) {
  TwistedModuleData W;
  W.L = L;
  W.lift = g;
  W.A = analyze_automorphism(L, g.matrix());
  W.n = W.A.order;
  if (!is_standard(g)) throw NonStandardLift("lift is not trivial on the fixed lattice");
  if (lift_order(g).doubled()) throw OrderDoubled("lift has order twice the lattice order");
  W.field = ScalarField(W.n);
  W.rho = W.A.rho();
  W.k = W.A.snf.rank();
  W.Qsnf = W.A.snf.Q;
  W.gbar = to_long(halved_gram(L));
  ZMat p = L.gram;
  for (long k = 0; k < W.n; ++k) {
    W.gk.push_back(to_long(p));
    p = g.matrix() * p;
  }
  for (const auto& d : W.A.divisors) W.s.push_back(d.get_si());
  std::vector<LVec> alpha(W.k);
  for (std::size_t i = 0; i < W.k; ++i) {
    alpha[i] = to_long(W.A.coinvariant_basis.row(i));
    if (W.s[i] > 1) W.nontrivial.push_back(i);
  }
  const std::size_t r = W.nontrivial.size();
  std::vector<long> orders(r);
  std::vector<std::vector<QQ>> pairing(r, std::vector<QQ>(r));
  long card = 1;
  for (std::size_t a = 0; a < r; ++a) {
    orders[a] = W.s[W.nontrivial[a]];
    card *= orders[a];
    for (std::size_t b = 0; b < r; ++b)
      pairing[a][b] = commutator_exponent(W, alpha[W.nontrivial[a]], alpha[W.nontrivial[b]]);
  }
  W.darboux = darboux_basis(orders, pairing);
  W.dim = 1;
  for (long v : W.darboux.n) W.dim *= v;
  if (static_cast<long>(W.dim * W.dim) != card)
    throw NonSquareQuotient("|N| = " + std::to_string(card) + " is not the square of the Heisenberg dimension");
  const std::size_t d = L.rank();
  auto rep = [&](const std::vector<long>& coef) {
    LVec v(d, 0);
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t j = 0; j < d; ++j) v[j] += coef[a] * alpha[W.nontrivial[a]][j];
    return v;
  };
  for (std::size_t j = 0; j < W.darboux.n.size(); ++j) {
    W.darboux_a.push_back(rep(W.darboux.a[j]));
    W.darboux_b.push_back(rep(W.darboux.b[j]));
  }

  for (std::size_t i = 0; i < W.k; ++i) {
    std::vector<long> x(r, 0);
    for (std::size_t a = 0; a < r; ++a)
      if (W.nontrivial[a] == i) x[a] = 1;
    auto [pc, qc] = W.darboux.coords(x);
    Monomial R = heisenberg_op(W.darboux.n, pc, qc);
    const long s = W.s[i];
    FactoredScalar c = twist_scalar(W, to_long(W.A.preimages.row(i)));
    FactoredScalar lam;
    if (s == 1) {
      lam = c;
    } else {
      auto rs = R.pow(s).scalar_phase();
      if (!rs) throw InternalInconsistency("R^s is not scalar");
      FactoredScalar t = c * eps_hat(W, alpha[i], alpha[i]).pow(-s * (s - 1) / 2) * FactoredScalar::root(-*rs);
      FactoredScalar sq = sqrt_b(W, alpha[i]);
      Cyclotomic u = W.field.eval(t * sq.pow(-s));
      auto e = u.root_exponent();
      if (!e) throw NotARootOfUnity("lambda^s / sqrt(B)^s = " + u.str() + " is not a root of unity");
      lam = sq * FactoredScalar::root(*e / s);
    }
    W.lambda.push_back(lam);
    W.lambda_root_order.push_back(s);
    W.basis_ops.push_back(R.scaled(lam));
  }
  for (std::size_t i = 0; i < W.k; ++i) {
    std::string diag;
    if (!twist_compat_check(W, to_long(W.A.preimages.row(i)), &diag))
      throw InternalInconsistency("twist compatibility fails on preimage " + std::to_string(i) + ": " + diag);
  }
  return W;
}

}  // namespace lvorb
