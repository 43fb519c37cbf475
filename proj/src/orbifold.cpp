#include "lvorb/orbifold.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

#include "lvorb/errors.hpp"

namespace lvorb {

namespace {

CMat scaled(const CMat& m, const Cyclotomic& c) {
  CMat r = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!r(i, j).is_zero()) r(i, j) *= c;
  return r;
}

CMat identity_c(std::size_t d) { return CMat::identity(d); }

std::vector<Cyclotomic> matvec(const CMat& m, const std::vector<Cyclotomic>& v) {
  std::vector<Cyclotomic> r(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!m(i, j).is_zero() && !v[j].is_zero()) r[i] += m(i, j) * v[j];
  return r;
}

// basis of {x : M x = 0}
std::vector<std::vector<Cyclotomic>> nullspace(CMat m) {
  const std::size_t R = m.rows(), C = m.cols();
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < C && row < R; ++col) {
    std::size_t p = row;
    while (p < R && m(p, col).is_zero()) ++p;
    if (p == R) continue;
    m.swap_rows(p, row);
    Cyclotomic inv = m(row, col).inverse();
    for (std::size_t j = col; j < C; ++j)
      if (!m(row, j).is_zero()) m(row, j) *= inv;
    for (std::size_t i = 0; i < R; ++i) {
      if (i == row || m(i, col).is_zero()) continue;
      Cyclotomic f = m(i, col);
      for (std::size_t j = col; j < C; ++j)
        if (!m(row, j).is_zero()) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  std::vector<std::vector<Cyclotomic>> basis;
  std::set<std::size_t> piv(pivots.begin(), pivots.end());
  for (std::size_t free = 0; free < C; ++free) {
    if (piv.count(free)) continue;
    std::vector<Cyclotomic> x(C);
    x[free] = Cyclotomic(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -m(r, free);
    basis.push_back(x);
  }
  return basis;
}

std::optional<std::pair<std::size_t, std::size_t>> first_nonzero(const CMat& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!m(i, j).is_zero()) return std::make_pair(i, j);
  return std::nullopt;
}

CMat normalize_first(const CMat& m) {
  auto f = first_nonzero(m);
  if (!f) throw InternalInconsistency("zero intertwiner");
  return scaled(m, m(f->first, f->second).inverse());
}

// c with a = c b, if any
std::optional<Cyclotomic> proportional(const CMat& a, const CMat& b) {
  auto f = first_nonzero(b);
  if (!f) return std::nullopt;
  Cyclotomic c = a(f->first, f->second) / b(f->first, f->second);
  if (scaled(b, c) != a) return std::nullopt;
  return c;
}

std::optional<Cyclotomic> scalar_of(const CMat& m) {
  return proportional(m, identity_c(m.rows()));
}

Cyclotomic trace_with(const Monomial& U, const ScalarField& F, const CMat& O) {
  Cyclotomic t;
  for (std::size_t c = 0; c < U.dim(); ++c) {
    const Cyclotomic& o = O(c, U.perm[c]);
    if (!o.is_zero()) t += o * Cyclotomic::exp2pi(U.ph[c]);
  }
  if (t.is_zero()) return t;
  return t * F.eval(U.scalar);
}

LVec sub(const LVec& a, const LVec& b) {
  LVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

QQ c24(const GramLattice& L) { return qq(static_cast<long>(L.rank()), 24); }

// O U_mu = eta_h(mu)^kSign U_{mu h} O
constexpr int kSign = -1;

}  // namespace

bool intertwines(const TwistedModuleData& W, const Lift& h, const CMat& O, const LVec& mu) {
  CMat lhs = O * u_operator(W, mu).dense(W.field);
  LVec muh = W.apply(mu, h.matrix());
  CMat rhs = scaled(u_operator(W, muh).dense(W.field) * O, Cyclotomic::exp2pi(kSign * h.eta(to_zz(mu))));
  return lhs == rhs;
}

CMat centralizer_action(const TwistedModuleData& W, const Lift& h) {
  const ZMat& g = W.lift.matrix();
  if (g * h.matrix() != h.matrix() * g) throw NotCommuting("g and h do not commute on the lattice");
  if (!is_standard(h)) throw NonStandardLift("centralizer element lift is not standard");
  const std::size_t D = W.dim;
  const std::size_t r = W.darboux.n.size();
  const ScalarField& F = W.field;
  auto phase = [&](const LVec& v) { return Cyclotomic::exp2pi(kSign * h.eta(to_zz(v))); };
  CMat O;
  if (D == 1) {
    O = identity_c(1);
  } else {
    CMat stack(r * D, D);
    for (std::size_t j = 0; j < r; ++j) {
      const LVec& a = W.darboux_a[j];
      Monomial Ua = u_operator(W, a);
      if (Ua.perm[0] != 0) throw InternalInconsistency("Darboux a-operator is not diagonal");
      Cyclotomic kappa = F.eval(Ua.scalar) * Cyclotomic::exp2pi(Ua.ph[0]);
      CMat V = scaled(u_operator(W, W.apply(a, h.matrix())).dense(F), phase(a) / kappa);
      for (std::size_t i = 0; i < D; ++i) {
        for (std::size_t c = 0; c < D; ++c) stack(j * D + i, c) = V(i, c);
        stack(j * D + i, i) -= Cyclotomic(1);
      }
    }
    auto ns = nullspace(stack);
    if (ns.size() != 1)
      throw SolutionSpaceNotOneDim("joint eigenspace has dimension " + std::to_string(ns.size()));
    const std::vector<Cyclotomic>& v = ns[0];
    std::vector<CMat> Wb;
    std::vector<Monomial> Ub;
    for (std::size_t j = 0; j < r; ++j) {
      const LVec& b = W.darboux_b[j];
      Ub.push_back(u_operator(W, b));
      Wb.push_back(scaled(u_operator(W, W.apply(b, h.matrix())).dense(F), phase(b)));
    }
    O = CMat(D, D);
    for (std::size_t c = 0; c < D; ++c) {
      std::vector<long> digit(r);
      std::size_t rem = c;
      for (std::size_t j = 0; j < r; ++j) {
        digit[j] = rem % W.darboux.n[j];
        rem /= W.darboux.n[j];
      }
      Monomial M = Monomial::identity(D);
      for (std::size_t j = 0; j < r; ++j) M = M * Ub[j].pow(digit[j]);
      if (M.perm[0] != c) throw InternalInconsistency("b-operators do not reach basis vector " + std::to_string(c));
      Cyclotomic kappa = F.eval(M.scalar) * Cyclotomic::exp2pi(M.ph[0]);
      std::vector<Cyclotomic> w = v;
      for (std::size_t j = r; j-- > 0;)
        for (long t = 0; t < digit[j]; ++t) w = matvec(Wb[j], w);
      Cyclotomic kinv = kappa.inverse();
      for (std::size_t i = 0; i < D; ++i)
        if (!w[i].is_zero()) O(i, c) = w[i] * kinv;
    }
  }
  for (std::size_t i = 0; i < W.k; ++i)
    if (!intertwines(W, h, O, to_long(W.A.coinvariant_basis.row(i))))
      throw NotCommuting("no intertwiner for h: the lifts do not commute (basis vector " + std::to_string(i) + ")");
  O = normalize_first(O);
  const std::size_t D2 = O.rows();
  Cyclotomic c;
  for (std::size_t j = 0; j < D2; ++j)
    if (!O(0, j).is_zero()) c += O(0, j) * O(0, j).conj();
  if (c.is_rational() && c.rational() > 0 && c.rational() != 1) O = scaled(O, sqrt_rational(c.rational()).inverse());
  return O;
}

QSeries heisenberg_char(const ZMat& g, const ZMat& h, const QQ& order) {
  const long n = matrix_order(g), m = matrix_order(h);
  auto dims = joint_eigenspace_dims(g, h);
  QQ rho = 0;
  std::vector<ProductFactor> f;
  for (const auto& [ij, dim] : dims) {
    auto [i, j] = ij;
    rho += qq(i * (n - i) * dim, 4 * n * n);
    f.push_back({Cyclotomic::root_of_unity(j, m), i == 0 ? QQ(1) : qq(i, n), -dim});
  }
  return product_expand(f, order - rho).shifted(rho);
}

QSeries lattice_char(const TwistedModuleData& W, const Lift& h, const CMat& O, const QQ& order) {
  QSeries out = QSeries::zero_to(order);
  if (order < 0) return out;
  const ZMat& hm = h.matrix();
  const ZMat& Lam = W.A.complement;
  const std::size_t d = hm.rows();
  const ZMat one = ZMat::identity(d);
  std::vector<LVec> basis;
  if (Lam.rows() > 0) {
    QMat M = to_q(Lam * (hm - one)) * W.A.projector;
    ZMat K = integer_left_kernel(M);
    ZMat B = K * Lam;
    for (std::size_t i = 0; i < B.rows(); ++i) basis.push_back(to_long(B.row(i)));
  }
  auto term = [&](const LVec& alpha) {
    LVec mu = sub(W.apply(alpha, hm), alpha);
    Monomial U = u_operator(W, mu);
    Cyclotomic tr = trace_with(U, W.field, O);
    if (tr.is_zero()) return tr;
    FactoredScalar s = eps_hat(W, alpha, mu) * FactoredScalar::root(-h.eta(to_zz(alpha)));
    return tr * W.field.eval(s);
  };
  if (basis.empty()) {
    Cyclotomic c = term(LVec(d, 0));
    if (!c.is_zero()) out.add_term(QQ(0), c);
    return out;
  }
  const std::size_t r = basis.size();
  QMat P = W.A.projector;
  QMat Gq = to_q(W.L.gram);
  std::vector<QVec> proj;
  for (const auto& b : basis) proj.push_back(vecmat(to_q(to_zz(b)), P));
  QMat gp(r, r);
  ZZ den = 1;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      gp(i, j) = bilinear(proj[i], Gq, proj[j]);
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), gp(i, j).get_den_mpz_t());
    }
  ZMat gz(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) gz(i, j) = QQ(gp(i, j) * den).get_num();
  std::map<QQ, Cyclotomic> acc;
  enumerate_by_norm(gz, order * QQ(den), [&](const std::vector<long>& u, const QQ& half) {
    LVec alpha(d, 0);
    for (std::size_t i = 0; i < r; ++i)
      if (u[i])
        for (std::size_t j = 0; j < d; ++j) alpha[j] += u[i] * basis[i][j];
    Cyclotomic c = term(alpha);
    if (c.is_zero()) return;
    QQ e = half / QQ(den);
    auto it = acc.find(e);
    if (it == acc.end())
      acc.emplace(e, c);
    else
      it->second += c;
  });
  for (const auto& [e, c] : acc) out.add_term(e, c);
  return out;
}

QSeries twining_from(const TwistedModuleData& W, const Lift& h, const CMat& O, const QQ& order) {
  const QQ shift = c24(W.L);
  QSeries H = heisenberg_char(W.lift.matrix(), h.matrix(), order + shift);
  QSeries T = lattice_char(W, h, O, order + shift - W.rho);
  return (H * T).shifted(-shift).truncated(order);
}

namespace {
std::map<std::string, QSeries>& full_thetas() {
  static std::map<std::string, QSeries> m;
  return m;
}
}  // namespace

void set_full_theta(const GramLattice& L, const QSeries& theta) {
  if (theta.coeff(0) != Cyclotomic(1)) throw ValidationError("theta series must start with 1");
  full_thetas()[lattice_hash(L)] = theta;
}

QSeries untwisted_twining(const GramLattice& L, const Lift& h, const QQ& order) {
  if (!is_standard(h)) throw NonStandardLift("lift is not trivial on its fixed lattice");
  AutomorphismData A = analyze_automorphism(L, h.matrix());
  const QQ shift = c24(L);
  QSeries theta = QSeries::constant(Cyclotomic(1)).truncated(order + shift);
  auto given = A.fixed_rank() == L.rank() ? full_thetas().find(lattice_hash(L)) : full_thetas().end();
  if (given != full_thetas().end()) {
    const auto& o = given->second.order();
    if (o && *o < order + shift) throw InsufficientTruncation("supplied theta series is known only to q^" + o->get_str());
    theta = given->second.truncated(order + shift);
  } else if (A.fixed_rank() > 0) {
    ZMat F = A.fixed_basis;
    ZMat gh = F * L.gram * F.transpose();
    ThetaSpec t{gh, {}, {}};
    theta = theta_expand(t, order + shift);
  }
  EtaQuotient eq;
  for (const auto& [t, b] : A.cycle_type.b) eq.push_back({QQ(t), b});
  QSeries den = eta_expand(eq, order + 2 * shift + 1);
  return (theta / den).truncated(order);
}

long type_of(const TwistedModuleData& W) {
  QQ v = W.rho * (W.n * W.n);
  if (v.get_den() != 1) throw InternalInconsistency("N^2 rho is not an integer");
  long r = v.get_num().get_si() % W.n;
  return r < 0 ? r + W.n : r;
}

long type_of(const GramLattice& L, const Lift& g) {
  if (!is_standard(g)) throw NonStandardLift("type requires a standard lift");
  LiftOrder o = lift_order(g);
  if (o.doubled()) throw OrderDoubled("lift has order twice the lattice order");
  AutomorphismData A = analyze_automorphism(L, g.matrix());
  const long N = A.order;
  QQ v = A.rho() * (N * N);
  if (v.get_den() != 1) throw InternalInconsistency("N^2 rho is not an integer");
  long r = v.get_num().get_si() % N;
  return r < 0 ? r + N : r;
}

std::string AnomalyReport::str() const {
  std::ostringstream os;
  os << (verdict == Verdict::Trivial ? "trivial" : verdict == Verdict::Anomalous ? "anomalous" : "undecided");
  const auto& list = decisive.empty() ? cyclic : decisive;
  os << " (";
  for (std::size_t i = 0; i < list.size(); ++i) os << (i ? ", " : "") << "r_" << list[i].name << "=" << list[i].type;
  os << ")";
  return os.str();
}

AnomalyReport anomaly_check(const LiftedGroup& LG, const GramLattice& L) {
  const FiniteGroup& G = LG.group;
  AnomalyReport rep;
  std::set<std::set<std::size_t>> seen;
  for (std::size_t x = 1; x < G.size(); ++x) {
    auto c = G.cyclic_subgroup(x);
    std::set<std::size_t> key(c.begin(), c.end());
    if (!seen.insert(key).second) continue;
    rep.cyclic.push_back({G.names[x], G.orders[x], type_of(L, G.elements[x])});
  }
  auto entry = [&](std::size_t x) { return TypeEntry{G.names[x], G.orders[x], type_of(L, G.elements[x])}; };
  const auto& s = LG.spec;
  switch (s.kind) {
    case GroupKind::Cyclic:
      rep.decisive.push_back(entry(G.generators[0]));
      break;
    case GroupKind::Semidirect: {
      rep.decisive.push_back(entry(G.generators[0]));
      long r = std::gcd(s.phi * s.phi - 1, s.q);
      if (r < 0) r = -r;
      if (r == 0) r = s.q;
      if (r > 1) rep.decisive.push_back(entry(G.power(G.generators[1], s.q / r)));
      break;
    }
    case GroupKind::ProductPP:
      rep.decisive.push_back(entry(G.generators[0]));
      rep.decisive.push_back(entry(G.generators[1]));
      rep.decisive.push_back(entry(G.mul[G.generators[0]][G.generators[1]]));
      break;
    case GroupKind::Generic:
      rep.verdict = Verdict::Undecided;
      return rep;
  }
  rep.verdict = Verdict::Trivial;
  for (const auto& e : rep.decisive)
    if (e.type != 0) rep.verdict = Verdict::Anomalous;
  return rep;
}

Orbifold::Orbifold(GramLattice L, LiftedGroup G, const CharacterCache* cache)
    : L_(std::move(L)), G_(std::move(G)), cache_(cache) {}

const TwistedModuleData& Orbifold::sector(std::size_t k) {
  auto it = sectors_.find(k);
  if (it == sectors_.end())
    it = sectors_.emplace(k, std::make_unique<TwistedModuleData>(build_twisted_module(L_, group().elements[k]))).first;
  return *it->second;
}

std::string Orbifold::provenance(std::size_t k, std::size_t h) const {
  auto it = prov_.find({k, h});
  return it == prov_.end() ? "" : it->second;
}

QSeries Orbifold::compute_twining(std::size_t k, std::size_t h, const CMat& O, const QQ& order) {
  const Lift& g = group().elements[k];
  const Lift& hl = group().elements[h];
  std::string key;
  if (cache_) {
    key = "twining " + lattice_hash(L_) + " g=" + lift_key(g) + " h=" + lift_key(hl) + " O=" + serialize_matrix(O) +
          " order=" + order.get_str();
    if (auto hit = cache_->load(key)) {
      prov_[{k, h}] = "cache";
      return QSeries::deserialize(*hit);
    }
  }
  QSeries s;
  if (k == 0) {
    s = untwisted_twining(L_, hl, order);
    prov_[{k, h}] = "closed form";
  } else {
    s = twining_from(sector(k), hl, O, order);
    prov_[{k, h}] = "direct construction";
  }
  if (cache_) cache_->store(key, s.serialize());
  return s;
}

void Orbifold::residual_by_s_matching(SectorAction& A, std::vector<std::map<std::size_t, CMat>>& options) {
  const FiniteGroup& G = group();
  std::size_t c = 0;
  for (std::size_t x : A.centralizer)
    if (G.orders[x] == static_cast<long>(A.centralizer.size())) c = x;
  const QQ ord(4);
  const std::complex<double> tau(0, 1);
  const QSeries& ref = twining(c, G.inv[A.element], ord);
  std::complex<double> target = eval_at_tau(ref, tau, 1e-3).value;
  double best = -1;
  std::size_t pick = 0;
  for (std::size_t i = 0; i < options.size(); ++i) {
    QSeries s = compute_twining(A.element, c, options[i].at(c), ord);
    double dist = std::abs(eval_at_tau(s, tau, 1e-3).value - target);
    if (best < 0 || dist < best) best = dist, pick = i;
  }
  A.O = options[pick];
  A.normalization = "linearized, residual fixed by S-matching";
}

const SectorAction& Orbifold::action(std::size_t k) {
  auto found = actions_.find(k);
  if (found != actions_.end()) return found->second;
  const FiniteGroup& G = group();
  const TwistedModuleData& W = sector(k);
  SectorAction A;
  A.element = k;
  A.centralizer = G.centralizer(k);
  const long N = G.orders[k];
  const std::size_t D = W.dim;
  std::map<std::size_t, CMat> raw;
  if (k != 0)
    for (std::size_t h : A.centralizer) raw[h] = centralizer_action(W, G.elements[h]);
  std::set<std::size_t> cyc;
  std::map<std::size_t, CMat> canon;
  for (long j = 0; j < N && k != 0; ++j) {
    std::size_t x = G.power(k, j);
    cyc.insert(x);
    if (!scalar_of(raw[x])) throw InternalInconsistency("powers of g do not act by scalars on the defect space");
    canon[x] = scaled(identity_c(D), Cyclotomic::exp2pi(frac(W.rho * j)));
  }
  auto is_hom = [&](const std::map<std::size_t, CMat>& O) {
    for (std::size_t a : A.centralizer)
      for (std::size_t b : A.centralizer)
        if (O.at(a) * O.at(b) != O.at(G.mul[a][b])) return false;
    return true;
  };
  std::map<std::size_t, CMat> fallback = raw;
  for (const auto& [x, m] : canon) fallback[x] = m;
  bool abelian = true;
  for (std::size_t a : A.centralizer)
    for (std::size_t b : A.centralizer)
      if (!G.commute(a, b)) abelian = false;
  if (k == 0) {
    for (std::size_t h : A.centralizer) A.O[h] = identity_c(D);
    A.normalization = "canonical";
    A.linear = true;
  } else if (A.centralizer.size() == cyc.size()) {
    A.O = canon;
    A.normalization = "canonical";
    A.linear = type_of(W) == 0;
  } else if (abelian) {
    std::vector<std::size_t> gens = abelian_generators(G, A.centralizer);
    std::vector<CMat> base;
    std::vector<long> ord;
    bool roots = true;
    for (std::size_t x : gens) {
      const long m = G.orders[x];
      CMat p = identity_c(D);
      for (long i = 0; i < m; ++i) p = p * raw[x];
      auto lam = scalar_of(p);
      auto e = lam ? lam->root_exponent() : std::nullopt;
      if (!e) {
        roots = false;
        break;
      }
      base.push_back(scaled(raw[x], Cyclotomic::exp2pi(QQ(-*e / m))));
      ord.push_back(m);
    }
    std::vector<std::map<std::size_t, CMat>> options;
    if (roots) {
      std::vector<long> t(gens.size(), 0);
      while (true) {
        std::map<std::size_t, CMat> O;
        O[0] = identity_c(D);
        std::deque<std::size_t> todo{0};
        bool ok = true;
        while (!todo.empty() && ok) {
          std::size_t x = todo.front();
          todo.pop_front();
          for (std::size_t j = 0; j < gens.size() && ok; ++j) {
            CMat m = O[x] * scaled(base[j], Cyclotomic::root_of_unity(t[j], ord[j]));
            std::size_t y = G.mul[x][gens[j]];
            auto it = O.find(y);
            if (it == O.end()) {
              O.emplace(y, m);
              todo.push_back(y);
            } else if (it->second != m) {
              ok = false;
            }
          }
        }
        if (ok)
          for (const auto& [x, m] : canon)
            if (O.at(x) != m) ok = false;
        if (ok) options.push_back(O);
        std::size_t j = 0;
        while (j < t.size() && ++t[j] == ord[j]) t[j++] = 0;
        if (j == t.size()) break;
      }
    }
    if (options.empty()) {
      A.O = fallback;
      A.normalization = "projective";
      A.linear = false;
    } else {
      bool cyclic = false;
      for (std::size_t x : A.centralizer)
        if (G.orders[x] == static_cast<long>(A.centralizer.size())) cyclic = true;
      A.linear = true;
      if (options.size() > 1 && cyclic) {
        residual_by_s_matching(A, options);
      } else {
        A.O = options[0];
        A.normalization = options.size() > 1 ? "linearized, trivial residual" : "linearized";
      }
    }
  } else {
    A.O = fallback;
    A.linear = is_hom(A.O);
    A.normalization = A.linear ? "canonical" : "projective";
  }
  for (std::size_t a : A.centralizer)
    for (std::size_t b : A.centralizer) {
      auto c = proportional(A.O.at(a) * A.O.at(b), A.O.at(G.mul[a][b]));
      if (!c) throw InternalInconsistency("centralizer action is not projective");
      A.cocycle[{a, b}] = *c;
    }
  return actions_.emplace(k, std::move(A)).first->second;
}

const QSeries& Orbifold::twining(std::size_t k, std::size_t h, const QQ& order) {
  auto it = chars_.find({k, h});
  if (it != chars_.end() && it->second.first == order) return it->second.second;
  const SectorAction& A = action(k);
  auto oh = A.O.find(h);
  if (oh == A.O.end()) throw NotCommuting("h is not in the centralizer of g");
  QSeries s = compute_twining(k, h, oh->second, order);
  auto& slot = chars_[{k, h}];
  slot = {order, s};
  return slot.second;
}

std::vector<OrbitInfo> Orbifold::sl2z_orbits() {
  const FiniteGroup& G = group();
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<OrbitInfo> out;
  for (std::size_t k = 0; k < G.size(); ++k)
    for (std::size_t h = 0; h < G.size(); ++h) {
      if (!G.commute(k, h) || seen.count({k, h})) continue;
      OrbitInfo o;
      std::deque<std::pair<std::size_t, std::size_t>> todo{{k, h}};
      seen.insert({k, h});
      while (!todo.empty()) {
        auto p = todo.front();
        todo.pop_front();
        o.pairs.push_back(p);
        for (auto q : {std::make_pair(p.second, G.inv[p.first]), std::make_pair(p.first, G.mul[p.first][p.second])})
          if (seen.insert(q).second) todo.push_back(q);
      }
      for (const auto& [a, b] : o.pairs) {
        if (a == 0) o.meets_untwisted = true;
        else if (sector(a).rho <= 0) o.positive_weights = false;
      }
      out.push_back(o);
    }
  return out;
}

OrbifoldResult Orbifold::general_orbifold(const QQ& order, bool require_anomaly_free) {
  const FiniteGroup& G = group();
  if (require_anomaly_free && anomaly().verdict == Verdict::Anomalous)
    throw AnomalousOrbifold("the cohomological twist is non-trivial: " + anomaly().str());
  OrbifoldResult res;
  res.direct = QSeries::zero_to(order);
  for (const auto& cl : G.classes) {
    const std::size_t k = cl.front();
    const SectorAction& A = action(k);
    if (!A.linear) throw ProjectiveObstruction("centralizer action of " + G.names[k] + " is not linearizable");
    QSeries s = QSeries::zero_to(order);
    for (std::size_t h : A.centralizer) s += twining(k, h, order);
    res.direct += s.scaled(Cyclotomic(qq(1, static_cast<long>(A.centralizer.size()))));
  }
  res.character = res.direct;
  // T(k,h) for non-representatives through conjugation to the class representative
  auto value = [&](std::size_t k, std::size_t h) -> QSeries {
    std::size_t rep = G.classes[G.class_of[k]].front();
    for (std::size_t g = 0; g < G.size(); ++g)
      if (G.conjugate(k, g) == rep) return twining(rep, G.conjugate(h, g), order);
    throw InternalInconsistency("class representative not reached");
  };
  for (auto& o : sl2z_orbits()) {
    if (!o.meets_untwisted && o.positive_weights) {
      QSeries s = QSeries::zero_to(order);
      for (const auto& [k, h] : o.pairs) s += value(k, h);
      o.contribution = s.scaled(Cyclotomic(qq(1, static_cast<long>(G.size()))));
      res.character -= o.contribution;
    }
    res.orbits.push_back(o);
  }
  return res;
}

std::string OrbifoldResult::summary() const { return character.summary(); }

std::vector<ModuleChar> Orbifold::module_characters(const QQ& order) {
  const FiniteGroup& G = group();
  std::vector<ModuleChar> out;
  for (const auto& cl : G.classes) {
    const std::size_t k = cl.front();
    const SectorAction& A = action(k);
    const long N = G.orders[k];
    const QQ csize = qq(1, static_cast<long>(A.centralizer.size()));
    const auto sub = G.cyclic_subgroup(k);
    std::set<std::size_t> cyc(sub.begin(), sub.end());
    struct Row {
      std::string label;
      long degree;
      std::map<std::size_t, Cyclotomic> chi;
    };
    std::vector<Row> rows;
    if (A.centralizer.size() == cyc.size() && k != 0) {
      const QQ rho = sector(k).rho;
      for (long label = 0; label < N; ++label) {
        Row r{std::to_string(label), 1, {}};
        for (long j = 0; j < N; ++j) r.chi[G.power(k, j)] = Cyclotomic::exp2pi(frac((rho - qq(label, N)) * j));
        rows.push_back(r);
      }
    } else if (A.linear) {
      CharacterTable t;
      bool abelian = true;
      for (std::size_t a : A.centralizer)
        for (std::size_t b : A.centralizer)
          if (!G.commute(a, b)) abelian = false;
      if (abelian) {
        t = abelian_characters(G, A.centralizer);
      } else if (A.centralizer.size() == G.size() && lifted().spec.kind == GroupKind::Semidirect) {
        const auto& s = lifted().spec;
        t = semidirect_characters(G, G.generators[1], G.generators[0], s.q, s.p, s.phi);
      } else {
        throw Unsupported("character table of a non-abelian centralizer of " + G.names[k]);
      }
      for (std::size_t i = 0; i < t.chi.size(); ++i) {
        Row r{t.labels[i], t.degree[i], {}};
        for (std::size_t j = 0; j < t.elements.size(); ++j) r.chi[t.elements[j]] = t.chi[i][j];
        rows.push_back(r);
      }
    } else {
      throw Unsupported("projective characters of the non-cyclic centralizer of " + G.names[k]);
    }
    for (const auto& r : rows) {
      ModuleChar m{k, G.names[k] + "," + r.label, r.degree, QSeries::zero_to(order), {}};
      for (std::size_t h : A.centralizer) {
        Cyclotomic w = r.chi.at(h).conj().scaled(csize);
        m.weights[h] = w;
        m.series += twining(k, h, order).scaled(w);
      }
      out.push_back(m);
    }
  }
  return out;
}

namespace {

using cd = std::complex<double>;

std::vector<std::vector<cd>> solve_least_squares(const std::vector<std::vector<cd>>& F, const std::vector<std::vector<cd>>& Y) {
  const std::size_t n = F[0].size(), m = Y[0].size();
  std::vector<std::vector<cd>> A(n, std::vector<cd>(n)), B(n, std::vector<cd>(m));
  for (std::size_t s = 0; s < F.size(); ++s)
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) A[i][j] += std::conj(F[s][i]) * F[s][j];
      for (std::size_t j = 0; j < m; ++j) B[i][j] += std::conj(F[s][i]) * Y[s][j];
    }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(A[i][c]) > std::abs(A[p][c])) p = i;
    std::swap(A[c], A[p]);
    std::swap(B[c], B[p]);
    if (std::abs(A[c][c]) < 1e-300) throw InternalInconsistency("characters are linearly dependent on the sample arc");
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      cd f = A[i][c] / A[c][c];
      for (std::size_t j = c; j < n; ++j) A[i][j] -= f * A[c][j];
      for (std::size_t j = 0; j < m; ++j) B[i][j] -= f * B[c][j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) B[i][j] /= A[i][i];
  return B;
}

}  // namespace

ModularData Orbifold::st_matrices(const QQ& order) {
  const FiniteGroup& G = group();
  std::vector<ModuleChar> mods = module_characters(order);
  ModularData md;
  const std::size_t M = mods.size();
  for (const auto& m : mods) md.labels.push_back(m.label);
  const Cyclotomic central = Cyclotomic::exp2pi(frac(-c24(L_)));
  md.T = CMat(M, M);
  bool linear = true;
  for (const auto& cl : G.classes) linear = linear && action(cl.front()).linear;
  std::vector<std::map<std::size_t, Cyclotomic>> chi(M);
  for (std::size_t i = 0; i < M; ++i) {
    // recover chi(h) = conj(weight) |C|
    const QQ csize(static_cast<long>(mods[i].weights.size()));
    for (const auto& [h, w] : mods[i].weights) chi[i][h] = w.conj().scaled(csize);
    const std::size_t a = mods[i].class_rep;
    if (linear) {
      md.T(i, i) = central * chi[i].at(a).scaled(qq(1, mods[i].degree));
    } else {
      auto lead = mods[i].series.leading_exponent();
      md.T(i, i) = Cyclotomic::exp2pi(frac(lead ? *lead : QQ(0)));
    }
  }
  if (linear) {
    md.exact = true;
    md.S = CMat(M, M);
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = 0; j < M; ++j) {
        const std::size_t a = mods[i].class_rep, b = mods[j].class_rep;
        const long ca = mods[i].weights.size(), cb = mods[j].weights.size();
        Cyclotomic s;
        for (std::size_t g = 0; g < G.size(); ++g) {
          std::size_t gb = G.conjugate(b, g);
          if (!G.commute(a, gb)) continue;
          std::size_t ga = G.conjugate(a, G.inv[g]);
          s += chi[i].at(gb).conj() * chi[j].at(ga).conj();
        }
        md.S(i, j) = s.scaled(qq(1, ca * cb));
      }
    CMat Sd(M, M);
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = 0; j < M; ++j) Sd(i, j) = md.S(j, i).conj();
    CMat P = md.S * Sd;
    md.unitarity_defect = P == CMat::identity(M) ? 0.0 : 1.0;
    return md;
  }
  md.exact = false;
  std::vector<std::vector<cd>> F, Y;
  for (int s = 0; s < 49; ++s) {
    double r = 0.85 + 0.05 * (s / 7), th = (60.0 + 10.0 * (s % 7)) * M_PI / 180.0;
    cd tau = std::polar(r, th);
    cd stau = -1.0 / tau;
    std::vector<cd> f(M), y(M);
    for (std::size_t i = 0; i < M; ++i) {
      f[i] = eval_at_tau(mods[i].series, tau, 1e-6).value;
      y[i] = eval_at_tau(mods[i].series, stau, 1e-6).value;
    }
    F.push_back(f);
    Y.push_back(y);
  }
  auto X = solve_least_squares(F, Y);
  md.S_numeric.assign(M, std::vector<cd>(M));
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j) md.S_numeric[i][j] = X[j][i];
  double defect = 0;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j) {
      cd p = 0;
      for (std::size_t l = 0; l < M; ++l) p += md.S_numeric[i][l] * std::conj(md.S_numeric[j][l]);
      defect = std::max(defect, std::abs(p - cd(i == j ? 1.0 : 0.0)));
    }
  md.unitarity_defect = defect;
  return md;
}

LiftedGroup cyclic_lifted(const Lift& g, const std::string& name) {
  LiftedGroup LG;
  LG.spec.kind = GroupKind::Cyclic;
  LG.spec.generators = {name};
  LG.spec.text = "cyclic:" + name;
  LG.gen_lifts = {g};
  LG.group = generate_group({{name, g}});
  return LG;
}

QSeries cyclic_orbifold_char(const GramLattice& L, const Lift& g, const QQ& order, const CharacterCache* cache) {
  if (is_identity(g)) return untwisted_twining(L, g, order);
  long r = type_of(L, g);
  if (r != 0) throw AnomalousOrbifold("cyclic orbifold has type " + std::to_string(r));
  Orbifold orb(L, cyclic_lifted(g), cache);
  return orb.general_orbifold(order).character;
}

long effcyc_r(long q, long p, long phi) {
  for (long r = 1; r <= p; ++r) {
    if (p % r) continue;
    long v = 1;
    for (long i = 0; i < r; ++i) v = (v * phi) % q;
    if (((v - 1) % q + q) % q == 0) return r;
  }
  throw ValidationError("phi^p is not 1 mod q");
}

QSeries effcyc_orbifold_char(const GramLattice& L, const Lift& a, const Lift& A, long q, long p, long phi, const QQ& order,
                             const CharacterCache* cache) {
  if (std::gcd(q, p) != 1)
    throw ValidationError("effectively cyclic formula needs gcd(q, p) = 1");
  const long r = effcyc_r(q, p, phi);
  Lift Ar = lift_power(A, r);
  QSeries x1 = cyclic_orbifold_char(L, A, order, cache);
  QSeries x2 = cyclic_orbifold_char(L, Ar, order, cache);
  QSeries x3 = cyclic_orbifold_char(L, lift_compose(a, Ar), order, cache);
  return (x1 - (x2 - x3).scaled(Cyclotomic(qq(1, r)))).truncated(order);
}

std::string BoundsReport::str() const {
  std::ostringstream os;
  os << "d = " << d << ": level-2 invariant dim " << level2 << " (bound " << bound2 << "), level-3 invariant dim " << level3
     << " (bound " << bound3 << ")";
  if (observed) {
    os << "; observed " << *observed << (excluded ? " < " : " >= ") << bound2;
    if (excluded) os << ": not a cyclic orbifold of a lattice VOA";
  }
  return os.str();
}

BoundsReport abelian_lower_bounds(const std::vector<long>& exponents, long n, std::optional<long> observed) {
  if (n <= 0) throw ValidationError("eigenvalue order must be positive");
  std::vector<long> c;
  for (long e : exponents) c.push_back(((e % n) + n) % n);
  std::multiset<long> all(c.begin(), c.end()), neg;
  for (long e : c) neg.insert((n - e) % n);
  if (all != neg) throw ValidationError("eigenvalue data is not closed under complex conjugation");
  BoundsReport r;
  r.d = static_cast<long>(c.size());
  const long d = r.d;
  long zeros = 0;
  for (long e : c) zeros += e == 0;
  long pairs_unordered = 0, pairs_ordered = 0, triples = 0;
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) {
      bool z = (c[i] + c[j]) % n == 0;
      pairs_ordered += z;
      if (j >= i) pairs_unordered += z;
    }
  for (long i = 0; i < d; ++i)
    for (long j = i; j < d; ++j)
      for (long k = j; k < d; ++k) triples += (c[i] + c[j] + c[k]) % n == 0;
  r.level2 = zeros + pairs_unordered;
  r.level3 = zeros + pairs_ordered + triples;
  r.bound2 = d / 2;
  r.bound3 = d;
  if (r.level2 < r.bound2 || r.level3 < r.bound3) throw InternalInconsistency("invariant counts fall below the lemma's bound");
  r.observed = observed;
  if (observed) r.excluded = *observed < r.bound2;
  return r;
}

std::vector<long> primitive_exponents(long d, long n) {
  if (d % 2) throw ValidationError("fixed-point-free orthogonal data needs even d");
  std::vector<long> units;
  for (long c = 1; 2 * c < n; ++c)
    if (std::gcd(c, n) == 1) units.push_back(c);
  if (units.empty()) throw ValidationError("no primitive eigenvalue pairs for n = " + std::to_string(n));
  std::vector<long> e;
  for (long i = 0; i < d / 2; ++i) {
    long c = units[i % units.size()];
    e.push_back(c);
    e.push_back(n - c);
  }
  return e;
}

}  // namespace lvorb
