#include "lvorb/lattice.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "lvorb/cyclotomic.hpp"
#include "lvorb/errors.hpp"

namespace lvorb {

GramLattice GramLattice::from_gram(const ZMat& g) {
  if (g.rows() != g.cols()) throw ValidationError("Gram matrix is not square");
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (g(i, j) != g(j, i))
        throw ValidationError("Gram matrix is not symmetric at row " + std::to_string(i + 1) + ", column " +
                              std::to_string(j + 1));
  GramLattice L;
  L.gram = g;
  L.even = true;
  for (std::size_t i = 0; i < g.rows(); ++i)
    if (g(i, i) % 2 != 0) L.even = false;
  ZZ det = determinant(g);
  L.unimodular = abs(det) == 1;
  return L;
}

SmithDecomposition smith_normal_form(const ZMat& a0) {
  const std::size_t m = a0.rows(), n = a0.cols();
  ZMat A = a0;
  ZMat P = ZMat::identity(m), Q = ZMat::identity(n);
  std::size_t t = 0;
  while (t < std::min(m, n)) {
    std::size_t bi = m, bj = n;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (A(i, j) != 0 && (bi == m || abs(A(i, j)) < abs(A(bi, bj)))) {
          bi = i;
          bj = j;
        }
    if (bi == m) break;
    A.swap_rows(t, bi);
    P.swap_rows(t, bi);
    A.swap_cols(t, bj);
    Q.swap_cols(t, bj);
    bool clean = true;
    const ZZ piv = A(t, t);
    for (std::size_t i = t + 1; i < m; ++i) {
      if (A(i, t) == 0) continue;
      ZZ q;
      mpz_fdiv_q(q.get_mpz_t(), A(i, t).get_mpz_t(), piv.get_mpz_t());
      if (q != 0) {
        for (std::size_t j = t; j < n; ++j) A(i, j) -= q * A(t, j);
        for (std::size_t j = 0; j < m; ++j) P(i, j) -= q * P(t, j);
      }
      if (A(i, t) != 0) clean = false;
    }
    for (std::size_t j = t + 1; j < n; ++j) {
      if (A(t, j) == 0) continue;
      ZZ q;
      mpz_fdiv_q(q.get_mpz_t(), A(t, j).get_mpz_t(), piv.get_mpz_t());
      if (q != 0) {
        for (std::size_t i = t; i < m; ++i) A(i, j) -= q * A(i, t);
        for (std::size_t i = 0; i < n; ++i) Q(i, j) -= q * Q(i, t);
      }
      if (A(t, j) != 0) clean = false;
    }
    if (!clean) continue;
    std::size_t bad = m;
    for (std::size_t i = t + 1; i < m && bad == m; ++i)
      for (std::size_t j = t + 1; j < n; ++j)
        if (A(i, j) % piv != 0) {
          bad = i;
          break;
        }
    if (bad != m) {
      for (std::size_t j = t; j < n; ++j) A(t, j) += A(bad, j);
      for (std::size_t j = 0; j < m; ++j) P(t, j) += P(bad, j);
      continue;
    }
    if (A(t, t) < 0) {
      for (std::size_t j = t; j < n; ++j) A(t, j) = -A(t, j);
      for (std::size_t j = 0; j < m; ++j) P(t, j) = -P(t, j);
    }
    ++t;
  }
  SmithDecomposition d;
  d.P = P;
  d.S = A;
  d.Q = Q;
  for (std::size_t i = 0; i < std::min(m, n); ++i)
    if (A(i, i) != 0) d.divisors.push_back(A(i, i));
  d.nullity = n - d.divisors.size();
  return d;
}

bool is_automorphism(const GramLattice& L, const ZMat& g) {
  if (g.rows() != L.rank() || g.cols() != L.rank()) return false;
  return g * L.gram * g.transpose() == L.gram;
}

void require_automorphism(const GramLattice& L, const ZMat& g, const std::string& name) {
  if (g.rows() != L.rank() || g.cols() != L.rank())
    throw NotAnAutomorphism(name + " has the wrong size for a rank " + std::to_string(L.rank()) + " lattice");
  ZMat lhs = g * L.gram * g.transpose();
  for (std::size_t i = 0; i < lhs.rows(); ++i)
    for (std::size_t j = 0; j < lhs.cols(); ++j)
      if (lhs(i, j) != L.gram(i, j))
        throw NotAnAutomorphism(name + " G " + name + "^T != G at row " + std::to_string(i + 1));
}

long matrix_order(const ZMat& g, long limit) {
  const ZMat id = ZMat::identity(g.rows());
  ZMat p = g;
  for (long k = 1; k <= limit; ++k) {
    if (p == id) return k;
    p = p * g;
  }
  throw ValidationError("matrix order exceeds " + std::to_string(limit));
}

std::string CycleType::str() const {
  std::ostringstream os;
  bool first = true;
  for (auto [t, e] : b) {
    if (!first) os << " ";
    os << t;
    if (e != 1) os << "^" << e;
    first = false;
  }
  return first ? "1^0" : os.str();
}

QQ AutomorphismData::rho() const {
  QQ r = 0;
  const long n = order;
  for (long j = 0; j < n; ++j)
    if (eigen_dims[j]) r += qq(j * (n - j) * eigen_dims[j], 4 * n * n);
  r.canonicalize();
  return r;
}

namespace {

long mobius(long n) {
  long r = 1;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    r = -r;
  }
  if (n > 1) r = -r;
  return r;
}

ZZ trace(const ZMat& m) {
  ZZ t = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

long as_dimension(const Cyclotomic& c) {
  if (!c.is_rational()) throw InternalInconsistency("eigenspace trace is not rational");
  QQ q = c.rational();
  if (q.get_den() != 1 || q < 0) throw InternalInconsistency("eigenspace dimension is not a non-negative integer");
  return q.get_num().get_si();
}

}  // namespace

AutomorphismData analyze_automorphism(const GramLattice& L, const ZMat& g) {
  require_automorphism(L, g);
  const std::size_t d = L.rank();
  AutomorphismData A;
  A.order = matrix_order(g);
  const long n = A.order;

  std::vector<ZZ> traces(n);
  ZMat p = ZMat::identity(d);
  QMat proj(d, d);
  for (long a = 0; a < n; ++a) {
    traces[a] = trace(p);
    proj = proj + to_q(p);
    p = p * g;
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) proj(i, j) /= n;
  A.projector = proj;

  A.eigen_dims.assign(n, 0);
  for (long j = 0; j < n; ++j) {
    Cyclotomic s;
    for (long a = 0; a < n; ++a) s += Cyclotomic::root_of_unity(-j * a, n).scaled(QQ(traces[a]));
    A.eigen_dims[j] = as_dimension(s.scaled(qq(1, n)));
  }
  // multiplicity of primitive m-th roots, then Moebius inversion over x^t - 1 factors
  std::map<long, long> prim;
  for (long m = 1; m <= n; ++m)
    if (n % m == 0) prim[m] = A.eigen_dims[(n / m) % n];
  for (long t = 1; t <= n; ++t) {
    if (n % t) continue;
    long bt = 0;
    for (long m = t; m <= n; m += t)
      if (n % m == 0) bt += mobius(m / t) * prim[m];
    if (bt) A.cycle_type.b[t] = bt;
  }

  ZMat one_minus = ZMat::identity(d) - g;
  A.snf = smith_normal_form(one_minus);
  const std::size_t k = A.snf.rank();
  A.divisors = A.snf.divisors;
  ZMat qinv = inverse_unimodular(A.snf.Q);
  A.fixed_basis = ZMat(d - k, d);
  A.complement = ZMat(d - k, d);
  A.coinvariant_basis = ZMat(k, d);
  A.preimages = ZMat(k, d);
  for (std::size_t i = 0; i < d; ++i) {
    if (i < k) {
      A.coinvariant_basis.set_row(i, qinv.row(i));
      A.preimages.set_row(i, A.snf.P.row(i));
    } else {
      A.fixed_basis.set_row(i - k, A.snf.P.row(i));
      A.complement.set_row(i - k, qinv.row(i));
    }
  }
  return A;
}

ZZ QuotientPresentation::defect_dimension() const {
  ZZ r;
  mpz_sqrt(r.get_mpz_t(), cardinality.get_mpz_t());
  if (r * r != cardinality) throw NonSquareQuotient("|N| = " + cardinality.get_str() + " is not a perfect square");
  return r;
}

QuotientPresentation torsion_quotient(const GramLattice& L, const ZMat& g) {
  require_automorphism(L, g);
  const std::size_t d = L.rank();
  SmithDecomposition s = smith_normal_form(ZMat::identity(d) - g);
  ZMat qinv = inverse_unimodular(s.Q);
  QuotientPresentation N;
  for (std::size_t i = 0; i < s.rank(); ++i) {
    if (s.divisors[i] == 1) continue;
    N.generators.push_back(qinv.row(i));
    N.orders.push_back(s.divisors[i]);
    N.preimages.push_back(s.P.row(i));
    N.cardinality *= s.divisors[i];
  }
  return N;
}

namespace {

struct Enumerator {
  std::size_t d;
  std::vector<double> D;                // pivots of the reversed LDL
  std::vector<std::vector<double>> Lt;  // Lt[i][j] for j > i
  std::vector<double> s;                // reversed shift
  const NormVisitor* f;
  const ZMat* gram;
  const QVec* shift;
  bool zero_shift;
  QQ bound2;
  std::vector<long> y;  // reversed coordinates
  std::vector<long> out;

  void visit() {
    for (std::size_t i = 0; i < d; ++i) out[i] = y[d - 1 - i];
    QQ nrm;
    if (zero_shift) {
      ZZ acc = 0;
      for (std::size_t i = 0; i < d; ++i) {
        if (!out[i]) continue;
        ZZ row = 0;
        for (std::size_t j = 0; j < d; ++j)
          if (out[j]) row += (*gram)(i, j) * out[j];
        acc += row * out[i];
      }
      nrm = QQ(acc);
    } else {
      QVec v(d);
      for (std::size_t i = 0; i < d; ++i) v[i] = QQ(out[i]) + (*shift)[i];
      nrm = bilinear(v, to_q(*gram), v);
    }
    if (nrm <= bound2) {
      QQ half = nrm / 2;
      half.canonicalize();
      (*f)(out, half);
    }
  }

  void rec(std::ptrdiff_t i, double budget) {
    if (i < 0) {
      visit();
      return;
    }
    double c = 0;
    for (std::size_t j = i + 1; j < d; ++j) c -= Lt[i][j] * (static_cast<double>(y[j]) + s[j]);
    double r = budget > 0 ? std::sqrt(budget / D[i]) : 0.0;
    double margin = 1e-7 * (1.0 + std::fabs(c) + r);
    long lo = static_cast<long>(std::ceil(c - s[i] - r - margin));
    long hi = static_cast<long>(std::floor(c - s[i] + r + margin));
    for (long x = lo; x <= hi; ++x) {
      y[i] = x;
      double t = static_cast<double>(x) + s[i] - c;
      double rem = budget - D[i] * t * t;
      if (rem < -1e-6 * (1.0 + budget)) continue;
      rec(i - 1, std::max(rem, 0.0));
    }
  }
};

}  // namespace

void enumerate_by_norm(const ZMat& gram, const QQ& bound, const QVec& shift, const NormVisitor& f) {
  const std::size_t d = gram.rows();
  if (bound < 0) return;
  QQ bound2 = 2 * bound;
  if (d == 0) {
    f({}, QQ(0));
    return;
  }
  // LDL^T of the index-reversed Gram matrix, exact
  QMat R(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) R(a, b) = QQ(gram(d - 1 - a, d - 1 - b));
  QMat Lm = QMat::identity(d);
  std::vector<QQ> D(d);
  for (std::size_t j = 0; j < d; ++j) {
    QQ s = R(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= Lm(j, k) * Lm(j, k) * D[k];
    if (s <= 0) throw NotPositiveDefinite("Gram matrix is not positive definite");
    D[j] = s;
    for (std::size_t i = j + 1; i < d; ++i) {
      QQ t = R(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= Lm(i, k) * Lm(j, k) * D[k];
      Lm(i, j) = t / D[j];
    }
  }
  // q(y) = sum_i D_i (y_i + sum_{j>i} Lm(j,i) y_j)^2 with y reversed
  Enumerator e;
  e.d = d;
  e.D.resize(d);
  e.Lt.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    e.D[i] = D[i].get_d();
    for (std::size_t j = i + 1; j < d; ++j) e.Lt[i][j] = Lm(j, i).get_d();
  }
  e.s.assign(d, 0.0);
  e.zero_shift = true;
  QVec sh = shift.empty() ? QVec(d, QQ(0)) : shift;
  for (std::size_t i = 0; i < d; ++i) {
    e.s[i] = sh[d - 1 - i].get_d();
    if (sh[d - 1 - i] != 0) e.zero_shift = false;
  }
  e.f = &f;
  e.gram = &gram;
  e.shift = &sh;
  e.bound2 = bound2;
  e.y.assign(d, 0);
  e.out.assign(d, 0);
  // reversed index d-1 is original coordinate 0, so it is the outermost loop
  e.rec(static_cast<std::ptrdiff_t>(d) - 1, bound2.get_d() * (1 + 1e-12) + 1e-9);
}

void enumerate_by_norm(const ZMat& gram, const QQ& bound, const NormVisitor& f) {
  enumerate_by_norm(gram, bound, QVec{}, f);
}

std::vector<std::vector<long>> vectors_by_norm(const ZMat& gram, const QQ& bound) {
  std::vector<std::vector<long>> out;
  enumerate_by_norm(gram, bound, [&](const std::vector<long>& v, const QQ&) { out.push_back(v); });
  return out;
}

std::map<std::pair<long, long>, long> joint_eigenspace_dims(const ZMat& g, const ZMat& h) {
  if (g * h != h * g) throw NotCommuting("g and h do not commute");
  const long n = matrix_order(g), m = matrix_order(h);
  std::vector<std::vector<ZZ>> tr(n, std::vector<ZZ>(m));
  ZMat ga = ZMat::identity(g.rows());
  for (long a = 0; a < n; ++a) {
    ZMat gh = ga;
    for (long b = 0; b < m; ++b) {
      tr[a][b] = trace(gh);
      gh = gh * h;
    }
    ga = ga * g;
  }
  const long M = lcm_long(n, m);
  std::map<std::pair<long, long>, long> out;
  long total = 0;
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < m; ++j) {
      Cyclotomic s;
      for (long a = 0; a < n; ++a)
        for (long b = 0; b < m; ++b) {
          if (tr[a][b] == 0) continue;
          long e = -(i * a * (M / n) + j * b * (M / m));
          s += Cyclotomic::root_of_unity(e, M).scaled(QQ(tr[a][b]));
        }
      long dim = as_dimension(s.scaled(qq(1, n * m)));
      if (dim) out[{i, j}] = dim;
      total += dim;
    }
  if (total != static_cast<long>(g.rows())) throw InternalInconsistency("joint eigenspace dims do not sum to the rank");
  return out;
}

ZMat integer_left_kernel(const QMat& m) {
  ZZ den = 1;
  for (const auto& x : m.data()) den = lcm(den, ZZ(x.get_den()));
  ZMat a(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      QQ v = m(i, j) * den;
      a(i, j) = v.get_num();
    }
  SmithDecomposition s = smith_normal_form(a);
  const std::size_t k = s.rank();
  ZMat out(m.rows() - k, m.rows());
  for (std::size_t i = k; i < m.rows(); ++i) out.set_row(i - k, s.P.row(i));
  return out;
}

ZVec coordinates_in(const ZVec& v, const ZMat& basis_inverse) { return vecmat(v, basis_inverse); }

}  // namespace lvorb
