#include "lvorb/matrix.hpp"

#include <sstream>

#include "lvorb/errors.hpp"

namespace lvorb {

ZMat matpow(const ZMat& m, long k) {
  ZMat result = ZMat::identity(m.rows());
  ZMat base = m;
  while (k > 0) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

QQ determinant(const QMat& m0) {
  QMat m = m0;
  const std::size_t n = m.rows();
  QQ det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      m.swap_rows(p, c);
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m(r, c) == 0) continue;
      QQ f = m(r, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return det;
}

ZZ determinant(const ZMat& m) {
  QQ d = determinant(to_q(m));
  return d.get_num();
}

QMat inverse(const QMat& m0) {
  const std::size_t n = m0.rows();
  QMat m = m0;
  QMat inv = QMat::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) throw DivisionByZero("singular matrix");
    m.swap_rows(p, c);
    inv.swap_rows(p, c);
    QQ d = m(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      m(c, j) /= d;
      inv(c, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m(r, c) == 0) continue;
      QQ f = m(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        m(r, j) -= f * m(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

ZMat inverse_unimodular(const ZMat& m) {
  QMat q = inverse(to_q(m));
  ZMat z(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (q(i, j).get_den() != 1) throw ValidationError("matrix is not unimodular");
      z(i, j) = q(i, j).get_num();
    }
  return z;
}

std::size_t rank(const QMat& m0) {
  QMat m = m0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(p, r);
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      if (m(i, c) == 0) continue;
      QQ f = m(i, c) / m(r, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    ++r;
  }
  return r;
}

std::string to_string(const ZVec& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

std::string to_string(const ZMat& m) {
  std::ostringstream os;
  for (std::size_t i = 0; i < m.rows(); ++i) os << (i ? "; " : "") << to_string(m.row(i));
  return os.str();
}

QQ frac(const QQ& x) {
  ZZ fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  QQ r = x - QQ(fl);
  r.canonicalize();
  return r;
}

}  // namespace lvorb
