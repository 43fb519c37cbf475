#pragma once
#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <vector>

namespace lvorb {

using ZZ = mpz_class;
using QQ = mpq_class;
using ZVec = std::vector<ZZ>;
using QVec = std::vector<QQ>;

template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t r, std::size_t c) : r_(r), c_(c), a_(r * c, T(0)) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static Mat from_rows(const std::vector<std::vector<T>>& rows) {
    Mat m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < m.r_; ++i)
      for (std::size_t j = 0; j < m.c_; ++j) m(i, j) = rows[i][j];
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  T& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(a_.begin() + i * c_, a_.begin() + (i + 1) * c_);
  }
  void set_row(std::size_t i, const std::vector<T>& v) {
    for (std::size_t j = 0; j < c_; ++j) (*this)(i, j) = v[j];
  }
  void swap_rows(std::size_t i, std::size_t k) {
    if (i == k) return;
    for (std::size_t j = 0; j < c_; ++j) std::swap((*this)(i, j), (*this)(k, j));
  }
  void swap_cols(std::size_t i, std::size_t k) {
    if (i == k) return;
    for (std::size_t j = 0; j < r_; ++j) std::swap((*this)(j, i), (*this)(j, k));
  }

  Mat transpose() const {
    Mat t(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Mat operator*(const Mat& b) const {
    Mat m(r_, b.c_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t k = 0; k < c_; ++k) {
        const T& x = (*this)(i, k);
        if (x == 0) continue;
        for (std::size_t j = 0; j < b.c_; ++j) m(i, j) += x * b(k, j);
      }
    return m;
  }
  Mat operator+(const Mat& b) const {
    Mat m = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] += b.a_[i];
    return m;
  }
  Mat operator-(const Mat& b) const {
    Mat m = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] -= b.a_[i];
    return m;
  }
  Mat operator-() const {
    Mat m = *this;
    for (auto& x : m.a_) x = -x;
    return m;
  }
  bool operator==(const Mat& b) const { return r_ == b.r_ && c_ == b.c_ && a_ == b.a_; }
  bool operator!=(const Mat& b) const { return !(*this == b); }

  bool is_zero() const {
    for (const auto& x : a_)
      if (x != 0) return false;
    return true;
  }

  const std::vector<T>& data() const { return a_; }

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<T> a_;
};

using ZMat = Mat<ZZ>;
using QMat = Mat<QQ>;

// row vector times matrix
template <class T>
std::vector<T> vecmat(const std::vector<T>& v, const Mat<T>& m) {
  std::vector<T> out(m.cols(), T(0));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (v[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += v[i] * m(i, j);
  }
  return out;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  T s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// <a|b> = a G b^T
template <class T>
T bilinear(const std::vector<T>& a, const Mat<T>& g, const std::vector<T>& b) {
  return dot(vecmat(a, g), b);
}

inline QMat to_q(const ZMat& m) {
  QMat q(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) q(i, j) = QQ(m(i, j));
  return q;
}
inline QVec to_q(const ZVec& v) { return QVec(v.begin(), v.end()); }

ZMat matpow(const ZMat& m, long k);  // k >= 0
ZZ determinant(const ZMat& m);
QQ determinant(const QMat& m);
QMat inverse(const QMat& m);
// exact inverse of a unimodular integer matrix
ZMat inverse_unimodular(const ZMat& m);
std::size_t rank(const QMat& m);

std::string to_string(const ZMat& m);
std::string to_string(const ZVec& v);

// canonical n/d
inline QQ qq(long n, long d = 1) {
  QQ r(n, d);
  r.canonicalize();
  return r;
}

// Representative of x modulo 1 in [0, 1).
QQ frac(const QQ& x);

}  // namespace lvorb
