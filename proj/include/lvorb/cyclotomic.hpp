#pragma once
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lvorb/matrix.hpp"

namespace lvorb {

long euler_phi(long m);
// Coefficients of the m-th cyclotomic polynomial, constant term first.
const std::vector<long>& cyclotomic_polynomial(long m);

// Element of Q(xi_m), xi_m = exp(2 pi i / m), stored in the power basis
// 1, xi, ..., xi^{phi(m)-1}.
class Cyclotomic {
 public:
  Cyclotomic() : m_(1), c_(1, QQ(0)) {}
  Cyclotomic(const QQ& q) : m_(1), c_(1, q) {}  // NOLINT
  Cyclotomic(long v) : m_(1), c_(1, QQ(v)) {}   // NOLINT
  Cyclotomic(int v) : m_(1), c_(1, QQ(v)) {}    // NOLINT

  static Cyclotomic root_of_unity(long k, long m);
  // exp(2 pi i r)
  static Cyclotomic exp2pi(const QQ& r);
  static Cyclotomic from_coeffs(long m, std::vector<QQ> coeffs);

  long conductor() const { return m_; }
  const std::vector<QQ>& coeffs() const { return c_; }

  Cyclotomic embed(long m) const;

  Cyclotomic operator+(const Cyclotomic& b) const;
  Cyclotomic operator-(const Cyclotomic& b) const;
  Cyclotomic operator*(const Cyclotomic& b) const;
  Cyclotomic operator/(const Cyclotomic& b) const { return *this * b.inverse(); }
  Cyclotomic operator-() const;
  Cyclotomic& operator+=(const Cyclotomic& b) { return *this = *this + b; }
  Cyclotomic& operator-=(const Cyclotomic& b) { return *this = *this - b; }
  Cyclotomic& operator*=(const Cyclotomic& b) { return *this = *this * b; }
  Cyclotomic& operator/=(const Cyclotomic& b) { return *this = *this / b; }
  bool operator==(const Cyclotomic& b) const;
  bool operator!=(const Cyclotomic& b) const { return !(*this == b); }

  Cyclotomic inverse() const;
  Cyclotomic conj() const;
  Cyclotomic pow(long k) const;
  Cyclotomic scaled(const QQ& q) const;

  bool is_zero() const;
  bool is_rational() const;
  QQ rational() const;  // requires is_rational()
  // r in [0,1) with *this == exp(2 pi i r), if *this is a root of unity
  std::optional<QQ> root_exponent() const;

  std::complex<double> to_complex() const;
  std::string str() const;
  // compact exact form "m|c0,c1,..." used by the cache format
  std::string serialize() const;
  static Cyclotomic deserialize(const std::string& s);

 private:
  long m_;
  std::vector<QQ> c_;
  void reduce_from(std::vector<QQ> poly);
};

// The s-th root exp(2 pi i r/s) of a root of unity exp(2 pi i r), r in [0,1).
Cyclotomic principal_root(const Cyclotomic& a, long s);
// Positive square root of a positive rational, exact in a cyclotomic field.
Cyclotomic sqrt_rational(const QQ& r);

long lcm_long(long a, long b);

}  // namespace lvorb
