#pragma once
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lvorb/cyclotomic.hpp"

namespace lvorb {

// Puiseux series sum c_r q^r with exact rational exponents. A truncated
// series is complete for every exponent <= order(); an exact one is a
// finite sum.
class QSeries {
 public:
  QSeries() = default;
  static QSeries constant(const Cyclotomic& c);
  static QSeries monomial(const QQ& e, const Cyclotomic& c);
  static QSeries zero_to(const QQ& order);

  bool exact() const { return !order_.has_value(); }
  const std::optional<QQ>& order() const { return order_; }
  QSeries truncated(const QQ& order) const;

  const std::map<QQ, Cyclotomic>& terms() const { return terms_; }
  Cyclotomic coeff(const QQ& e) const;
  void add_term(const QQ& e, const Cyclotomic& c);
  std::optional<QQ> leading_exponent() const;
  bool is_zero() const { return terms_.empty(); }
  // lcm of exponent denominators
  long denominator() const;

  QSeries operator+(const QSeries& b) const;
  QSeries operator-(const QSeries& b) const;
  QSeries operator*(const QSeries& b) const;
  QSeries operator-() const { return scaled(Cyclotomic(-1)); }
  QSeries& operator+=(const QSeries& b) { return *this = *this + b; }
  QSeries& operator-=(const QSeries& b) { return *this = *this - b; }
  QSeries& operator*=(const QSeries& b) { return *this = *this * b; }
  QSeries scaled(const Cyclotomic& c) const;
  // multiply by q^r
  QSeries shifted(const QQ& r) const;
  QSeries inverse() const;
  QSeries operator/(const QSeries& b) const { return *this * b.inverse(); }
  QSeries pow(long k) const;

  // coefficientwise equality up to the common truncation
  bool equals_to(const QSeries& b, const QQ& order) const;
  bool operator==(const QSeries& b) const { return order_ == b.order_ && terms_ == b.terms_; }

  std::string str() const;
  // polar part and constant term followed by O(q), e.g. "q^-2 + 120 + O(q)"
  std::string summary() const;
  std::string serialize() const;
  static QSeries deserialize(const std::string& text);

 private:
  std::map<QQ, Cyclotomic> terms_;
  std::optional<QQ> order_;
  void prune();
};

using EtaQuotient = std::vector<std::pair<QQ, long>>;  // (scale t, exponent e) for eta(t tau)^e

QSeries eta_expand(const EtaQuotient& e, const QQ& order);

// prod_{k>=0} (1 - zeta q^{start+k*step})^{exponent}, start > 0
struct ProductFactor {
  Cyclotomic zeta;
  QQ start;
  long exponent;
  QQ step = 1;
};
QSeries product_expand(const std::vector<ProductFactor>& factors, const QQ& order);

using PhaseFunction = std::function<Cyclotomic(const std::vector<long>&)>;
struct ThetaSpec {
  ZMat gram;
  QVec shift;           // empty means zero
  PhaseFunction phase;  // empty means trivial
};
QSeries theta_expand(const ThetaSpec& t, const QQ& order);

// formal tau -> tau + shift
QSeries t_transform(const QSeries& s, long shift);

struct NumericValue {
  std::complex<double> value;
  double tail_bound;
};
// Partial sum at tau with a geometric estimate of the dropped tail; throws
// InsufficientTruncation when the estimate exceeds rel_tol * |value|.
NumericValue eval_at_tau(const QSeries& s, std::complex<double> tau, double rel_tol = 1e-8);

}  // namespace lvorb
