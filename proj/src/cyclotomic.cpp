#include "lvorb/cyclotomic.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "lvorb/errors.hpp"

namespace lvorb {

long lcm_long(long a, long b) { return a / std::gcd(a, b) * b; }

long euler_phi(long m) {
  long r = m, n = m;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    r -= r / p;
  }
  if (n > 1) r -= r / n;
  return r;
}

const std::vector<long>& cyclotomic_polynomial(long m) {
  static std::mutex mu;
  static std::map<long, std::vector<long>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
  }
  // x^m - 1 divided by Phi_d for all proper divisors d
  std::vector<long> num(m + 1, 0);
  num[0] = -1;
  num[m] = 1;
  for (long d = 1; d < m; ++d) {
    if (m % d) continue;
    const std::vector<long> den = cyclotomic_polynomial(d);
    const std::size_t dn = den.size() - 1;
    std::vector<long> q(num.size() - dn, 0);
    for (std::size_t i = num.size() - 1;; --i) {
      long c = num[i];
      q[i - dn] = c;
      if (c != 0)
        for (std::size_t j = 0; j <= dn; ++j) num[i - dn + j] -= c * den[j];
      if (i == dn) break;
    }
    num = q;
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(m, num).first->second;
}

void Cyclotomic::reduce_from(std::vector<QQ> p) {
  const std::vector<long>& f = cyclotomic_polynomial(m_);
  const std::size_t ph = f.size() - 1;
  for (std::size_t i = p.size(); i-- > ph;) {
    if (p[i] == 0) continue;
    QQ c = p[i];
    for (std::size_t j = 0; j < ph; ++j)
      if (f[j] != 0) p[i - ph + j] -= c * f[j];
    p[i] = 0;
  }
  p.resize(ph, QQ(0));
  c_ = std::move(p);
}

Cyclotomic Cyclotomic::from_coeffs(long m, std::vector<QQ> coeffs) {
  Cyclotomic z;
  z.m_ = m;
  z.reduce_from(std::move(coeffs));
  return z;
}

Cyclotomic Cyclotomic::root_of_unity(long k, long m) {
  if (m <= 0) throw ValidationError("root of unity order must be positive");
  k %= m;
  if (k < 0) k += m;
  long g = std::gcd(k, m);
  if (k == 0) return Cyclotomic(1);
  k /= g;
  m /= g;
  if (m == 2) return Cyclotomic(-1);
  std::vector<QQ> p(k + 1, QQ(0));
  p[k] = 1;
  return from_coeffs(m, std::move(p));
}

Cyclotomic Cyclotomic::exp2pi(const QQ& r) {
  QQ f = frac(r);
  return root_of_unity(f.get_num().get_si(), f.get_den().get_si());
}

Cyclotomic Cyclotomic::embed(long M) const {
  if (M == m_) return *this;
  if (M % m_ != 0) throw ConductorOverflow("cannot embed Q(xi_" + std::to_string(m_) + ") into Q(xi_" + std::to_string(M) + ")");
  long step = M / m_;
  std::vector<QQ> p((c_.size() - 1) * step + 1, QQ(0));
  for (std::size_t k = 0; k < c_.size(); ++k) p[k * step] = c_[k];
  return from_coeffs(M, std::move(p));
}

Cyclotomic Cyclotomic::operator+(const Cyclotomic& b) const {
  if (m_ == b.m_) {
    Cyclotomic z = *this;
    for (std::size_t i = 0; i < c_.size(); ++i) z.c_[i] += b.c_[i];
    return z;
  }
  if (b.m_ == 1) {
    Cyclotomic z = *this;
    z.c_[0] += b.c_[0];
    return z;
  }
  if (m_ == 1) return b + *this;
  long L = lcm_long(m_, b.m_);
  return embed(L) + b.embed(L);
}

Cyclotomic Cyclotomic::operator-() const {
  Cyclotomic z = *this;
  for (auto& x : z.c_) x = -x;
  return z;
}

Cyclotomic Cyclotomic::operator-(const Cyclotomic& b) const { return *this + (-b); }

Cyclotomic Cyclotomic::scaled(const QQ& q) const {
  Cyclotomic z = *this;
  for (auto& x : z.c_) x *= q;
  return z;
}

Cyclotomic Cyclotomic::operator*(const Cyclotomic& b) const {
  if (b.m_ == 1) return scaled(b.c_[0]);
  if (m_ == 1) return b.scaled(c_[0]);
  if (m_ != b.m_) {
    long L = lcm_long(m_, b.m_);
    return embed(L) * b.embed(L);
  }
  std::vector<QQ> p(c_.size() + b.c_.size() - 1, QQ(0));
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j)
      if (b.c_[j] != 0) p[i + j] += c_[i] * b.c_[j];
  }
  Cyclotomic z;
  z.m_ = m_;
  z.reduce_from(std::move(p));
  return z;
}

bool Cyclotomic::is_zero() const {
  for (const auto& x : c_)
    if (x != 0) return false;
  return true;
}

bool Cyclotomic::operator==(const Cyclotomic& b) const {
  if (m_ == b.m_) return c_ == b.c_;
  long L = lcm_long(m_, b.m_);
  return embed(L).c_ == b.embed(L).c_;
}

bool Cyclotomic::is_rational() const {
  for (std::size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

QQ Cyclotomic::rational() const {
  if (!is_rational()) throw InternalInconsistency("cyclotomic value is not rational: " + str());
  return c_[0];
}

namespace {

using Poly = std::vector<QQ>;

void trim(Poly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

// returns (q, r) with a = q b + r
std::pair<Poly, Poly> divmod(Poly a, const Poly& b) {
  trim(a);
  Poly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 1, QQ(0));
  const QQ lead = b.back();
  while (a.size() >= b.size() && !(a.size() == 1 && a[0] == 0)) {
    std::size_t shift = a.size() - b.size();
    QQ c = a.back() / lead;
    q[shift] = c;
    for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] -= c * b[j];
    a.pop_back();
    trim(a);
    if (a.size() < b.size()) break;
  }
  trim(q);
  return {q, a};
}

Poly sub(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), QQ(0));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  trim(r);
  return r;
}

Poly mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, QQ(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

}  // namespace

Cyclotomic Cyclotomic::inverse() const {
  if (is_zero()) throw DivisionByZero("inverse of zero cyclotomic");
  if (m_ == 1) return Cyclotomic(QQ(1) / c_[0]);
  const std::vector<long>& f = cyclotomic_polynomial(m_);
  Poly r0(f.begin(), f.end());
  Poly r1 = c_;
  trim(r1);
  Poly s0{QQ(0)}, s1{QQ(1)};
  while (r1.size() > 1) {
    auto [q, r] = divmod(r0, r1);
    r0 = r1;
    r1 = r;
    Poly s = sub(s0, mul(q, s1));
    s0 = s1;
    s1 = s;
  }
  if (r1[0] == 0) throw InternalInconsistency("non-invertible cyclotomic");
  for (auto& x : s1) x /= r1[0];
  return from_coeffs(m_, s1);
}

Cyclotomic Cyclotomic::conj() const {
  if (m_ <= 2) return *this;
  std::vector<QQ> p(m_, QQ(0));
  for (std::size_t k = 0; k < c_.size(); ++k) p[(m_ - static_cast<long>(k)) % m_] += c_[k];
  return from_coeffs(m_, std::move(p));
}

Cyclotomic Cyclotomic::pow(long k) const {
  if (k < 0) return inverse().pow(-k);
  Cyclotomic result(1), base = *this;
  while (k > 0) {
    if (k & 1) result *= base;
    k >>= 1;
    if (k) base *= base;
  }
  return result;
}

std::optional<QQ> Cyclotomic::root_exponent() const {
  if (m_ == 1) {
    if (c_[0] == 1) return QQ(0);
    if (c_[0] == -1) return QQ(1, 2);
    return std::nullopt;
  }
  if (!(*this * conj() == Cyclotomic(1))) return std::nullopt;
  long M = (m_ % 2) ? 2 * m_ : m_;
  Cyclotomic self = embed(M);
  Cyclotomic z = Cyclotomic(1).embed(M);
  Cyclotomic xi = root_of_unity(1, M).embed(M);
  for (long k = 0; k < M; ++k) {
    if (z.c_ == self.c_) {
      QQ r(k, M);
      r.canonicalize();
      return r;
    }
    z = z * xi;
  }
  return std::nullopt;
}

std::complex<double> Cyclotomic::to_complex() const {
  std::complex<double> s = 0;
  const double tau = 2.0 * M_PI / static_cast<double>(m_);
  for (std::size_t k = 0; k < c_.size(); ++k)
    if (c_[k] != 0) s += c_[k].get_d() * std::polar(1.0, tau * static_cast<double>(k));
  return s;
}

std::string Cyclotomic::str() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (c_[k] == 0) continue;
    QQ c = c_[k];
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    QQ a = abs(c);
    if (k == 0) {
      os << a;
    } else {
      if (a != 1) os << a << "*";
      os << "E(" << m_ << ")";
      if (k > 1) os << "^" << k;
    }
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

std::string Cyclotomic::serialize() const {
  std::ostringstream os;
  os << m_ << "|";
  for (std::size_t k = 0; k < c_.size(); ++k) os << (k ? "," : "") << c_[k];
  return os.str();
}

Cyclotomic Cyclotomic::deserialize(const std::string& s) {
  auto bar = s.find('|');
  if (bar == std::string::npos) throw ParseError("bad cyclotomic '" + s + "'");
  long m = std::stol(s.substr(0, bar));
  if (m <= 0) throw ParseError("bad conductor in '" + s + "'");
  std::vector<QQ> c;
  std::stringstream ss(s.substr(bar + 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    QQ q;
    if (q.set_str(tok, 10) != 0) throw ParseError("bad rational '" + tok + "'");
    q.canonicalize();
    c.push_back(q);
  }
  if (static_cast<long>(c.size()) != euler_phi(m)) throw ParseError("coefficient count mismatch in '" + s + "'");
  Cyclotomic z;
  z.m_ = m;
  z.c_ = c;
  return z;
}

Cyclotomic principal_root(const Cyclotomic& a, long s) {
  auto e = a.root_exponent();
  if (!e) throw NotARootOfUnity("principal root of non-root-of-unity " + a.str());
  return Cyclotomic::exp2pi(*e / QQ(s));
}

namespace {

Cyclotomic sqrt_prime(long p) {
  if (p == 2) return Cyclotomic::root_of_unity(1, 8) + Cyclotomic::root_of_unity(7, 8);
  Cyclotomic g;
  for (long a = 0; a < p; ++a) g += Cyclotomic::root_of_unity(a * a % p, p);
  if (p % 4 == 1) return g;
  return g * Cyclotomic::root_of_unity(3, 4);
}

Cyclotomic sqrt_integer(ZZ n) {
  Cyclotomic r(1);
  ZZ square = 1;
  for (long p = 2; ZZ(p) * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    for (int i = 0; i < e / 2; ++i) square *= p;
    if (e % 2) r *= sqrt_prime(p);
  }
  if (n > 1) {
    if (!n.fits_slong_p()) throw Unsupported("square root of large prime");
    r *= sqrt_prime(n.get_si());
  }
  return r.scaled(QQ(square));
}

}  // namespace

Cyclotomic sqrt_rational(const QQ& r) {
  if (r < 0) throw ValidationError("negative radicand");
  if (r == 0) return Cyclotomic(0);
  ZZ a = r.get_num(), b = r.get_den();
  return sqrt_integer(a * b).scaled(QQ(1) / QQ(b));
}

}  // namespace lvorb
