#include "lvorb/qseries.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "lvorb/errors.hpp"
#include "lvorb/lattice.hpp"

namespace lvorb {

namespace {

ZZ floor_q(const QQ& x) {
  ZZ f;
  mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return f;
}

std::string qstr(const QQ& r) { return r.get_str(); }

QQ parse_q(const std::string& s) {
  QQ q;
  if (q.set_str(s, 10) != 0) throw ParseError("bad rational '" + s + "'");
  q.canonicalize();
  return q;
}

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

QSeries QSeries::constant(const Cyclotomic& c) { return monomial(QQ(0), c); }

QSeries QSeries::monomial(const QQ& e, const Cyclotomic& c) {
  QSeries s;
  if (!c.is_zero()) s.terms_[e] = c;
  return s;
}

QSeries QSeries::zero_to(const QQ& order) {
  QSeries s;
  s.order_ = order;
  return s;
}

void QSeries::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second.is_zero() || (order_ && it->first > *order_))
      it = terms_.erase(it);
    else
      ++it;
  }
}

QSeries QSeries::truncated(const QQ& order) const {
  QSeries s = *this;
  if (!s.order_ || *s.order_ > order) s.order_ = order;
  s.prune();
  return s;
}

Cyclotomic QSeries::coeff(const QQ& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Cyclotomic(0) : it->second;
}

void QSeries::add_term(const QQ& e, const Cyclotomic& c) {
  if (order_ && e > *order_) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    if (!c.is_zero()) terms_.emplace(e, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

std::optional<QQ> QSeries::leading_exponent() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.begin()->first;
}

long QSeries::denominator() const {
  long d = 1;
  for (const auto& [e, c] : terms_) d = lcm_long(d, e.get_den().get_si());
  return d;
}

QSeries QSeries::operator+(const QSeries& b) const {
  QSeries s = *this;
  if (b.order_ && (!s.order_ || *b.order_ < *s.order_)) s.order_ = b.order_;
  for (const auto& [e, c] : b.terms_) {
    auto it = s.terms_.find(e);
    if (it == s.terms_.end())
      s.terms_.emplace(e, c);
    else
      it->second += c;
  }
  s.prune();
  return s;
}

QSeries QSeries::operator-(const QSeries& b) const { return *this + (-b); }

QSeries QSeries::operator*(const QSeries& b) const {
  QSeries s;
  if ((exact() && is_zero()) || (b.exact() && b.is_zero())) return s;
  auto lead = [](const QSeries& x) { return x.terms_.empty() ? *x.order_ : x.terms_.begin()->first; };
  std::optional<QQ> ord;
  if (order_) ord = *order_ + lead(b);
  if (b.order_) {
    QQ o = *b.order_ + lead(*this);
    if (!ord || o < *ord) ord = o;
  }
  s.order_ = ord;
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : b.terms_) {
      QQ e = ea + eb;
      if (ord && e > *ord) continue;
      auto it = s.terms_.find(e);
      if (it == s.terms_.end())
        s.terms_.emplace(e, ca * cb);
      else
        it->second += ca * cb;
    }
  s.prune();
  return s;
}

QSeries QSeries::scaled(const Cyclotomic& c) const {
  QSeries s;
  s.order_ = order_;
  if (c.is_zero()) return s;
  for (const auto& [e, x] : terms_) s.terms_.emplace(e, x * c);
  return s;
}

QSeries QSeries::shifted(const QQ& r) const {
  QSeries s;
  if (order_) s.order_ = *order_ + r;
  for (const auto& [e, x] : terms_) s.terms_.emplace(e + r, x);
  return s;
}

QSeries QSeries::inverse() const {
  if (terms_.empty()) throw DivisionByZero("inverse of a zero series");
  const QQ v = terms_.begin()->first;
  const Cyclotomic c0inv = terms_.begin()->second.inverse();
  if (exact()) {
    if (terms_.size() == 1) return monomial(-v, c0inv);
    throw InsufficientTruncation("inverse of an untruncated series requires a truncation order");
  }
  long D = denominator();
  D = lcm_long(D, order_->get_den().get_si());
  QQ span = (*order_ - v) * D;
  const long N = floor_q(span).get_si();
  std::vector<Cyclotomic> x(N + 1);
  for (const auto& [e, c] : terms_) {
    QQ k = (e - v) * D;
    long ki = k.get_num().get_si();
    if (ki <= N) x[ki] = c * c0inv;
  }
  std::vector<Cyclotomic> r(N + 1);
  r[0] = Cyclotomic(1);
  for (long n = 1; n <= N; ++n) {
    Cyclotomic acc;
    for (long k = 1; k <= n; ++k)
      if (!x[k].is_zero() && !r[n - k].is_zero()) acc += x[k] * r[n - k];
    r[n] = -acc;
  }
  QSeries s;
  s.order_ = *order_ - 2 * v;
  for (long n = 0; n <= N; ++n)
    if (!r[n].is_zero()) s.terms_.emplace(qq(n, D) - v, r[n] * c0inv);
  s.prune();
  return s;
}

QSeries QSeries::pow(long k) const {
  if (k < 0) return inverse().pow(-k);
  QSeries r = constant(Cyclotomic(1)), base = *this;
  while (k > 0) {
    if (k & 1) r *= base;
    k >>= 1;
    if (k) base *= base;
  }
  return r;
}

bool QSeries::equals_to(const QSeries& b, const QQ& order) const {
  if ((order_ && *order_ < order) || (b.order_ && *b.order_ < order))
    throw InsufficientTruncation("comparison beyond the known truncation");
  for (const auto& [e, c] : terms_)
    if (e <= order && b.coeff(e) != c) return false;
  for (const auto& [e, c] : b.terms_)
    if (e <= order && coeff(e) != c) return false;
  return true;
}

namespace {

std::string coeff_str(const Cyclotomic& c, bool& negative) {
  negative = false;
  if (c.is_rational()) {
    QQ r = c.rational();
    if (r < 0) {
      negative = true;
      r = -r;
    }
    return r.get_str();
  }
  return "(" + c.str() + ")";
}

std::string exp_str(const QQ& e) {
  if (e == 1) return "q";
  return "q^" + e.get_str();
}

}  // namespace

std::string QSeries::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    bool neg;
    std::string cs = coeff_str(c, neg);
    if (first)
      os << (neg ? "-" : "");
    else
      os << (neg ? " - " : " + ");
    if (e == 0)
      os << cs;
    else if (cs == "1")
      os << exp_str(e);
    else
      os << cs << "*" << exp_str(e);
    first = false;
  }
  if (order_) {
    os << (first ? "" : " + ") << "O(" << exp_str(*order_) << "+)";
  } else if (first) {
    os << "0";
  }
  return os.str();
}

std::string QSeries::summary() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (e > 0) break;
    bool neg;
    std::string cs = coeff_str(c, neg);
    if (first)
      os << (neg ? "-" : "");
    else
      os << (neg ? " - " : " + ");
    if (e == 0)
      os << cs;
    else
      os << (cs == "1" ? "" : cs) << exp_str(e);
    first = false;
  }
  if (first) os << "0";
  if (order_) os << " + O(q)";
  return os.str();
}

std::string QSeries::serialize() const {
  std::ostringstream os;
  os << "order " << (order_ ? qstr(*order_) : std::string("exact")) << "\n";
  for (const auto& [e, c] : terms_) os << qstr(e) << " : " << c.serialize() << "\n";
  return os.str();
}

QSeries QSeries::deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("order ", 0) != 0) throw ParseError("series text lacks an order line");
  QSeries s;
  std::string o = trim(line.substr(6));
  if (o != "exact") s.order_ = parse_q(o);
  std::optional<QQ> prev;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("bad series line '" + line + "'");
    QQ e = parse_q(trim(line.substr(0, colon)));
    if (prev && !(*prev < e)) throw ParseError("series exponents are not strictly increasing");
    prev = e;
    s.terms_.emplace(e, Cyclotomic::deserialize(trim(line.substr(colon + 1))));
  }
  return s;
}

QSeries product_expand(const std::vector<ProductFactor>& factors, const QQ& order) {
  long D = order.get_den().get_si();
  for (const auto& f : factors) {
    if (f.start <= 0 || f.step <= 0) throw ValidationError("product factor must start and step at positive exponents");
    D = lcm_long(D, f.start.get_den().get_si());
    D = lcm_long(D, f.step.get_den().get_si());
  }
  if (order < 0) return QSeries::zero_to(order);
  const long N = floor_q(order * D).get_si();
  std::vector<Cyclotomic> p(N + 1);
  p[0] = Cyclotomic(1);
  for (const auto& f : factors) {
    if (f.exponent == 0) continue;
    long s0 = QQ(f.start * D).get_num().get_si();
    long ds = QQ(f.step * D).get_num().get_si();
    for (long s = s0; s <= N; s += ds) {
      for (long rep = 0; rep < std::labs(f.exponent); ++rep) {
        if (f.exponent > 0) {
          for (long n = N; n >= s; --n)
            if (!p[n - s].is_zero()) p[n] -= f.zeta * p[n - s];
        } else {
          for (long n = s; n <= N; ++n)
            if (!p[n - s].is_zero()) p[n] += f.zeta * p[n - s];
        }
      }
    }
  }
  QSeries out = QSeries::zero_to(order);
  for (long n = 0; n <= N; ++n)
    if (!p[n].is_zero()) out.add_term(qq(n, D), p[n]);
  return out;
}

QSeries eta_expand(const EtaQuotient& e, const QQ& order) {
  QQ lead = 0;
  std::vector<ProductFactor> f;
  for (const auto& [t, k] : e) {
    if (t <= 0) throw ValidationError("eta scale must be positive");
    lead += t * k / 24;
    f.push_back({Cyclotomic(1), t, k, t});
  }
  lead.canonicalize();
  if (e.empty()) return QSeries::constant(Cyclotomic(1)).truncated(order);
  return product_expand(f, order - lead).shifted(lead);
}

QSeries theta_expand(const ThetaSpec& t, const QQ& order) {
  QSeries s = QSeries::zero_to(order);
  if (order < 0) return s;
  std::map<QQ, Cyclotomic> acc;
  enumerate_by_norm(t.gram, order, t.shift, [&](const std::vector<long>& v, const QQ& half) {
    Cyclotomic ph = t.phase ? t.phase(v) : Cyclotomic(1);
    auto it = acc.find(half);
    if (it == acc.end())
      acc.emplace(half, ph);
    else
      it->second += ph;
  });
  for (const auto& [e, c] : acc) s.add_term(e, c);
  return s;
}

QSeries t_transform(const QSeries& s, long shift) {
  QSeries out = s.exact() ? QSeries() : QSeries::zero_to(*s.order());
  for (const auto& [e, c] : s.terms()) out.add_term(e, c * Cyclotomic::exp2pi(e * shift));
  return out;
}

NumericValue eval_at_tau(const QSeries& s, std::complex<double> tau, double rel_tol) {
  if (tau.imag() <= 0) throw ValidationError("tau must lie in the upper half plane");
  const double two_pi = 2.0 * M_PI;
  auto qpow = [&](const QQ& e) { return std::exp(std::complex<double>(0, two_pi * e.get_d()) * tau); };
  std::complex<double> v = 0;
  for (const auto& [e, c] : s.terms()) v += c.to_complex() * qpow(e);
  double tail = 0;
  if (!s.exact()) {
    const double o = s.order()->get_d();
    double s1 = 0, s0 = 0;
    for (const auto& [e, c] : s.terms()) {
      double ed = e.get_d();
      double m = std::abs(c.to_complex()) * std::abs(qpow(e));
      if (ed > o - 1) s1 += m;
      else if (ed > o - 2) s0 += m;
    }
    const double aq = std::exp(-two_pi * tau.imag());
    double ratio = s0 > 0 ? s1 / s0 : aq;
    if (s1 == 0) s1 = std::abs(v) * std::pow(aq, std::max(o, 0.0)) + std::pow(aq, o);
    if (ratio >= 1) throw InsufficientTruncation("series does not converge visibly at this tau");
    tail = s1 * ratio / (1 - ratio);
  }
  double scale = std::abs(v) > 0 ? std::abs(v) : 1.0;
  if (tail > rel_tol * scale)
    throw InsufficientTruncation("tail bound " + std::to_string(tail) + " exceeds tolerance");
  return {v, tail};
}

}  // namespace lvorb
