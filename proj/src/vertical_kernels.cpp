#include "hsr/vertical_kernels.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hsr {

VerticalProfile::VerticalProfile(std::vector<Term> terms) : terms_(std::move(terms)) {}

void VerticalProfile::add(cd c, int m, cd t) { terms_.push_back(Term{c, m, t}); }

void VerticalProfile::add(cd c, int m, cd t, cd shift) { terms_.push_back(Term{c, m, t, shift}); }

void VerticalProfile::add(const VerticalProfile& other, cd factor) {
  for (Term tm : other.terms_) {
    tm.c *= factor;
    terms_.push_back(tm);
  }
}

namespace {
inline double xpow(double x, int m) {
  switch (m) {
    case 0: return 1.0;
    case 1: return x;
    case 2: return x * x;
    default: return std::pow(x, m);
  }
}
}  // namespace

cd VerticalProfile::eval(double x) const {
  cd s = 0;
  for (const Term& tm : terms_) {
    if (tm.m > 0 && x == 0.0) continue;
    s += tm.c * xpow(x, tm.m) * std::exp(-tm.t * x);
  }
  return s;
}

double VerticalProfile::abs_eval(double x) const {
  double s = 0;
  for (const Term& tm : terms_) {
    if (tm.m > 0 && x == 0.0) continue;
    s += std::abs(tm.c) * xpow(x, tm.m) * std::exp(-tm.t.real() * x);
  }
  return s;
}

cd VerticalProfile::at_zero() const {
  cd s = 0;
  for (const Term& tm : terms_)
    if (tm.m == 0) s += tm.c;
  return s;
}

double VerticalProfile::min_re_rate() const {
  double r = std::numeric_limits<double>::infinity();
  for (const Term& tm : terms_) r = std::min(r, tm.t.real());
  return r;
}

VerticalProfile VerticalProfile::derivative(int order) const {
  if (order < 0) throw UsageError("negative derivative order");
  VerticalProfile p = *this;
  for (int k = 0; k < order; ++k) {
    VerticalProfile q;
    for (const Term& tm : p.terms_) {
      // d/dx c x^m e^{-tx} = c m x^{m-1} e^{-tx} - c t x^m e^{-tx}
      q.terms_.push_back(Term{-tm.c * tm.t, tm.m, tm.t, tm.shift});
      if (tm.m > 0) q.terms_.push_back(Term{tm.c * double(tm.m), tm.m - 1, tm.t, tm.shift});
    }
    p = std::move(q);
  }
  return p;
}

VerticalProfile VerticalProfile::helmholtz(double xi2) const {
  VerticalProfile q;
  for (const Term& tm : terms_) {
    const cd sh = tm.has_shift() ? tm.shift : tm.t * tm.t - xi2;
    q.terms_.push_back(Term{tm.c * sh, tm.m, tm.t, tm.shift});
    if (tm.m >= 1) q.terms_.push_back(Term{-2.0 * double(tm.m) * tm.t * tm.c, tm.m - 1, tm.t, tm.shift});
    if (tm.m >= 2)
      q.terms_.push_back(Term{double(tm.m * (tm.m - 1)) * tm.c, tm.m - 2, tm.t, tm.shift});
  }
  return q;
}

VerticalProfile VerticalProfile::scaled(cd a) const {
  VerticalProfile q = *this;
  for (Term& tm : q.terms_) tm.c *= a;
  return q;
}

VerticalProfile VerticalProfile::canonical(double rate_tol) const {
  std::vector<Term> out;
  for (const Term& tm : terms_) {
    bool merged = false;
    for (Term& o : out) {
      if (o.m != tm.m) continue;
      const double sc = std::max(std::abs(o.t), std::abs(tm.t));
      if (std::abs(o.t - tm.t) <= rate_tol * sc) {
        o.c += tm.c;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(tm);
  }
  std::vector<Term> kept;
  for (const Term& tm : out)
    if (tm.c != 0.0) kept.push_back(tm);
  return VerticalProfile(std::move(kept));
}

std::string VerticalProfile::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Term& tm = terms_[i];
    if (i) os << ",";
    os << "[" << tm.c.real() << "," << tm.c.imag() << "," << tm.m << "," << tm.t.real() << ","
       << tm.t.imag() << "]";
  }
  os << "]";
  return os.str();
}

VerticalProfile operator+(const VerticalProfile& a, const VerticalProfile& b) {
  VerticalProfile r = a;
  r.add(b);
  return r;
}

VerticalProfile operator-(const VerticalProfile& a, const VerticalProfile& b) {
  VerticalProfile r = a;
  r.add(b, -1.0);
  return r;
}

VerticalProfile operator*(cd a, const VerticalProfile& p) { return p.scaled(a); }

cd expm1c(cd z) {
  const double a = z.real(), b = z.imag();
  const double em = std::expm1(a);
  const double sh = std::sin(0.5 * b);
  // e^a cos b - 1 = expm1(a) cos b - 2 sin^2(b/2)
  const double re = em * std::cos(b) - 2.0 * sh * sh;
  const double im = std::exp(a) * std::sin(b);
  return {re, im};
}

cd phi1(cd z) {
  if (std::abs(z) < kConfluentSwitch) {
    // 1 + z/2 + z^2/6 + z^3/24 + z^4/120 + z^5/720
    return 1.0 + z * (1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z * (1.0 / 720)))));
  }
  return expm1c(z) / z;
}

cd confluent_M0(cd t1, cd t2, double x) {
  if (x == 0.0) return 0.0;
  const cd w = -(t2 - t1) * x;
  return -x * std::exp(-t1 * x) * phi1(w);
}

cd confluent_Mj(cd tj, cd omega, cd t1, cd t2, double x) {
  const cd dt = t2 - t1;
  if (std::abs(dt) < 1e3 * std::numeric_limits<double>::epsilon() * std::abs(t2))
    throw DomainError("confluent_Mj is ill-conditioned: t1 and t2 coincide");
  if (tj == omega) return 0.0;
  // e^{-tj x} - e^{-omega x} = (tj - omega) * M0(tj, omega, x)
  return (tj - omega) / dt * confluent_M0(tj, omega, x);
}

cd kernel_M(cd omega, cd t2, double x) { return confluent_M0(omega, t2, x); }

}  // namespace hsr
