#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hsr/common.hpp"

namespace hsr {

struct Term {
  cd c;
  int m = 0;
  cd t;
  // t^2 - |xi'|^2 when the rate comes from a known root; NaN otherwise
  cd shift{std::numeric_limits<double>::quiet_NaN(), 0.0};

  bool has_shift() const { return !std::isnan(shift.real()); }
};

class VerticalProfile {
 public:
  VerticalProfile() = default;
  explicit VerticalProfile(std::vector<Term> terms);

  void add(cd c, int m, cd t);
  void add(cd c, int m, cd t, cd shift);
  void add(const VerticalProfile& other, cd factor = 1.0);

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  cd eval(double x) const;
  // sum of |c| x^m |e^{-t x}|, the rounding scale of eval
  double abs_eval(double x) const;
  cd at_zero() const;
  double min_re_rate() const;

  VerticalProfile derivative(int order = 1) const;
  // (d^2/dx^2 - |xi'|^2), using the stored shifts when available
  VerticalProfile helmholtz(double xi2) const;
  VerticalProfile scaled(cd a) const;

  // merge equal (m, t) keys under a relative rate tolerance, drop exact zeros
  VerticalProfile canonical(double rate_tol = 1e-14) const;

  std::string to_json() const;

 private:
  std::vector<Term> terms_;
};

VerticalProfile operator+(const VerticalProfile& a, const VerticalProfile& b);
VerticalProfile operator-(const VerticalProfile& a, const VerticalProfile& b);
VerticalProfile operator*(cd a, const VerticalProfile& p);

// e^z - 1 without cancellation for small |z|
cd expm1c(cd z);
// (e^z - 1)/z, Taylor branch for |z| below the switch
cd phi1(cd z);
inline constexpr double kConfluentSwitch = 1e-3;

// (e^{-t2 x} - e^{-t1 x})/(t2 - t1), limit -x e^{-t x} at t1 = t2
cd confluent_M0(cd t1, cd t2, double x);
// (e^{-tj x} - e^{-omega x})/(t2 - t1); requires t1 != t2
cd confluent_Mj(cd tj, cd omega, cd t1, cd t2, double x);
// (e^{-t2 x} - e^{-omega x})/(t2 - omega)
cd kernel_M(cd omega, cd t2, double x);

}  // namespace hsr
