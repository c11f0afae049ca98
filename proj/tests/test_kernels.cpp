#include <doctest.h>

#include <boost/multiprecision/cpp_complex.hpp>
#include <cmath>

#include "hsr/scan_grid.hpp"
#include "hsr/vertical_kernels.hpp"

using namespace hsr;
using hp = boost::multiprecision::cpp_complex_50;

namespace {

hp H(cd z) { return hp(z.real(), z.imag()); }
cd D(const hp& z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

cd ref_M0(cd t1, cd t2, double x) {
  const hp a = H(t1), b = H(t2), X(x);
  return D((exp(-b * X) - exp(-a * X)) / (b - a));
}

cd ref_phi1(cd z) {
  const hp w = H(z);
  return D((exp(w) - hp(1)) / w);
}

double rel(cd a, cd b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("profile evaluation") {
  VerticalProfile p;
  p.add(1.0, 0, 1.0);
  CHECK(p.eval(1.0).real() == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  VerticalProfile q;
  q.add(1.0, 1, 1.0);
  CHECK(q.eval(0.0) == cd(0.0));
  VerticalProfile r;
  r.add(2.0, 2, cd(1, 1));
  const cd want = 2.0 * std::exp(-1.0) * cd(std::cos(1.0), -std::sin(1.0));
  CHECK(rel(r.eval(1.0), want) < 1e-15);
  CHECK(r.eval(1.0).real() == doctest::Approx(0.39755).epsilon(1e-4));
  CHECK(r.eval(1.0).imag() == doctest::Approx(-0.61907).epsilon(1e-4));
}

TEST_CASE("profile derivatives") {
  const cd t(0.7, 0.3);
  VerticalProfile a;
  a.add(1.0, 0, t);
  const VerticalProfile da = a.derivative().canonical();
  REQUIRE(da.terms().size() == 1);
  CHECK(da.terms()[0].c == -t);
  CHECK(da.terms()[0].m == 0);

  VerticalProfile b;
  b.add(1.0, 1, t);
  const VerticalProfile db = b.derivative().canonical();
  REQUIRE(db.terms().size() == 2);
  for (const Term& tm : db.terms()) {
    if (tm.m == 0) CHECK(tm.c == cd(1.0));
    if (tm.m == 1) CHECK(tm.c == -t);
  }

  VerticalProfile c;
  c.add(1.0, 1, 1.0);
  CHECK(std::abs(c.derivative(2).eval(1.0) + std::exp(-1.0)) < 1e-15);

  // helmholtz = second derivative minus |xi'|^2, with and without stored shifts
  VerticalProfile s;
  s.add(cd(0.4, -1), 1, cd(2, 1), cd(2, 1) * cd(2, 1) - 0.81);
  s.add(1.5, 0, 1.3);
  const VerticalProfile h = s.helmholtz(0.81), d2 = s.derivative(2) - 0.81 * s;
  for (double x : {0.0, 0.3, 2.0}) CHECK(std::abs(h.eval(x) - d2.eval(x)) < 1e-13);
  CHECK_THROWS_AS(s.derivative(-1), UsageError);
}

TEST_CASE("profile bookkeeping") {
  VerticalProfile p;
  p.add(1.0, 0, 1.0);
  p.add(2.0, 0, 1.0 + 1e-16);
  p.add(-3.0, 0, 1.0);
  CHECK(p.canonical().empty());
  VerticalProfile q;
  q.add(cd(1, 2), 1, cd(3, -4));
  CHECK(q.to_json() == "[[1,2,1,3,-4]]");
  CHECK(q.at_zero() == cd(0.0));
  CHECK(q.min_re_rate() == 3.0);
  CHECK(q.abs_eval(1.0) == doctest::Approx(std::sqrt(5.0) * std::exp(-3.0)));
}

TEST_CASE("confluent kernel reference values") {
  CHECK(confluent_M0(1.0, 1.0, 1.0).real() == doctest::Approx(-0.36787944117144233).epsilon(1e-15));
  CHECK(confluent_M0(1.0, 2.0, 1.0).real() == doctest::Approx(std::exp(-2.0) - std::exp(-1.0)).epsilon(1e-15));
  CHECK(confluent_M0(1.0, 2.0, 1.0).real() == doctest::Approx(-0.23254416).epsilon(1e-7));
  const cd near = confluent_M0(1.0, 1.0 + 1e-10, 1.0);
  CHECK(rel(near, ref_M0(1.0, 1.0 + 1e-10, 1.0)) < 1e-12);
  CHECK(rel(near, -0.36787944117144233) < 1e-9);

  CHECK(confluent_Mj(2.0, 2.0, 1.0, 3.0, 0.7) == cd(0.0));
  CHECK(confluent_Mj(1.0, 2.0, 1.0, 3.0, 1.0).real() == doctest::Approx((std::exp(-1.0) - std::exp(-2.0)) / 2));
  CHECK(confluent_Mj(1.0, 2.0, 1.0, 3.0, 1.0).real() == doctest::Approx(0.11627208).epsilon(1e-7));
  CHECK_THROWS_AS(confluent_Mj(1.0, 2.0, 1.0, 1.0, 1.0), DomainError);
  CHECK(kernel_M(1.0, 2.0, 1.0) == confluent_M0(1.0, 2.0, 1.0));
}

TEST_CASE("confluent kernel matches two-term profile") {
  // M_1 for a Case I mode against the profile (e^{-t1 x} - e^{-w x})/(t2 - t1)
  const cd t1 = std::sqrt(cd(1.5, -0.5)), t2 = std::sqrt(cd(1.5, 0.5)), w = std::sqrt(cd(2.0));
  VerticalProfile p;
  p.add(1.0 / (t2 - t1), 0, t1);
  p.add(-1.0 / (t2 - t1), 0, w);
  for (double x : {0.0, 0.1, 1.0, 5.0}) CHECK(std::abs(confluent_Mj(t1, w, t1, t2, x) - p.eval(x)) < 1e-15);
}

TEST_CASE("divided differences against 50-digit references") {
  const cd bases[] = {1.0, cd(1, 0.5), cd(3, -2), 0.2};
  const cd dirs[] = {1.0, cd(0, 1), cd(1, 1) / std::sqrt(2.0), cd(-1, 0.3)};
  double worst = 0;
  for (cd t1 : bases)
    for (cd dir : dirs)
      for (double x : {0.5, 1.0, 4.0})
        for (double s : logspace(1e-14, 1.0, 57)) {
          const cd t2 = t1 + dir * (s / x);
          worst = std::max(worst, rel(confluent_M0(t1, t2, x), ref_M0(t1, t2, x)));
        }
  CHECK(worst < 1e-12);

  // both sides of the Taylor switch
  double wphi = 0;
  for (double f : {0.5, 0.999999, 1.0, 1.000001, 2.0})
    for (cd dir : dirs) {
      const cd z = dir * (f * kConfluentSwitch);
      wphi = std::max(wphi, rel(phi1(z), ref_phi1(z)));
      wphi = std::max(wphi, rel(phi1(-z), ref_phi1(-z)));
    }
  CHECK(wphi < 1e-14);

  const cd z(1e-9, -3e-9);
  CHECK(rel(expm1c(z), D(exp(H(z)) - hp(1))) < 1e-15);
}
