#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hsr/lopatinski.hpp"
#include "hsr/symbols.hpp"
#include "support/hp_reference.hpp"

using namespace hsr;

namespace {

ScanGrid single(double xi, cd lam) {
  ScanGrid g;
  g.xi_magnitudes = {xi};
  g.directions = {{1.0}};
  g.lambda_magnitudes = {std::abs(lam)};
  g.lambda_args = {std::arg(lam)};
  return g;
}

}  // namespace

TEST_CASE("det L at xi' = 0, lambda = 1") {
  const FluidParams p = classify(1, 1, 2);
  // rows (t1^2, t2^2) and (-t2 t1 w, -t1 t2 w) with w = 1 at xi' = 0
  const cd t1 = std::sqrt(p.s1), t2 = std::sqrt(p.s2), w = 1.0;
  const cd direct = t1 * t1 * (-t1 * t2 * w) - t2 * t2 * (-t2 * t1 * w);
  const cd v = det_L(p, make_mode({0.0}, 1.0, &p));
  CHECK(std::abs(v - direct) < 1e-14);
  CHECK(std::abs(v - cd(0, std::sqrt(0.5))) < 1e-14);
  CHECK(std::abs(boundary_matrix(p, make_mode({0.0}, 1.0, &p)).det() - direct) < 1e-14);
}

TEST_CASE("det L homogeneity of degree five") {
  const FluidParams p = classify(3, 1, 1);
  const cd a = det_L(p, make_mode({0.4}, cd(0.3, 0.8), &p));
  const cd b = det_L(p, make_mode({1.2}, 9.0 * cd(0.3, 0.8), &p));
  CHECK(std::abs(b - 243.0 * a) < 1e-12 * std::abs(b));
}

TEST_CASE("det M value and factorization") {
  const FluidParams p = classify(3, 1, 4);
  const cd t2 = std::sqrt(0.5), w = std::sqrt(1.0 / 3);
  const cd want = (1.0 - 3.0) * (t2 - w) * 12.0 * w * t2 * (t2 + w);
  const cd v = det_M(p, make_mode({0.0}, 1.0, &p));
  CHECK(std::abs(v - want) < 1e-13 * std::abs(want));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lx(-2, 2), arg(-1.4, 1.4);
  for (int i = 0; i < 100; ++i) {
    const double xi = std::pow(10.0, lx(rng));
    const cd lam = std::polar(std::pow(10.0, lx(rng)), arg(rng));
    const cd d = det_M(p, make_mode({xi}, lam, &p));
    const cd raw = hpref::D(hpref::Point(p, {xi}, lam).detM_raw());
    CHECK(std::abs(d - raw) <= 1e-12 * std::abs(raw));
    // degree-four homogeneity, confirmed by this sweep
    const cd s = det_M(p, make_mode({3 * xi}, 9.0 * lam, &p));
    CHECK(std::abs(s - 81.0 * d) <= 1e-12 * std::abs(s));
  }
}

TEST_CASE("boundary systems exist only in their cases") {
  CHECK_THROWS_AS(det_L(classify(3, 1, 4), make_mode({1.0}, 1.0)), DomainError);
  CHECK_THROWS_AS(det_M(classify(1, 1, 2), make_mode({1.0}, 1.0)), DomainError);
  CHECK_THROWS_AS(boundary_matrix(classify(1, 1, 1), make_mode({1.0}, 1.0)), DomainError);
  const FluidParams p4 = classify(3, 1, 4);
  const TangentialMode m = make_mode({0.7}, cd(1, 1), &p4);
  CHECK(std::abs(boundary_matrix(p4, m).det() - det_M(p4, m)) < 1e-12 * std::abs(det_M(p4, m)));
}

TEST_CASE("normalized lower bounds") {
  // d5 at xi' = 0 equals 2 lambda / mu, so the ratio is exactly 2
  const LowerBoundReport d5 = lower_bound_scan(classify(1, 1, 1), "d5", single(0.0, 1.0), 2);
  CHECK(d5.inf == doctest::Approx(2.0).epsilon(1e-14));

  // d3 ratio tends to 1 as lambda -> 0 at xi' = 1
  const LowerBoundReport d3 = lower_bound_scan(classify(2, 1, 2), "d3", single(1.0, 1e-10), 2);
  CHECK(d3.inf == doctest::Approx(1.0).epsilon(1e-4));

  const FluidParams p = classify(1, 1, 2);
  const ScanGrid g = ScanGrid::log_grid(1e-2, 1e2, 20, 1e-2, 1e2, 20, 5, std::numbers::pi / 2 - 0.05);
  const LowerBoundReport a = lower_bound_scan(p, "m1", g, 4), b = lower_bound_scan(p, "m1", g.refined(), 4);
  CHECK(a.inf > 0);
  CHECK_FALSE(a.potential_zero);
  CHECK(std::abs(b.inf - a.inf) <= 0.1 * a.inf);
  CHECK(a.band_inf.size() == a.band_argmin.size());
  CHECK(a.points == g.size());
}
