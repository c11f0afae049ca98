#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "hsr/parallel.hpp"
#include "hsr/scan_grid.hpp"
#include "hsr/spectral_core.hpp"

using namespace hsr;

namespace {

// roots of kappa s^2 - (mu + nu) s + 1 = 0, smaller real part first
std::pair<cd, cd> quadratic_roots(double mu, double nu, double kappa) {
  const cd disc = std::sqrt(cd((mu + nu) * (mu + nu) - 4 * kappa));
  cd a = ((mu + nu) - disc) / (2 * kappa), b = ((mu + nu) + disc) / (2 * kappa);
  return {a, b};
}

}  // namespace

TEST_CASE("classification of the five cases") {
  FluidParams p = classify(1, 1, 2);
  CHECK(p.tag == Case::I);
  CHECK(p.eta == doctest::Approx(-0.25));
  CHECK(std::abs(p.s1 - cd(0.5, -0.5)) < 1e-14);
  CHECK(std::abs(p.s2 - cd(0.5, 0.5)) < 1e-14);

  p = classify(2, 1, 2);
  CHECK(p.tag == Case::III);
  CHECK(p.eta == doctest::Approx(1.0 / 16));
  CHECK(std::abs(p.s1 - 0.5) < 1e-14);
  CHECK(std::abs(p.s2 - 1.0) < 1e-14);

  p = classify(3, 1, 4);
  CHECK(p.tag == Case::IV);
  CHECK(p.eta == 0.0);
  CHECK(std::abs(p.s1 - 0.5) < 1e-14);
  CHECK(std::abs(p.s2 - 0.5) < 1e-14);

  p = classify(1, 1, 1);
  CHECK(p.tag == Case::V);
  CHECK(std::abs(p.s1 - 1.0) < 1e-14);
  CHECK(std::abs(p.s2 - 1.0) < 1e-14);

  p = classify(3, 1, 1);
  CHECK(p.tag == Case::II);
  const auto [a, b] = quadratic_roots(3, 1, 1);
  CHECK(std::abs(p.s1 - a) < 1e-14);
  CHECK(std::abs(p.s2 - b) < 1e-14);
}

TEST_CASE("exact classification agrees and needs no tolerance") {
  CHECK(classify_exact({2, 1}, {1, 1}, {2, 1}).tag == Case::III);
  CHECK(classify_exact({3, 1}, {1, 1}, {4, 1}).tag == Case::IV);
  CHECK(classify_exact({1, 1}, {1, 1}, {1, 1}).tag == Case::V);
  CHECK(classify_exact({3, 1}, {1, 1}, {399999, 100000}).tag == Case::II);
  CHECK_THROWS_AS(classify_exact({0, 1}, {1, 1}, {1, 1}), DomainError);
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(classify(0, 1, 1), DomainError);
  CHECK_THROWS_AS(classify(1, -1, 1), DomainError);
  CHECK_THROWS_AS(classify(1, 1, NAN), DomainError);
}

TEST_CASE("mode construction enforces the half-plane or the sector") {
  const FluidParams p = classify(1, 1, 2);
  CHECK_THROWS_AS(make_mode({1.0}, cd(-1, 0.1), &p), DomainError);
  CHECK_THROWS_AS(make_mode({1.0}, cd(0, 0), &p), DomainError);
  ModeOptions sec{true, 0.8};
  CHECK_NOTHROW(make_mode({1.0}, std::polar(1.0, 2.0), &p, sec));
  CHECK_THROWS_AS(make_mode({1.0}, std::polar(1.0, 2.5), &p, sec), DomainError);
  CHECK_THROWS_AS(make_mode({1.0}, std::polar(1.0, 2.0), &p, ModeOptions{true, 0.5}), DomainError);
}

TEST_CASE("roots at unit and reference inputs") {
  FluidParams p = classify(1, 1, 1);
  RootData r = compute_roots(p, make_mode({0.0}, 1.0, &p));
  CHECK(std::abs(r.t1 - 1.0) < 1e-14);
  CHECK(std::abs(r.t2 - 1.0) < 1e-14);
  CHECK(std::abs(r.omega - 1.0) < 1e-14);
  CHECK(r.degeneracy == Degeneracy::all_equal);

  p = classify(2, 1, 2);
  r = compute_roots(p, make_mode({1.0}, 1.0, &p));
  CHECK(std::abs(r.t1 - std::sqrt(1.5)) < 1e-14);
  CHECK(std::abs(r.omega - std::sqrt(1.5)) < 1e-14);
  CHECK(std::abs(r.t2 - std::sqrt(2.0)) < 1e-14);

  p = classify(1, 1, 2);
  r = compute_roots(p, make_mode({1.0}, 4.0, &p));
  CHECK(std::abs(r.t1 * r.t1 - cd(3, -2)) < 1e-12);
  CHECK(r.t1.real() > 0);
  CHECK(r.t1.real() == doctest::Approx(1.8173).epsilon(1e-4));
  CHECK(r.t1.imag() == doctest::Approx(-0.5503).epsilon(1e-3));
}

TEST_CASE("characteristic polynomial") {
  FluidParams p = classify(1, 1, 1);
  CHECK(std::abs(char_poly(p, make_mode({0.0}, 1.0, &p), 0.0) - 1.0) < 1e-15);
  p = classify(1, 1, 2);
  CHECK(std::abs(char_poly(p, make_mode({1.0}, 1.0, &p), 2.0) - 13.0) < 1e-13);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lx(-3, 3), arg(-1.5, 1.5);
  const std::vector<std::array<double, 3>> sets{{1, 1, 2}, {3, 1, 1}, {2, 1, 2}, {3, 1, 4}, {1, 1, 1}};
  for (const auto& params : sets) {
    p = classify(params[0], params[1], params[2]);
    for (int i = 0; i < 200; ++i) {
      const double xi = std::pow(10.0, lx(rng));
      const cd lam = std::polar(std::pow(10.0, lx(rng)), arg(rng));
      const TangentialMode m = make_mode({xi}, lam, &p);
      const RootData r = compute_roots(p, m);
      const double scale = std::pow(std::abs(lam) + xi * xi, 2);
      CHECK(std::abs(char_poly(p, m, r.t1)) <= 1e-10 * scale);
      CHECK(std::abs(char_poly(p, m, r.t2)) <= 1e-10 * scale);
      CHECK(r.t1.real() > 0);
      CHECK(r.t2.real() > 0);
      CHECK(r.omega.real() > 0);
      CHECK(std::abs(r.omega * r.omega - (xi * xi + lam / p.mu)) <= 1e-13 * (xi * xi + std::abs(lam)));
    }
  }
}

TEST_CASE("roots stay in the right half-plane inside the sector") {
  const FluidParams p = classify(1, 1, 2);
  const double eps = p.eps_star() + 0.05;
  for (double a : {-(std::numbers::pi - eps) + 1e-3, std::numbers::pi - eps - 1e-3, 2.0, -1.9})
    for (double x : {0.0, 0.3, 3.0}) {
      const RootData r = compute_roots(p, make_mode({x}, std::polar(2.0, a), &p, {true, eps}));
      CHECK(r.t1.real() > 0);
      CHECK(r.t2.real() > 0);
    }
}

TEST_CASE("root lower bound scan") {
  ScanGrid g;
  g.xi_magnitudes = {0.0};
  g.directions = {{1.0}};
  g.lambda_magnitudes = {1.0};
  g.lambda_args = {0.0};
  const RootBoundReport r = root_lower_bound_scan(classify(1, 1, 1), g);
  CHECK(r.inf_t1 == doctest::Approx(1.0));
  CHECK(r.inf_t2 == doctest::Approx(1.0));
  CHECK(r.inf_omega == doctest::Approx(1.0));

  // degree-one homogeneity under (r xi', r^2 lambda)
  const FluidParams p = classify(1, 1, 2);
  ScanGrid a = g, b = g;
  a.xi_magnitudes = {0.7};
  a.lambda_magnitudes = {0.3};
  a.lambda_args = {0.9};
  b = a;
  b.xi_magnitudes = {7.0};
  b.lambda_magnitudes = {30.0};
  const auto ra = root_lower_bound_scan(p, a), rb = root_lower_bound_scan(p, b);
  CHECK(ra.inf_t1 == doctest::Approx(rb.inf_t1).epsilon(1e-12));
  CHECK(ra.inf_t2 == doctest::Approx(rb.inf_t2).epsilon(1e-12));

  const ScanGrid wide = ScanGrid::log_grid(1e-3, 1e3, 13, 1e-6, 1e6, 13, 5, std::numbers::pi / 2 - 0.1);
  const auto rw = root_lower_bound_scan(p, wide);
  CHECK(rw.inf_t1 > 0);
  CHECK(rw.inf_t2 > 0);
  CHECK(rw.points == wide.size());
}

TEST_CASE("scan grid layout") {
  const ScanGrid g = ScanGrid::log_grid(1e-2, 1e2, 5, 1e-2, 1e2, 3, 3, 1.0);
  CHECK(g.size() == 5 * 3 * 3);
  auto [xi0, l0] = g.point(0);
  CHECK(xi0[0] == doctest::Approx(1e-2));
  CHECK(std::abs(l0 - std::polar(1e-2, -1.0)) < 1e-15);
  auto [xi1, l1] = g.point(1);
  CHECK(xi1[0] == doctest::Approx(1e-2));
  CHECK(std::arg(l1) == doctest::Approx(0.0));
  const ScanGrid r = g.refined();
  CHECK(r.xi_magnitudes.size() == 9);
  CHECK(r.lambda_magnitudes.size() == 5);
  CHECK(r.lambda_args.size() == 5);
  // nested: every original node survives
  for (std::size_t i = 0; i < g.xi_magnitudes.size(); ++i)
    CHECK(r.xi_magnitudes[2 * i] == doctest::Approx(g.xi_magnitudes[i]));
  CHECK(dyadic_band(1.0) == 0);
  CHECK(dyadic_band(3.9) == 1);
  CHECK(dyadic_band(0.3) == -2);
  const rvec ls = logspace(1e-3, 1e3, 7);
  CHECK(ls.front() == doctest::Approx(1e-3));
  CHECK(ls[3] == doctest::Approx(1.0));
  CHECK(ls.back() == doctest::Approx(1e3));
  ScanGrid bad = g;
  bad.lambda_magnitudes = {-1.0};
  CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("parallel loop helper") {
  std::vector<double> a(1000), b(1000);
  auto f = [](std::size_t i) { return std::sin(0.1 * i) * std::exp(-1e-3 * i); };
  for_each_index(a.size(), Exec::serial, [&](std::size_t i) { a[i] = f(i); });
  for_each_index(b.size(), Exec::parallel, [&](std::size_t i) { b[i] = f(i); });
  CHECK(a == b);

  setenv("HSR_THREADS", "3", 1);
  CHECK(default_threads() == 3);
  unsetenv("HSR_THREADS");
  set_threads(2);
  CHECK(current_threads() == 2);
  set_threads(default_threads());
}
