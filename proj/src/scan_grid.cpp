#include "hsr/scan_grid.hpp"

#include <cmath>

namespace hsr {

rvec logspace(double lo, double hi, int n) {
  rvec v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) v[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  return v;
}

rvec linspace(double lo, double hi, int n) {
  rvec v(n);
  if (n == 1) {
    v[0] = 0.5 * (lo + hi);
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

int dyadic_band(double scale) { return static_cast<int>(std::floor(std::log2(scale))); }

std::size_t ScanGrid::size() const {
  return xi_magnitudes.size() * directions.size() * lambda_magnitudes.size() * lambda_args.size();
}

void ScanGrid::validate() const {
  if (size() == 0) throw UsageError("empty scan grid");
  for (double x : xi_magnitudes)
    if (!(x >= 0)) throw UsageError("negative xi magnitude in scan grid");
  for (double l : lambda_magnitudes)
    if (!(l > 0)) throw UsageError("non-positive lambda magnitude in scan grid");
}

std::pair<rvec, cd> ScanGrid::point(std::size_t i) const {
  const std::size_t na = lambda_args.size(), nl = lambda_magnitudes.size(),
                    nd = directions.size();
  const std::size_t ia = i % na;
  i /= na;
  const std::size_t il = i % nl;
  i /= nl;
  const std::size_t id = i % nd;
  const std::size_t ix = i / nd;
  rvec xi = directions[id];
  for (double& c : xi) c *= xi_magnitudes[ix];
  return {xi, std::polar(lambda_magnitudes[il], lambda_args[ia])};
}

ScanGrid ScanGrid::log_grid(double xi_lo, double xi_hi, int nx, double lam_lo, double lam_hi,
                            int nl, int na, double arg_max, int dim) {
  ScanGrid g;
  g.xi_magnitudes = logspace(xi_lo, xi_hi, nx);
  rvec e(dim - 1, 0.0);
  e[0] = 1.0;
  g.directions = {e};
  g.lambda_magnitudes = logspace(lam_lo, lam_hi, nl);
  g.lambda_args = linspace(-arg_max, arg_max, na);
  return g;
}

namespace {
rvec refine_axis(const rvec& v, bool logscale) {
  if (v.size() < 2) return v;
  rvec r;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    r.push_back(v[i]);
    r.push_back(logscale ? std::sqrt(v[i] * v[i + 1]) : 0.5 * (v[i] + v[i + 1]));
  }
  r.push_back(v.back());
  return r;
}
}  // namespace

ScanGrid ScanGrid::refined() const {
  ScanGrid g = *this;
  bool xi_log = true;
  for (double x : xi_magnitudes)
    if (x <= 0) xi_log = false;
  g.xi_magnitudes = refine_axis(xi_magnitudes, xi_log);
  g.lambda_magnitudes = refine_axis(lambda_magnitudes, true);
  g.lambda_args = refine_axis(lambda_args, false);
  return g;
}

}  // namespace hsr
