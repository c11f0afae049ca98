#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hsr/common.hpp"

namespace hsr {

struct ScanGrid {
  rvec xi_magnitudes;
  std::vector<rvec> directions;
  rvec lambda_magnitudes;
  rvec lambda_args;
  double fd_step = 1e-5;

  std::size_t size() const;
  void validate() const;
  // point index -> (xi', lambda); ordering: xi magnitude, direction, |lambda|, arg
  std::pair<rvec, cd> point(std::size_t i) const;

  // nx / nl magnitudes on log scales, na args symmetric in [-arg_max, arg_max]
  static ScanGrid log_grid(double xi_lo, double xi_hi, int nx, double lam_lo, double lam_hi,
                           int nl, int na, double arg_max, int dim = 2);
  // nested refinement: every axis n -> 2n - 1
  ScanGrid refined() const;
};

rvec logspace(double lo, double hi, int n);
rvec linspace(double lo, double hi, int n);

// dyadic band j with 2^j <= |lambda|^{1/2} + |xi'| < 2^{j+1}
int dyadic_band(double scale);

}  // namespace hsr
