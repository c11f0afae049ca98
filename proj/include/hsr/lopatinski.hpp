#pragma once

#include <map>
#include <string>

#include "hsr/common.hpp"
#include "hsr/scan_grid.hpp"
#include "hsr/spectral_core.hpp"

namespace hsr {

// 2x2 boundary system A (beta_N, gamma_N)^T = rhs
struct BoundaryMatrix {
  cd a11, a12, a21, a22;
  cd rhs1, rhs2;  // for unit data: coefficients of g_hat and of i xi'.h_hat
  std::string rhs_template;
  Case tag = Case::I;

  cd det() const { return a11 * a22 - a12 * a21; }
};

// Cases I/II: rows (t1^2-|xi'|^2, t2^2-|xi'|^2) and (-t2(t1 w-|xi'|^2), -t1(t2 w-|xi'|^2));
// Case IV: rows of the (beta_N, gamma_N) system for the double root
BoundaryMatrix boundary_matrix(const FluidParams& p, const TangentialMode& mode);

cd det_L(const FluidParams& p, const TangentialMode& mode);
cd det_M(const FluidParams& p, const TangentialMode& mode);

struct LowerBoundReport {
  std::string name;
  double power = 0;
  double inf = 0;
  rvec argmin_xi;
  cd argmin_lambda;
  std::map<int, double> band_inf;
  std::map<int, std::pair<rvec, cd>> band_argmin;
  std::size_t points = 0;
  bool potential_zero = false;
};

inline constexpr double kPotentialZero = 1e-14;

// inf of |sym| / (|lambda|^{1/2} + |xi'|)^power over the grid
LowerBoundReport lower_bound_scan(const FluidParams& p, const std::string& name, const ScanGrid& grid,
                                  double power);

}  // namespace hsr
