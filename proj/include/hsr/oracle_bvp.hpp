#pragma once

#include <vector>

#include "hsr/common.hpp"
#include "hsr/mode_solver.hpp"
#include "hsr/spectral_core.hpp"

namespace hsr {

enum class BvpScheme { second_order_fd, fourth_order_fd };
enum class FarBc { dirichlet_zero };

struct BvpConfig {
  double L = 0;  // 0: 40 / min Re rate of the mode
  int n = 4096;  // intervals; nodes x_i = i L / n, i = 0..n
  BvpScheme scheme = BvpScheme::second_order_fd;
  FarBc far_bc = FarBc::dirichlet_zero;
  // sentinel: flips the sign of the Neumann condition
  bool inject_bc_sign_error = false;

  void validate(const RootData& r) const;
};

double default_bvp_length(const RootData& r);

struct BvpSolution {
  rvec x;
  cvec rho, phi;
  std::vector<cvec> u;
  double L = 0;
};

BvpSolution solve_mode_bvp(const FluidParams& p, const TangentialMode& mode, const BoundaryTrace& trace,
                           BvpConfig cfg);

struct BvpComparison {
  double max_rel = 0;
  std::string worst_component;
  double worst_x = 0;
};

// per-component max error relative to the closed-form component's max magnitude
BvpComparison compare_with_closed_form(const BvpSolution& oracle, const ModeSolution& closed);

struct ConvergenceReport {
  std::vector<int> n;
  rvec errors;
  rvec pairwise_orders;
  double order = 0;  // least-squares slope of -log e against log n
  bool monotone = true;
  bool inconclusive = false;
};

ConvergenceReport convergence_study(const FluidParams& p, const TangentialMode& mode,
                                    const BoundaryTrace& trace, const std::vector<int>& n_list,
                                    BvpConfig base = {});

}  // namespace hsr
