#pragma once

#include <string>
#include <vector>

#include "hsr/common.hpp"
#include "hsr/spectral_core.hpp"
#include "hsr/vertical_kernels.hpp"

namespace hsr {

struct BoundaryTrace {
  cd g_hat;
  cvec h_hat;  // tangential components, length N-1
};

struct ModeCoefficients {
  cvec alpha, beta, gamma;  // length N each
  cd sigma, tau;
  Case tag = Case::I;
};

struct ModeSolution {
  VerticalProfile rho;
  std::vector<VerticalProfile> u;
  VerticalProfile phi;
  ModeCoefficients coeffs;
  RootData roots;
};

ModeCoefficients mode_coefficients(const FluidParams& p, const TangentialMode& mode,
                                   const BoundaryTrace& trace);
// profiles of the case ansatz for given coefficients
ModeSolution build_solution(const FluidParams& p, const TangentialMode& mode, const ModeCoefficients& c);
ModeSolution solve_mode(const FluidParams& p, const TangentialMode& mode, const BoundaryTrace& trace);

struct ResidualReport {
  double mass = 0;        // lambda rho + div u
  double tangential = 0;  // max over the tangential momentum equations
  double normal = 0;
  double bc_abs = 0, bc_rel = 0;
  std::string worst_component;
  double worst_x = 0;

  double pde() const;
};

// geometric ladder {0, 2^-6, ..., 2^5} / min Re rate
rvec default_sample_points(const RootData& r);

ResidualReport pde_residual(const FluidParams& p, const TangentialMode& mode, const ModeSolution& sol,
                            const BoundaryTrace& trace, const rvec& xs);

// profile-algebra identities: lambda rho + phi = 0, phi = div u, P_lambda(d/dx) phi = 0
struct IdentityReport {
  double mass = 0, divergence = 0, quartic = 0;
};
IdentityReport profile_identities(const FluidParams& p, const TangentialMode& mode,
                                  const ModeSolution& sol);

struct AssembledReport {
  double max_rel = 0;
  double worst_x = 0;
  std::string worst_component;
};

inline constexpr double kAssembledTolerance = 1e-8;

// assembled multiplier-times-kernel fields against the coefficient path
AssembledReport assembled_discrepancy(const FluidParams& p, const TangentialMode& mode,
                                      const BoundaryTrace& trace, const rvec& xs);
// throws ToleranceError above kAssembledTolerance
AssembledReport assembled_formula_check(const FluidParams& p, const TangentialMode& mode,
                                        const BoundaryTrace& trace, const rvec& xs);

// assembled fields (rho, u_1..u_N) at one height
cvec assembled_fields(const FluidParams& p, const TangentialMode& mode, const BoundaryTrace& trace,
                      double x);

}  // namespace hsr
