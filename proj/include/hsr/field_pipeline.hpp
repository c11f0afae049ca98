#pragma once

#include <vector>

#include "hsr/common.hpp"
#include "hsr/grid.hpp"
#include "hsr/mode_solver.hpp"
#include "hsr/parallel.hpp"
#include "hsr/spectral_core.hpp"

namespace hsr {

struct PipelineOptions {
  Exec exec = Exec::parallel;
  double decay_tol = 1e-12;
  bool validate_decay = true;
  ModeOptions mode_opt;
};

// 40 / min Re(t1, t2, omega) at xi' = 0, where the decay rates are smallest
double default_vertical_length(const FluidParams& p, cd lambda);

struct WholeSpaceSolution {
  GridSpec spec;
  cvec rho_hat;               // full spectrum on the doubled grid
  std::vector<cvec> u_hat;    // N components
  DoubledField rho;
  std::vector<DoubledField> u;
};

// empty values in d or f entries mean zero data
WholeSpaceSolution whole_space_solve(const FluidParams& p, const DoubledField& d,
                                     const std::vector<DoubledField>& f, cd lambda,
                                     Exec exec = Exec::parallel);

// tangential-spectral fields and vertical derivatives on the half-space nodes
struct SpectralStack {
  GridSpec spec;
  std::vector<cvec> rho;             // orders 0..3
  std::vector<std::vector<cvec>> u;  // [J][order 0..2]

  static SpectralStack zeros(const GridSpec& s);
  void add(const SpectralStack& o);
};

struct ReducedBoundaryData {
  GridField g_tilde;               // trace
  std::vector<GridField> h_tilde;  // N-1 traces
  double un_trace = 0;             // max |U_N(., 0)| / max |U|
  WholeSpaceSolution whole;
  SpectralStack whole_stack;
};

ReducedBoundaryData reduce_boundary_data(const FluidParams& p, const GridSpec& spec, const GridField& d,
                                         const std::vector<GridField>& f, const GridField& g, cd lambda,
                                         const PipelineOptions& opt = {});

// per-mode closed-form solve of the reduced problem from tangential spectra of the traces
SpectralStack boundary_correction(const FluidParams& p, const GridSpec& spec, cd lambda,
                                  const cvec& g_spec, const std::vector<cvec>& h_spec,
                                  const PipelineOptions& opt = {});

struct FieldResiduals {
  double mass = 0, momentum = 0;  // term-scale relative
  double bc_velocity = 0, bc_neumann = 0;
  double pde() const { return std::max(mass, momentum); }
  double bc() const { return std::max(bc_velocity, bc_neumann); }
};

struct ResolventResult {
  GridField rho;
  std::vector<GridField> u;
  SpectralStack stack;
  FieldResiduals residuals;
  double un_trace = 0;
};

ResolventResult solve_resolvent(const FluidParams& p, const GridSpec& spec, const GridField& d,
                                const std::vector<GridField>& f, const GridField& g, cd lambda,
                                const PipelineOptions& opt = {});

// physical-space residuals of the half-space system for a spectral stack
FieldResiduals field_residuals(const FluidParams& p, const SpectralStack& s, const GridField& d,
                               const std::vector<GridField>& f, const GridField& g, cd lambda);

// physical field from a tangential-spectral block on the half-space nodes
GridField to_physical(const GridSpec& spec, cvec spectral, FieldRole role);

}  // namespace hsr
