#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hsr/common.hpp"
#include "hsr/spectral_core.hpp"

namespace hsr {

// flattened lift tuple with quadrature weights (grid cell x component multiplicity)
struct LiftVector {
  cvec v;
  rvec w;
};

double lift_norm(const LiftVector& a, double q);

// tangential box, band of excited modes and a graded vertical grid for the probe norms
struct ProbeGrid {
  int dim = 2;
  int points = 64;
  double half_length = 32;
  int band = 31;  // excited modes 1 <= max_a |k_a| <= band
  int nz = 400;
  double zmax = 400;
  double grading = 14;  // z_i = zmax (e^{g s} - 1)/(e^g - 1)
  // uniform vertical grid of the full families, which run the field pipeline
  double full_L = 60;
  int full_nz = 1025;

  void validate() const;

  rvec z_nodes() const;
  rvec z_weights() const;  // trapezoid
  std::size_t tangential_count() const;
};

struct ProbeInput {
  cvec g_spec;                  // tangential spectrum of the trace g
  std::vector<cvec> h_spec;     // N-1 tangential trace spectra
  // full families: tangential spectra of the z-profile amplitudes of d and f
  cvec d_spec;
  std::vector<cvec> f_spec;
};

struct ProbeFamily {
  std::string name;
  std::function<LiftVector(cd lambda, const ProbeInput&)> apply;       // output lift of the operator
  std::function<LiftVector(cd lambda, const ProbeInput&)> input_lift;  // lift of the data
};

enum class FamilyKind { A2, B2, A, B };
FamilyKind family_from_name(const std::string& s);
std::string family_name(FamilyKind k);

ProbeFamily make_family(const FluidParams& p, FamilyKind kind, const ProbeGrid& grid);
// output = input lift, for calibration
ProbeFamily identity_family(const FluidParams& p, FamilyKind kind, const ProbeGrid& grid);
// output = c(lambda) * input lift
ProbeFamily scalar_family(const ProbeFamily& base, std::function<cd(cd)> c);
// (T((1+h) lambda) - T((1-h) lambda)) / (2h) with the data and its lift held at lambda
ProbeFamily lambda_log_derivative(const ProbeFamily& f, double rel_step);

// dyadic frequency shells 2^s <= max_a |k_a| < 2^{s+1} inside the band
int probe_shells(const ProbeGrid& grid);
// random band-limited data on one shell, or on the whole band for shell < 0
ProbeInput random_input(const ProbeGrid& grid, FamilyKind kind, std::mt19937_64& rng, int shell = -1);

// draw d uses shell (d mod (shells + 1)) - 1, so the draws of a decade sweep the frequency scales
using ProbeSampler = std::function<ProbeInput(std::mt19937_64&, int draw)>;
ProbeSampler shell_sampler(const ProbeGrid& grid, FamilyKind kind);

struct ProbeConfig {
  int m = 8;
  int trials = 200;
  double q = 2;
  int decade_lo = -2, decade_hi = 2;  // |lambda| in [10^lo, 10^hi]
  rvec ray_args{0.0, 1.2, -1.2};
  rvec lambda_samples;  // optional explicit pool; otherwise 5 magnitudes per decade on each ray
  int draws = 0;  // (lambda, data) draws per decade; 0 means one per shell plus a full-band draw
  std::uint64_t rng_seed = 20240611;

  void validate() const;
  int draws_for(const ProbeGrid& g) const { return draws > 0 ? draws : probe_shells(g) + 1; }
};

struct DecadeStat {
  int decade = 0;
  double max_ratio = 0, min_ratio = 0;
  int draws = 0;
};

struct ProbeReport {
  std::string family;
  std::vector<DecadeStat> decades;
  double global_max = 0;
  double spread = 0;  // max over decades of the decade maximum / min over decades
  int trials = 0;
  int redraws = 0;

  std::string to_json() const;
};

// Rademacher mean-square ratio of sum r_j O_j against sum r_j I_j
double rademacher_ratio(const std::vector<LiftVector>& outputs, const std::vector<LiftVector>& inputs,
                        double q, int trials, std::mt19937_64& rng);

ProbeReport estimate_rbound(const ProbeFamily& family,
                            const ProbeSampler& sampler, const ProbeConfig& cfg, int draws);

}  // namespace hsr
