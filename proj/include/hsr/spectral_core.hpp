#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hsr/common.hpp"

namespace hsr {

enum class Case { I, II, III, IV, V };
std::string case_name(Case c);

struct FluidParams {
  double mu = 1, nu = 1, kappa = 1;
  double eta = 0;
  Case tag = Case::I;
  cd s1, s2;
  double mu_inv = 1, nu_inv = 1;

  double eps_star() const { return std::abs(std::arg(s2)); }
  bool exact_path = false;
};

FluidParams classify(double mu, double nu, double kappa, double tol = 1e-12);

struct Rational {
  long long num = 0, den = 1;
  double value() const { return double(num) / double(den); }
};
// exact case decision from integer ratios; no tolerance involved
FluidParams classify_exact(Rational mu, Rational nu, Rational kappa);

struct TangentialMode {
  rvec xi;  // length N-1
  cd lambda;
  int dim = 2;

  double xi2() const;
  double xi_norm() const;
};

struct ModeOptions {
  bool sector = false;
  double eps = 0;  // sector margin, used only when sector is set
};

// validated constructor: Re lambda > 0, or |arg lambda| < pi - eps in sector mode
TangentialMode make_mode(const rvec& xi, cd lambda, const FluidParams* params = nullptr,
                         ModeOptions opt = {});

enum class Degeneracy { distinct, t1_eq_omega, t2_eq_omega, t1_eq_t2, all_equal };
std::string degeneracy_name(Degeneracy d);

struct RootData {
  cd t1, t2, omega;
  // t_j^2 - |xi'|^2, exact products s_j*lambda and lambda/mu
  cd shift1, shift2, shift_omega;
  Degeneracy degeneracy = Degeneracy::distinct;

  double min_re() const;
};

RootData compute_roots(const FluidParams& p, const TangentialMode& m);

cd char_poly(const FluidParams& p, const TangentialMode& m, cd t);

struct ScanGrid;

struct RootBoundReport {
  double inf_t1 = 0, inf_t2 = 0, inf_omega = 0;
  rvec argmin_xi;
  cd argmin_lambda;
  std::size_t points = 0;
  struct Row {
    rvec xi;
    cd lambda;
    double r1, r2, rw;
  };
  std::vector<Row> rows;
};

RootBoundReport root_lower_bound_scan(const FluidParams& p, const ScanGrid& grid,
                                      bool keep_rows = false);

}  // namespace hsr
