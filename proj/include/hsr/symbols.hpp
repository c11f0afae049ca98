#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsr/common.hpp"
#include "hsr/parallel.hpp"
#include "hsr/scan_grid.hpp"
#include "hsr/spectral_core.hpp"

namespace hsr {

// Everything a symbol formula needs at one (xi', lambda) point.
struct SymbolPoint {
  FluidParams p;
  RootData r;
  double xi2 = 0;
  cd lam;
  rvec xi;

  SymbolPoint(const FluidParams& params, const rvec& xi_, cd lambda);

  // t_a omega - |xi'|^2 without cancellation, for the root with shift s_a lambda
  cd t_omega_minus_xi2(cd ta, cd sa) const;
  // Case III: the root different from omega; Case IV: the double root
  cd t_other() const;
  cd s_other() const;
};

namespace sym {
cd m(const SymbolPoint& P, int k);
cd m_raw(const SymbolPoint& P, int k);
cd n(const SymbolPoint& P, int k);
cd n_raw(const SymbolPoint& P, int k);
cd p(const SymbolPoint& P, int k);
cd L11(const SymbolPoint& P);
cd L12(const SymbolPoint& P);
cd L21(const SymbolPoint& P);
cd L22(const SymbolPoint& P);
cd detL(const SymbolPoint& P);
cd detL_raw(const SymbolPoint& P);
cd t2_minus_t1(const SymbolPoint& P);

cd q(const SymbolPoint& P);
cd t_minus_omega(const SymbolPoint& P);  // Cases III and IV
cd M11(const SymbolPoint& P);
cd M12(const SymbolPoint& P);
cd M21(const SymbolPoint& P);
cd M22(const SymbolPoint& P);
cd detM(const SymbolPoint& P);
cd detM_raw(const SymbolPoint& P);

cd d3(const SymbolPoint& P);
cd d5(const SymbolPoint& P);
cd d5_alt(const SymbolPoint& P);
}  // namespace sym

using SymbolFn = std::function<cd(const rvec&, cd)>;

struct SymbolSpec {
  std::string name;
  double order = 0;
  int type = 1;
  SymbolFn eval;
  SymbolFn alt_eval;  // empty when only one form exists

  bool has_alt() const { return static_cast<bool>(alt_eval); }
};

std::vector<std::string> named_symbols();
// Cases in which the named symbol exists
bool symbol_available(const std::string& name, Case c);
SymbolSpec make_named_symbol(const FluidParams& params, const std::string& name);

// test symbols: "one", "xi<k>", "xi<k>_over_abs", "sqrt_lambda"
SymbolSpec make_basic_symbol(const std::string& name);
SymbolSpec product(const SymbolSpec& a, const SymbolSpec& b);

struct ClassEntry {
  std::vector<int> alpha;
  int n = 0;
  double constant = 0;
  std::map<int, double> band_max;
  bool stable = true;
  bool vanishing = false;
};

struct ClassReport {
  std::string name;
  double order = 0;
  int type = 1;
  std::vector<ClassEntry> entries;
  std::vector<int> admissible_bands;
  bool stable() const;
};

ClassReport verify_symbol_class(const SymbolSpec& s, const ScanGrid& grid, int max_multi_order,
                                Exec exec = Exec::parallel);

// D^alpha (lambda d/dlambda)^n of the symbol by nested central differences
cd symbol_derivative(const SymbolSpec& s, const rvec& xi, cd lambda, const std::vector<int>& alpha,
                     int n, double fd_step);

enum class Regime { lambda_dominant, xi_dominant };

struct AsymptoticReport {
  std::string name;
  Regime regime;
  std::vector<std::pair<double, cd>> ratios;  // (small parameter y, symbol / limit)
};

// y runs over ys: |lambda|/|xi'|^2 (xi_dominant) or |xi'|^2/|lambda| (lambda_dominant)
AsymptoticReport asymptotic_check(const FluidParams& params, const std::string& name, Regime regime,
                                  const rvec& ys, double base = 1.0, double lambda_arg = 0.0);

cd asymptotic_limit(const FluidParams& params, int k, Regime regime, const rvec& xi, cd lambda);

}  // namespace hsr
