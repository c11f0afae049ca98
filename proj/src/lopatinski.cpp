#include "hsr/lopatinski.hpp"

#include <cmath>
#include <limits>

#include "hsr/parallel.hpp"
#include "hsr/symbols.hpp"

namespace hsr {

BoundaryMatrix boundary_matrix(const FluidParams& p, const TangentialMode& mode) {
  const SymbolPoint P(p, mode.xi, mode.lambda);
  BoundaryMatrix B;
  B.tag = p.tag;
  const cd t1 = P.r.t1, t2 = P.r.t2, w = P.r.omega;
  const double x2 = P.xi2;
  if (p.tag == Case::I || p.tag == Case::II) {
    B.a11 = P.r.shift1;
    B.a12 = P.r.shift2;
    B.a21 = -t2 * (t1 * w - x2);
    B.a22 = -t1 * (t2 * w - x2);
    B.rhs1 = mode.lambda;
    B.rhs2 = t1 * t2;
    B.rhs_template = "(lambda g_hat(0), t1 t2 i xi'.h_hat(0))";
    return B;
  }
  if (p.tag == Case::IV) {
    const double dm = p.nu - p.mu;
    const cd tmw = sym::t_minus_omega(P);
    B.a11 = -2.0 * p.mu * tmw * (t2 + w);
    B.a12 = -2.0 * dm * t2;
    B.a21 = tmw * (2.0 * p.mu * w * (t2 + w) + dm * x2);
    B.a22 = dm * x2;
    B.rhs1 = dm * mode.lambda;
    B.rhs2 = dm * t2 * t2;
    B.rhs_template = "((nu-mu) lambda g_hat(0), (nu-mu) t2^2 i xi'.h_hat(0))";
    return B;
  }
  throw DomainError("no 2x2 boundary system in Case " + case_name(p.tag));
}

cd det_L(const FluidParams& p, const TangentialMode& mode) {
  if (p.tag != Case::I && p.tag != Case::II) throw DomainError("det L requires Case I or II");
  return sym::detL(SymbolPoint(p, mode.xi, mode.lambda));
}

cd det_M(const FluidParams& p, const TangentialMode& mode) {
  if (p.tag != Case::IV) throw DomainError("det M requires Case IV");
  return sym::detM(SymbolPoint(p, mode.xi, mode.lambda));
}

LowerBoundReport lower_bound_scan(const FluidParams& p, const std::string& name, const ScanGrid& grid,
                                  double power) {
  grid.validate();
  const SymbolSpec s = make_named_symbol(p, name);
  const std::size_t n = grid.size();
  rvec ratio(n);
  std::vector<std::string> errors(n);
  for_each_index(n, Exec::parallel, [&](std::size_t i) {
    auto [xi, lam] = grid.point(i);
    try {
      const double scale = std::sqrt(std::abs(lam)) + norm2(xi);
      ratio[i] = std::abs(s.eval(xi, lam)) / std::pow(scale, power);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw EvaluationError(e);

  LowerBoundReport rep;
  rep.name = name;
  rep.power = power;
  rep.points = n;
  rep.inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    auto [xi, lam] = grid.point(i);
    const int b = dyadic_band(std::sqrt(std::abs(lam)) + norm2(xi));
    auto it = rep.band_inf.find(b);
    if (it == rep.band_inf.end() || ratio[i] < it->second) {
      rep.band_inf[b] = ratio[i];
      rep.band_argmin[b] = {xi, lam};
    }
    if (!(ratio[i] >= rep.inf)) {
      rep.inf = ratio[i];
      rep.argmin_xi = xi;
      rep.argmin_lambda = lam;
    }
  }
  rep.potential_zero = !(rep.inf >= kPotentialZero);
  return rep;
}

}  // namespace hsr
