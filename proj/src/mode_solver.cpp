#include "hsr/mode_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hsr/symbols.hpp"

namespace hsr {

namespace {

cd idot(const rvec& xi, const cvec& h) {
  cd s = 0;
  for (std::size_t j = 0; j < xi.size(); ++j) s += I * xi[j] * h[j];
  return s;
}

void check_inputs(const TangentialMode& mode, const BoundaryTrace& trace) {
  if (static_cast<int>(mode.xi.size()) != mode.dim - 1) throw UsageError("xi' must have N-1 entries");
  if (trace.h_hat.size() != mode.xi.size()) throw UsageError("h_hat must have N-1 entries");
  if (!(mode.lambda.real() > 0) && !(std::abs(mode.lambda) > 0))
    throw DomainError("lambda must be nonzero");
  auto fin = [](cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  if (!fin(trace.g_hat)) throw DomainError("non-finite boundary trace");
  for (cd h : trace.h_hat)
    if (!fin(h)) throw DomainError("non-finite boundary trace");
}

void check_denominator(cd value, double scale, int power, const char* what) {
  if (!(std::abs(value) > 1e-14 * std::pow(scale, power)))
    throw EvaluationError(std::string("vanishing ") + what +
                          " (internal consistency failure: the boundary system is uniquely solvable)");
}

struct OtherRoot {
  cd t, shift;
};

OtherRoot case3_other(const RootData& r) {
  if (r.degeneracy == Degeneracy::t2_eq_omega) return {r.t1, r.shift1};
  return {r.t2, r.shift2};
}

}  // namespace

ModeCoefficients mode_coefficients(const FluidParams& p, const TangentialMode& mode,
                                   const BoundaryTrace& trace) {
  check_inputs(mode, trace);
  const SymbolPoint P(p, mode.xi, mode.lambda);
  const int N = mode.dim;
  const int n = N - 1;
  const cd lam = mode.lambda, G = trace.g_hat, H = idot(mode.xi, trace.h_hat);
  const cd w = P.r.omega;
  const double x2 = P.xi2;
  const double scale = std::sqrt(std::abs(lam)) + std::sqrt(x2);

  ModeCoefficients c;
  c.tag = p.tag;
  c.alpha.assign(N, 0.0);
  c.beta.assign(N, 0.0);
  c.gamma.assign(N, 0.0);
  for (int j = 0; j < n; ++j) c.alpha[j] = trace.h_hat[j];

  switch (p.tag) {
    case Case::I:
    case Case::II: {
      const cd t1 = P.r.t1, t2 = P.r.t2;
      const cd det = sym::detL(P);
      check_denominator(det, scale, 5, "det L");
      const cd bN = (lam * sym::L11(P) * G + t1 * t2 * sym::L12(P) * H) / det;
      const cd gN = (lam * sym::L21(P) * G + t1 * t2 * sym::L22(P) * H) / det;
      c.beta[n] = bN;
      c.gamma[n] = gN;
      for (int j = 0; j < n; ++j) {
        c.beta[j] = -I * mode.xi[j] * bN / t1;
        c.gamma[j] = -I * mode.xi[j] * gN / t2;
      }
      c.sigma = -(P.r.shift1 / t1) * bN;
      c.tau = -(P.r.shift2 / t2) * gN;
      break;
    }
    case Case::III: {
      const OtherRoot o = case3_other(P.r);
      const cd d3 = sym::d3(P), tmw = sym::t_minus_omega(P);
      check_denominator(d3 * tmw, scale, 3, "(t - omega) d3");
      const cd gN = o.t * (lam * G + w * H) / (tmw * d3);
      c.gamma[n] = gN;
      for (int j = 0; j < n; ++j) c.gamma[j] = -I * mode.xi[j] * gN / o.t;
      const cd so = o.shift / lam;
      c.sigma = H + P.t_omega_minus_xi2(o.t, so) / o.t * gN;
      c.tau = -(o.shift / o.t) * gN;
      break;
    }
    case Case::IV: {
      const cd t = P.r.t2;
      const cd det = sym::detM(P);
      check_denominator(det, scale, 4, "det M");
      const double dm = p.nu - p.mu;
      const cd r1 = dm * lam * G, r2 = dm * t * t * H;
      const cd bN = (sym::M11(P) * r1 + sym::M12(P) * r2) / det;
      const cd gN = (sym::M21(P) * r1 + sym::M22(P) * r2) / det;
      c.beta[n] = bN;
      c.gamma[n] = gN;
      for (int j = 0; j < n; ++j) {
        c.gamma[j] = -I * mode.xi[j] * gN / t;
        c.beta[j] = -(I * mode.xi[j] / t) * bN - (I * mode.xi[j] / (t * t)) * gN;
      }
      c.tau = -(P.r.shift2 / t) * gN;
      c.sigma = -(P.r.shift2 / t) * bN + ((t * t + x2) / (t * t)) * gN;
      break;
    }
    case Case::V: {
      const cd d5 = sym::d5(P);
      check_denominator(d5, scale, 2, "omega^2 + lambda/mu");
      const cd bN = -w / d5 * (lam * G + w * H);
      c.beta[n] = bN;
      for (int j = 0; j < n; ++j) c.beta[j] = -I * mode.xi[j] * bN / w;
      c.sigma = lam * (H / p.mu - w * G) / d5;
      c.tau = -(P.r.shift_omega / w) * bN;
      break;
    }
  }
  return c;
}

ModeSolution build_solution(const FluidParams& p, const TangentialMode& mode, const ModeCoefficients& c) {
  ModeSolution s;
  s.coeffs = c;
  TangentialMode m = mode;
  s.roots = compute_roots(p, m);
  const RootData& r = s.roots;
  const int N = mode.dim;
  s.u.assign(N, VerticalProfile{});
  switch (p.tag) {
    case Case::I:
    case Case::II:
      for (int J = 0; J < N; ++J) {
        s.u[J].add(c.alpha[J] - c.beta[J] - c.gamma[J], 0, r.omega, r.shift_omega);
        s.u[J].add(c.beta[J], 0, r.t1, r.shift1);
        s.u[J].add(c.gamma[J], 0, r.t2, r.shift2);
      }
      s.phi.add(c.sigma, 0, r.t1, r.shift1);
      s.phi.add(c.tau, 0, r.t2, r.shift2);
      break;
    case Case::III: {
      const OtherRoot o = case3_other(r);
      for (int J = 0; J < N; ++J) {
        s.u[J].add(c.alpha[J] - c.gamma[J], 0, r.omega, r.shift_omega);
        s.u[J].add(c.gamma[J], 0, o.t, o.shift);
      }
      s.phi.add(c.sigma, 0, r.omega, r.shift_omega);
      s.phi.add(c.tau, 0, o.t, o.shift);
      break;
    }
    case Case::IV:
      for (int J = 0; J < N; ++J) {
        s.u[J].add(c.alpha[J] - c.beta[J], 0, r.omega, r.shift_omega);
        s.u[J].add(c.beta[J], 0, r.t2, r.shift2);
        s.u[J].add(c.gamma[J], 1, r.t2, r.shift2);
      }
      s.phi.add(c.sigma, 0, r.t2, r.shift2);
      s.phi.add(c.tau, 1, r.t2, r.shift2);
      break;
    case Case::V:
      for (int J = 0; J < N; ++J) {
        s.u[J].add(c.alpha[J], 0, r.omega, r.shift_omega);
        s.u[J].add(c.beta[J], 1, r.omega, r.shift_omega);
      }
      s.phi.add(c.sigma, 0, r.omega, r.shift_omega);
      s.phi.add(c.tau, 1, r.omega, r.shift_omega);
      break;
  }
  s.rho = s.phi.scaled(-1.0 / mode.lambda);
  return s;
}

ModeSolution solve_mode(const FluidParams& p, const TangentialMode& mode, const BoundaryTrace& trace) {
  return build_solution(p, mode, mode_coefficients(p, mode, trace));
}

double ResidualReport::pde() const { return std::max({mass, tangential, normal}); }

rvec default_sample_points(const RootData& r) {
  const double rate = r.min_re();
  rvec xs{0.0};
  for (int k = -6; k <= 5; ++k) xs.push_back(std::ldexp(1.0, k) / rate);
  return xs;
}

namespace {

VerticalProfile divergence(const TangentialMode& mode, const ModeSolution& sol) {
  const int n = mode.dim - 1;
  VerticalProfile d = sol.u[n].derivative(1);
  for (int j = 0; j < n; ++j) d.add(sol.u[j], I * mode.xi[j]);
  return d;
}

// max_x |sum pieces| / max_x sum |pieces|
struct EqAccumulator {
  double num = 0, den = 0, worst_x = 0;
  void add(double x, cd total, double scale) {
    const double a = std::abs(total);
    if (a > num) {
      num = a;
      worst_x = x;
    }
    den = std::max(den, scale);
  }
  double value() const { return den > 0 ? num / den : 0.0; }
};

}  // namespace

ResidualReport pde_residual(const FluidParams& p, const TangentialMode& mode, const ModeSolution& sol,
                            const BoundaryTrace& trace, const rvec& xs) {
  const int N = mode.dim, n = N - 1;
  const cd lam = mode.lambda;
  const double x2 = mode.xi2();
  const VerticalProfile div = divergence(mode, sol);
  const VerticalProfile Hrho = sol.rho.helmholtz(x2);
  const VerticalProfile dHrho = Hrho.derivative(1);
  const VerticalProfile ddiv = div.derivative(1);
  std::vector<VerticalProfile> Hu(N);
  for (int J = 0; J < N; ++J) Hu[J] = sol.u[J].helmholtz(x2);

  ResidualReport rep;
  EqAccumulator mass;
  std::vector<EqAccumulator> mom(N);
  for (double x : xs) {
    if (x < 0) throw DomainError("sample points must be nonnegative");
    const cd rx = sol.rho.eval(x);
    mass.add(x, lam * rx + div.eval(x), std::abs(lam) * sol.rho.abs_eval(x) + div.abs_eval(x));
    const cd dv = div.eval(x), hr = Hrho.eval(x);
    const double adv = div.abs_eval(x), ahr = Hrho.abs_eval(x);
    for (int j = 0; j < n; ++j) {
      const cd tot = lam * sol.u[j].eval(x) - p.mu * Hu[j].eval(x) - p.nu * I * mode.xi[j] * dv -
                     p.kappa * I * mode.xi[j] * hr;
      const double sc = std::abs(lam) * sol.u[j].abs_eval(x) + p.mu * Hu[j].abs_eval(x) +
                        p.nu * std::abs(mode.xi[j]) * adv + p.kappa * std::abs(mode.xi[j]) * ahr;
      mom[j].add(x, tot, sc);
    }
    const cd tot = lam * sol.u[n].eval(x) - p.mu * Hu[n].eval(x) - p.nu * ddiv.eval(x) -
                   p.kappa * dHrho.eval(x);
    const double sc = std::abs(lam) * sol.u[n].abs_eval(x) + p.mu * Hu[n].abs_eval(x) +
                      p.nu * ddiv.abs_eval(x) + p.kappa * dHrho.abs_eval(x);
    mom[n].add(x, tot, sc);
  }
  rep.mass = mass.value();
  rep.worst_component = "mass";
  rep.worst_x = mass.worst_x;
  double worst = rep.mass;
  for (int J = 0; J < N; ++J) {
    const double v = mom[J].value();
    if (J < n)
      rep.tangential = std::max(rep.tangential, v);
    else
      rep.normal = v;
    if (v > worst) {
      worst = v;
      rep.worst_component = "momentum_" + std::to_string(J + 1);
      rep.worst_x = mom[J].worst_x;
    }
  }

  // boundary: u_j(0) - h_j, u_N(0), d_N rho(0) + g
  double babs = 0, bscale = 0;
  const VerticalProfile drho = sol.rho.derivative(1);
  auto bc = [&](cd val, cd target, double termsum) {
    babs = std::max(babs, std::abs(val - target));
    bscale = std::max({bscale, std::abs(target), termsum});
  };
  for (int j = 0; j < n; ++j) bc(sol.u[j].at_zero(), trace.h_hat[j], sol.u[j].abs_eval(0.0));
  bc(sol.u[n].at_zero(), 0.0, sol.u[n].abs_eval(0.0));
  bc(drho.at_zero(), -trace.g_hat, drho.abs_eval(0.0));
  rep.bc_abs = babs;
  rep.bc_rel = bscale > 0 ? babs / bscale : 0.0;
  return rep;
}

namespace {

double identity_residual(const VerticalProfile& combo, double scale) {
  const VerticalProfile c = combo.canonical(1e-12);
  double m = 0;
  for (const Term& t : c.terms()) m = std::max(m, std::abs(t.c));
  return scale > 0 ? m / scale : m;
}

double coef_scale(const VerticalProfile& a) {
  double m = 0;
  for (const Term& t : a.terms()) m = std::max(m, std::abs(t.c));
  return m;
}

}  // namespace

IdentityReport profile_identities(const FluidParams& p, const TangentialMode& mode,
                                  const ModeSolution& sol) {
  IdentityReport rep;
  const cd lam = mode.lambda;
  const double x2 = mode.xi2();
  const VerticalProfile lr = sol.rho.scaled(lam);
  rep.mass = identity_residual(lr + sol.phi, std::max(coef_scale(lr), coef_scale(sol.phi)));
  const VerticalProfile div = divergence(mode, sol);
  rep.divergence = identity_residual(sol.phi - div, std::max(coef_scale(sol.phi), coef_scale(div)));
  const VerticalProfile h1 = sol.phi.helmholtz(x2);
  const VerticalProfile h2 = h1.helmholtz(x2);
  const VerticalProfile a = sol.phi.scaled(lam * lam);
  const VerticalProfile b = h1.scaled(-lam * (p.mu + p.nu));
  const VerticalProfile c = h2.scaled(p.kappa);
  const double sc = std::max({coef_scale(a), coef_scale(b), coef_scale(c)});
  rep.quartic = identity_residual(a + b + c, sc);
  return rep;
}

cvec assembled_fields(const FluidParams& p, const TangentialMode& mode, const BoundaryTrace& trace,
                      double x) {
  check_inputs(mode, trace);
  const SymbolPoint P(p, mode.xi, mode.lambda);
  const int N = mode.dim, n = N - 1;
  const cd lam = mode.lambda, G = trace.g_hat;
  const cd w = P.r.omega;
  const double x2 = P.xi2;
  const rvec& xi = mode.xi;
  const cvec& h = trace.h_hat;
  const cd ew = std::exp(-w * x);
  cvec out(N + 1, 0.0);
  cd& rho = out[0];
  auto u = [&](int J) -> cd& { return out[1 + J]; };
  for (int j = 0; j < n; ++j) u(j) = ew * h[j];

  switch (p.tag) {
    case Case::I:
    case Case::II: {
      const cd t1 = P.r.t1, t2 = P.r.t2, s1 = p.s1, s2 = p.s2;
      const cd e1 = std::exp(-t1 * x);
      const cd m1 = sym::m(P, 1), m2 = sym::m(P, 2);
      const cd M0 = confluent_M0(t1, t2, x);
      const cd dt = sym::t2_minus_t1(P);
      const cd tk[2] = {t1, t2}, sk[2] = {s1, s2}, mk[2] = {m1, m2};
      const cd Lk1[2] = {sym::L11(P), sym::L21(P)};
      cd Mk[2];
      for (int k = 0; k < 2; ++k) {
        const cd tmw = (sk[k] - p.mu_inv) * lam / (tk[k] + w);
        Mk[k] = tmw / dt * confluent_M0(tk[k], w, x);
      }
      for (int k = 1; k <= 2; ++k)
        rho += sk[k - 1] * (t2 + t1) * sym::p(P, k) * sym::n(P, k) / ((s2 - s1) * mk[k - 1]) * e1 * G;
      rho += s2 * (t2 + w) * Lk1[1] / m2 * M0 * G;
      for (int l = 0; l < n; ++l) {
        rho -= s1 * s2 * I * xi[l] * t1 * (t1 + w) / m1 * e1 * h[l];
        rho += s1 * s2 * I * xi[l] * t1 * t2 * (t2 + w) / m2 * M0 * h[l];
      }
      for (int k = 0; k < 2; ++k) {
        const double sgn = k == 0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) {
          u(j) -= I * xi[j] * (tk[k] + w) * Lk1[k] / mk[k] * Mk[k] * G;
          for (int l = 0; l < n; ++l)
            u(j) += sgn * s1 * s2 * xi[j] * xi[l] * t1 * t2 * (tk[k] + w) / (sk[k] * mk[k]) * Mk[k] * h[l];
        }
        u(n) += tk[k] * (tk[k] + w) * Lk1[k] / mk[k] * Mk[k] * G;
        for (int l = 0; l < n; ++l)
          u(n) += sgn * s1 * s2 * I * xi[l] * t1 * t2 * tk[k] * (tk[k] + w) / (sk[k] * mk[k]) * Mk[k] * h[l];
      }
      break;
    }
    case Case::III: {
      const cd to = P.t_other();
      const cd D = sym::d3(P);
      const cd M = kernel_M(w, to, x);
      const double ni = p.nu_inv;
      rho += to / D * ew * G + ni * lam / D * M * G;
      for (int k = 0; k < n; ++k) rho += -ni * I * xi[k] / D * ew * h[k] + ni * w * I * xi[k] / D * M * h[k];
      for (int j = 0; j < n; ++j) {
        u(j) -= I * xi[j] * lam / D * M * G;
        for (int k = 0; k < n; ++k) u(j) += xi[j] * xi[k] * w / D * M * h[k];
      }
      u(n) += to * lam / D * M * G;
      for (int k = 0; k < n; ++k) u(n) += to * w * I * xi[k] / D * M * h[k];
      break;
    }
    case Case::IV: {
      const cd t = P.r.t2;
      const cd q = sym::q(P), tmw = sym::t_minus_omega(P);
      const cd M11 = sym::M11(P), M12 = sym::M12(P), M21 = sym::M21(P), M22 = sym::M22(P);
      // M21/(t-omega) and M22/(t-omega) without the vanishing factor
      const cd A21 = -(2.0 * p.mu * (t + w) * w + (p.nu - p.mu) * x2);
      const cd A22 = -2.0 * p.mu * (t + w);
      const cd et = std::exp(-t * x), xet = x * et;
      const cd M = kernel_M(w, t, x);
      const double sc = (p.mu + p.nu) / (2 * p.kappa);
      rho -= (-(P.r.shift2 / tmw) * M11 / (t * q) + (t * t + x2) / (t * t * q) * A21) * et * G;
      rho += sc * lam / (t * q) * A21 * xet * G;
      for (int k = 0; k < n; ++k) {
        rho -= (4 * p.mu / (p.mu + p.nu)) * I * xi[k] * (t + w) / q * et * h[k];
        rho += sc * I * xi[k] * t / q * A22 * xet * h[k];
      }
      for (int j = 0; j < n; ++j) {
        u(j) -= (lam * I * xi[j] * M11 / (t * q) + lam * I * xi[j] * M21 / (t * t * q)) * M * G;
        u(j) -= lam * I * xi[j] / (t * q) * A21 * xet * G;
        for (int k = 0; k < n; ++k) {
          u(j) += (xi[j] * xi[k] * t * M12 / q + xi[j] * xi[k] * M22 / q) * M * h[k];
          u(j) += xi[j] * xi[k] * t / q * A22 * xet * h[k];
        }
      }
      u(n) += lam * M11 / q * M * G + lam / q * A21 * xet * G;
      for (int k = 0; k < n; ++k)
        u(n) += I * xi[k] * t * t * M12 / q * M * h[k] + I * xi[k] * t * t / q * A22 * xet * h[k];
      break;
    }
    case Case::V: {
      const cd D = sym::d5(P);
      const double mi = p.mu_inv;
      const cd xew = x * ew;
      rho += w / D * ew * G - mi * lam / D * xew * G;
      for (int k = 0; k < n; ++k) rho -= mi * I * xi[k] / D * ew * h[k] + mi * I * xi[k] * w / D * xew * h[k];
      for (int j = 0; j < n; ++j) {
        u(j) += I * xi[j] * lam / D * xew * G;
        for (int k = 0; k < n; ++k) u(j) -= xi[j] * xi[k] * w / D * xew * h[k];
      }
      u(n) -= lam * w / D * xew * G;
      for (int k = 0; k < n; ++k) u(n) -= I * xi[k] * w * w / D * xew * h[k];
      break;
    }
  }
  return out;
}

AssembledReport assembled_discrepancy(const FluidParams& p, const TangentialMode& mode,
                                      const BoundaryTrace& trace, const rvec& xs) {
  const ModeSolution sol = solve_mode(p, mode, trace);
  const int N = mode.dim;
  std::vector<cvec> a, b;
  for (double x : xs) {
    a.push_back(assembled_fields(p, mode, trace, x));
    cvec v(N + 1);
    v[0] = sol.rho.eval(x);
    for (int J = 0; J < N; ++J) v[1 + J] = sol.u[J].eval(x);
    b.push_back(v);
  }
  AssembledReport rep;
  for (int c = 0; c <= N; ++c) {
    double scale = 0;
    for (const auto& v : b) scale = std::max(scale, std::abs(v[c]));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double d = std::abs(a[i][c] - b[i][c]);
      const double rel = scale > 0 ? d / scale : d;
      if (rel > rep.max_rel) {
        rep.max_rel = rel;
        rep.worst_x = xs[i];
        rep.worst_component = c == 0 ? "rho" : "u_" + std::to_string(c);
      }
    }
  }
  return rep;
}

AssembledReport assembled_formula_check(const FluidParams& p, const TangentialMode& mode,
                                        const BoundaryTrace& trace, const rvec& xs) {
  AssembledReport rep = assembled_discrepancy(p, mode, trace, xs);
  if (!(rep.max_rel <= kAssembledTolerance))
    throw ToleranceError("assembled formula disagrees with the coefficient path: " + rep.worst_component +
                         " at x = " + std::to_string(rep.worst_x) + ", rel " + std::to_string(rep.max_rel));
  return rep;
}

}  // namespace hsr
