#include "hsr/spectral_core.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "hsr/parallel.hpp"
#include "hsr/scan_grid.hpp"

namespace hsr {

cd principal_sqrt(cd z) {
  if (z.imag() == 0.0 && z.real() <= 0.0) throw BranchError("square root radicand on the branch cut");
  return std::sqrt(z);
}

double norm2(const rvec& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string case_name(Case c) {
  switch (c) {
    case Case::I: return "I";
    case Case::II: return "II";
    case Case::III: return "III";
    case Case::IV: return "IV";
    case Case::V: return "V";
  }
  return "?";
}

std::string degeneracy_name(Degeneracy d) {
  switch (d) {
    case Degeneracy::distinct: return "distinct";
    case Degeneracy::t1_eq_omega: return "t1_eq_omega";
    case Degeneracy::t2_eq_omega: return "t2_eq_omega";
    case Degeneracy::t1_eq_t2: return "t1_eq_t2";
    case Degeneracy::all_equal: return "all_equal";
  }
  return "?";
}

namespace {

void set_roots(FluidParams& p) {
  const double c = (p.mu + p.nu) / (2 * p.kappa);
  switch (p.tag) {
    case Case::I: {
      const double w = std::sqrt(-p.eta);
      p.s1 = cd(c, -w);
      p.s2 = cd(c, w);
      break;
    }
    case Case::II: {
      // larger root directly, smaller one from Vieta to avoid cancellation
      const double s2 = c + std::sqrt(p.eta);
      p.s2 = s2;
      p.s1 = (1.0 / p.kappa) / s2;
      break;
    }
    case Case::III:
      if (p.mu > p.nu) {
        p.s1 = p.mu_inv;
        p.s2 = p.nu_inv;
      } else {
        p.s1 = p.nu_inv;
        p.s2 = p.mu_inv;
      }
      break;
    case Case::IV:
      p.s1 = p.s2 = c;
      break;
    case Case::V:
      p.s1 = p.s2 = p.mu_inv;
      break;
  }
}

void check_positive(double mu, double nu, double kappa) {
  if (!(mu > 0) || !(nu > 0) || !(kappa > 0) || !std::isfinite(mu) || !std::isfinite(nu) ||
      !std::isfinite(kappa))
    throw DomainError("viscosities and capillarity must be positive and finite");
}

}  // namespace

FluidParams classify(double mu, double nu, double kappa, double tol) {
  check_positive(mu, nu, kappa);
  if (!(tol >= 0)) throw DomainError("classification tolerance must be non-negative");
  FluidParams p;
  p.mu = mu;
  p.nu = nu;
  p.kappa = kappa;
  p.mu_inv = 1.0 / mu;
  p.nu_inv = 1.0 / nu;
  const double c = (mu + nu) / (2 * kappa);
  p.eta = c * c - 1.0 / kappa;
  const bool eta_zero = std::abs(p.eta) <= tol * std::max(1.0, c * c);
  const bool k_eq = std::abs(kappa - mu * nu) <= tol * mu * nu;
  if (eta_zero)
    p.tag = k_eq ? Case::V : Case::IV;
  else if (p.eta < 0)
    p.tag = Case::I;
  else
    p.tag = k_eq ? Case::III : Case::II;
  if (eta_zero) p.eta = 0.0;
  set_roots(p);
  return p;
}

FluidParams classify_exact(Rational mu, Rational nu, Rational kappa) {
  using boost::multiprecision::cpp_int;
  auto norm = [](Rational r) {
    if (r.den == 0) throw DomainError("zero denominator");
    if (r.den < 0) {
      r.den = -r.den;
      r.num = -r.num;
    }
    if (r.num <= 0) throw DomainError("viscosities and capillarity must be positive");
    return r;
  };
  mu = norm(mu);
  nu = norm(nu);
  kappa = norm(kappa);
  const cpp_int a = mu.num, b = mu.den, c = nu.num, d = nu.den, e = kappa.num, f = kappa.den;
  // (mu+nu)^2 - 4 kappa has the sign of eta
  const cpp_int s = a * d + c * b, bd = b * d;
  const cpp_int numer = s * s * f - 4 * e * bd * bd;
  const bool k_eq = (e * b * d == a * c * f);

  FluidParams p;
  p.mu = mu.value();
  p.nu = nu.value();
  p.kappa = kappa.value();
  p.mu_inv = double(mu.den) / double(mu.num);
  p.nu_inv = double(nu.den) / double(nu.num);
  p.exact_path = true;
  if (numer == 0)
    p.tag = k_eq ? Case::V : Case::IV;
  else if (numer < 0)
    p.tag = Case::I;
  else
    p.tag = k_eq ? Case::III : Case::II;
  // eta = numer * f / (4 e^2 (bd)^2)
  if (numer == 0) {
    p.eta = 0.0;
  } else {
    const cpp_int den = 4 * e * e * bd * bd;
    const cpp_int num2 = numer * f;
    p.eta = static_cast<double>(num2) / static_cast<double>(den);
  }
  set_roots(p);
  return p;
}

double TangentialMode::xi2() const {
  double s = 0;
  for (double x : xi) s += x * x;
  return s;
}

double TangentialMode::xi_norm() const { return std::sqrt(xi2()); }

TangentialMode make_mode(const rvec& xi, cd lambda, const FluidParams* params, ModeOptions opt) {
  if (xi.empty()) throw DomainError("tangential frequency needs N-1 >= 1 components");
  for (double x : xi)
    if (!std::isfinite(x)) throw DomainError("non-finite tangential frequency");
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()) || lambda == 0.0)
    throw DomainError("lambda must be finite and non-zero");
  if (opt.sector) {
    if (params && !(opt.eps > params->eps_star()))
      throw DomainError("sector margin must exceed arg s2");
    if (!(std::abs(std::arg(lambda)) < std::numbers::pi - opt.eps))
      throw DomainError("lambda outside the sector");
  } else if (!(lambda.real() > 0)) {
    throw DomainError("lambda must satisfy Re lambda > 0");
  }
  TangentialMode m;
  m.xi = xi;
  m.lambda = lambda;
  m.dim = static_cast<int>(xi.size()) + 1;
  return m;
}

double RootData::min_re() const {
  return std::min({t1.real(), t2.real(), omega.real()});
}

RootData compute_roots(const FluidParams& p, const TangentialMode& m) {
  const double x2 = m.xi2();
  RootData r;
  r.shift1 = p.s1 * m.lambda;
  r.shift2 = p.s2 * m.lambda;
  r.shift_omega = p.mu_inv * m.lambda;
  r.t1 = principal_sqrt(x2 + r.shift1);
  r.t2 = principal_sqrt(x2 + r.shift2);
  r.omega = principal_sqrt(x2 + r.shift_omega);
  switch (p.tag) {
    case Case::I:
    case Case::II:
      r.degeneracy = Degeneracy::distinct;
      break;
    case Case::III:
      r.degeneracy = (p.s1 == p.mu_inv) ? Degeneracy::t1_eq_omega : Degeneracy::t2_eq_omega;
      break;
    case Case::IV:
      r.degeneracy = Degeneracy::t1_eq_t2;
      break;
    case Case::V:
      r.degeneracy = Degeneracy::all_equal;
      break;
  }
  return r;
}

cd char_poly(const FluidParams& p, const TangentialMode& m, cd t) {
  const cd w = t * t - m.xi2();
  const cd l = m.lambda;
  return l * l - l * (p.mu + p.nu) * w + p.kappa * w * w;
}

RootBoundReport root_lower_bound_scan(const FluidParams& p, const ScanGrid& grid, bool keep_rows) {
  grid.validate();
  const std::size_t n = grid.size();
  std::vector<RootBoundReport::Row> rows(n);
  for_each_index(n, Exec::parallel, [&](std::size_t i) {
    auto [xi, lam] = grid.point(i);
    TangentialMode m;
    m.xi = xi;
    m.lambda = lam;
    m.dim = static_cast<int>(xi.size()) + 1;
    const RootData r = compute_roots(p, m);
    const double scale = std::sqrt(std::abs(lam)) + norm2(xi);
    rows[i] = {xi, lam, r.t1.real() / scale, r.t2.real() / scale, r.omega.real() / scale};
  });
  RootBoundReport rep;
  rep.points = n;
  rep.inf_t1 = rep.inf_t2 = rep.inf_omega = std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    rep.inf_t1 = std::min(rep.inf_t1, row.r1);
    rep.inf_t2 = std::min(rep.inf_t2, row.r2);
    rep.inf_omega = std::min(rep.inf_omega, row.rw);
    const double w = std::min({row.r1, row.r2, row.rw});
    if (w < worst) {
      worst = w;
      rep.argmin_xi = row.xi;
      rep.argmin_lambda = row.lambda;
    }
  }
  if (keep_rows) rep.rows = std::move(rows);
  return rep;
}

}  // namespace hsr
