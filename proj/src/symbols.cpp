#include "hsr/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hsr {

SymbolPoint::SymbolPoint(const FluidParams& params, const rvec& xi_, cd lambda)
    : p(params), lam(lambda), xi(xi_) {
  TangentialMode mode;
  mode.xi = xi_;
  mode.lambda = lambda;
  mode.dim = static_cast<int>(xi_.size()) + 1;
  xi2 = mode.xi2();
  r = compute_roots(params, mode);
}

cd SymbolPoint::t_omega_minus_xi2(cd ta, cd sa) const {
  const cd w = r.omega;
  // (t_a w)^2 - |xi|^4 = |xi|^2 (s_a + 1/mu) lambda + s_a lambda^2 / mu
  return lam * ((sa - p.mu_inv) * w + p.mu_inv * (ta + w)) / (ta + w);
}

cd SymbolPoint::t_other() const {
  if (r.degeneracy == Degeneracy::t2_eq_omega) return r.t1;
  return r.t2;
}

cd SymbolPoint::s_other() const {
  if (r.degeneracy == Degeneracy::t2_eq_omega) return p.s1;
  return p.s2;
}

namespace sym {

namespace {
void need(const SymbolPoint& P, std::initializer_list<Case> cs, const char* what) {
  for (Case c : cs)
    if (P.p.tag == c) return;
  throw DomainError(std::string(what) + " is not defined in Case " + case_name(P.p.tag));
}
cd tk(const SymbolPoint& P, int k) { return k == 1 ? P.r.t1 : P.r.t2; }
cd sk(const SymbolPoint& P, int k) { return k == 1 ? P.p.s1 : P.p.s2; }
}  // namespace

cd m(const SymbolPoint& P, int k) {
  need(P, {Case::I, Case::II}, "m_k");
  const cd t1 = P.r.t1, t2 = P.r.t2, w = P.r.omega, t = tk(P, k), s = sk(P, k);
  const double mi = P.p.mu_inv;
  const cd quad = P.xi2 + P.r.shift1 + P.r.shift2 + t1 * t2;  // t2^2 + t1 t2 + t1^2 - |xi|^2
  return (s - mi) * t1 * t2 * w * (t2 + t1) - s * t * w * w * (t + w) + mi * t * (t + w) * quad;
}

cd m_raw(const SymbolPoint& P, int k) {
  need(P, {Case::I, Case::II}, "m_k");
  const cd t1 = P.r.t1, t2 = P.r.t2, w = P.r.omega, t = tk(P, k);
  const double x2 = P.xi2;
  const cd curly = t1 * t2 * w * (t2 + t1) - x2 * (t2 * t2 + t1 * t2 + t1 * t1 - x2);
  return t * (t + w) * curly / P.lam;
}

cd n(const SymbolPoint& P, int k) {
  need(P, {Case::I, Case::II}, "n_k");
  const cd t1 = P.r.t1, t2 = P.r.t2, w = P.r.omega;
  const double mi = P.p.mu_inv;
  if (k == 1) return -t1 * ((P.p.s2 - mi) * w + mi * (t2 + w));
  return t2 * ((P.p.s1 - mi) * w + mi * (t1 + w));
}

cd n_raw(const SymbolPoint& P, int k) {
  need(P, {Case::I, Case::II}, "n_k");
  const cd t1 = P.r.t1, t2 = P.r.t2, w = P.r.omega;
  if (k == 1) return (t2 + w) * (-t1 * (t2 * w - P.xi2)) / P.lam;
  return (t1 + w) * (t2 * (t1 * w - P.xi2)) / P.lam;
}

cd p(const SymbolPoint& P, int k) {
  need(P, {Case::I, Case::II}, "p_k");
  const cd a = P.r.t1 + P.r.omega, b = P.r.t2 + P.r.omega;
  return k == 1 ? a / b : b / a;
}

cd L11(const SymbolPoint& P) {
  need(P, {Case::I, Case::II}, "L11");
  return -P.r.t1 * P.t_omega_minus_xi2(P.r.t2, P.p.s2);
}
cd L12(const SymbolPoint& P) {
  need(P, {Case::I, Case::II}, "L12");
  return -P.r.shift2;
}
cd L21(const SymbolPoint& P) {
  need(P, {Case::I, Case::II}, "L21");
  return P.r.t2 * P.t_omega_minus_xi2(P.r.t1, P.p.s1);
}
cd L22(const SymbolPoint& P) {
  need(P, {Case::I, Case::II}, "L22");
  return P.r.shift1;
}

cd t2_minus_t1(const SymbolPoint& P) { return (P.p.s2 - P.p.s1) * P.lam / (P.r.t1 + P.r.t2); }

cd detL(const SymbolPoint& P) {
  need(P, {Case::I, Case::II}, "det L");
  // det L / (t2 - t1) = lambda m_1 / (t1 (t1 + omega))
  const cd curly = P.lam * m(P, 1) / (P.r.t1 * (P.r.t1 + P.r.omega));
  return t2_minus_t1(P) * curly;
}

cd detL_raw(const SymbolPoint& P) {
  need(P, {Case::I, Case::II}, "det L");
  const cd t1 = P.r.t1, t2 = P.r.t2, w = P.r.omega;
  const double x2 = P.xi2;
  const cd a = t1 * t1 - x2, b = t2 * t2 - x2;
  const cd c = -t2 * (t1 * w - x2), d = -t1 * (t2 * w - x2);
  return a * d - b * c;
}

cd t_minus_omega(const SymbolPoint& P) {
  need(P, {Case::III, Case::IV}, "t - omega");
  const cd t = P.t_other();
  return (P.s_other() - P.p.mu_inv) * P.lam / (t + P.r.omega);
}

cd q(const SymbolPoint& P) {
  need(P, {Case::IV}, "q");
  const cd t = P.r.t2, w = P.r.omega;
  const double mu = P.p.mu, nu = P.p.nu, x2 = P.xi2;
  return 2.0 * ((2.0 * mu * (t + w) * w + (nu - mu) * x2) * t - mu * (t + w) * x2);
}

cd M11(const SymbolPoint& P) {
  need(P, {Case::IV}, "M11");
  return (P.p.nu - P.p.mu) * P.xi2;
}
cd M12(const SymbolPoint& P) {
  need(P, {Case::IV}, "M12");
  return 2.0 * (P.p.nu - P.p.mu) * P.r.t2;
}
cd M21(const SymbolPoint& P) {
  need(P, {Case::IV}, "M21");
  const cd t = P.r.t2, w = P.r.omega;
  return -t_minus_omega(P) * (2.0 * P.p.mu * (t + w) * w + (P.p.nu - P.p.mu) * P.xi2);
}
cd M22(const SymbolPoint& P) {
  need(P, {Case::IV}, "M22");
  return -2.0 * P.p.mu * t_minus_omega(P) * (P.r.t2 + P.r.omega);
}

cd detM(const SymbolPoint& P) {
  need(P, {Case::IV}, "det M");
  return (P.p.nu - P.p.mu) * t_minus_omega(P) * q(P);
}

cd detM_raw(const SymbolPoint& P) {
  need(P, {Case::IV}, "det M");
  const cd t = P.r.t2, w = P.r.omega;
  const double mu = P.p.mu, nu = P.p.nu, x2 = P.xi2;
  const cd a = -2.0 * mu * (t - w) * (t + w);
  const cd b = -2.0 * (nu - mu) * t;
  const cd c = (t - w) * (2.0 * mu * w * (t + w) + (nu - mu) * x2);
  const cd d = (nu - mu) * x2;
  return a * d - b * c;
}

cd d3(const SymbolPoint& P) {
  need(P, {Case::III}, "d3");
  return P.t_other() * P.r.omega + P.p.nu_inv * P.lam;
}

cd d5(const SymbolPoint& P) {
  need(P, {Case::V}, "d5");
  return P.r.omega * P.r.omega + P.p.mu_inv * P.lam;
}

cd d5_alt(const SymbolPoint& P) {
  need(P, {Case::V}, "d5");
  return P.xi2 + 2.0 * P.p.mu_inv * P.lam;
}

}  // namespace sym

namespace {

struct Entry {
  double order;
  std::vector<Case> cases;
  std::function<cd(const SymbolPoint&)> f;
  std::function<cd(const SymbolPoint&)> alt;
};

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> reg = [] {
    std::map<std::string, Entry> r;
    const std::vector<Case> c12{Case::I, Case::II};
    r["m1"] = {4, c12, [](auto& P) { return sym::m(P, 1); }, [](auto& P) { return sym::m_raw(P, 1); }};
    r["m2"] = {4, c12, [](auto& P) { return sym::m(P, 2); }, [](auto& P) { return sym::m_raw(P, 2); }};
    r["m1_inv"] = {-4, c12, [](auto& P) { return 1.0 / sym::m(P, 1); }, {}};
    r["m2_inv"] = {-4, c12, [](auto& P) { return 1.0 / sym::m(P, 2); }, {}};
    r["n1"] = {2, c12, [](auto& P) { return sym::n(P, 1); }, [](auto& P) { return sym::n_raw(P, 1); }};
    r["n2"] = {2, c12, [](auto& P) { return sym::n(P, 2); }, [](auto& P) { return sym::n_raw(P, 2); }};
    r["p1"] = {0, c12, [](auto& P) { return sym::p(P, 1); }, {}};
    r["p2"] = {0, c12, [](auto& P) { return sym::p(P, 2); }, {}};
    r["L11"] = {3, c12, sym::L11, [](auto& P) { return -P.r.t1 * (P.r.t2 * P.r.omega - P.xi2); }};
    r["L12"] = {2, c12, sym::L12, [](auto& P) { return -(P.r.t2 * P.r.t2 - P.xi2); }};
    r["L21"] = {3, c12, sym::L21, [](auto& P) { return P.r.t2 * (P.r.t1 * P.r.omega - P.xi2); }};
    r["L22"] = {2, c12, sym::L22, [](auto& P) { return P.r.t1 * P.r.t1 - P.xi2; }};
    r["detL"] = {5, c12, sym::detL, sym::detL_raw};
    const std::vector<Case> c4{Case::IV};
    r["q"] = {3, c4, sym::q, {}};
    r["q_inv"] = {-3, c4, [](auto& P) { return 1.0 / sym::q(P); }, {}};
    r["M11"] = {2, c4, sym::M11, {}};
    r["M12"] = {1, c4, sym::M12, {}};
    r["M21"] = {3, c4, sym::M21, {}};
    r["M22"] = {2, c4, sym::M22, {}};
    r["detM"] = {4, c4, sym::detM, sym::detM_raw};
    r["d3"] = {2, {Case::III}, sym::d3, {}};
    r["d3_inv"] = {-2, {Case::III}, [](auto& P) { return 1.0 / sym::d3(P); }, {}};
    r["d5"] = {2, {Case::V}, sym::d5, sym::d5_alt};
    r["d5_inv"] = {-2, {Case::V}, [](auto& P) { return 1.0 / sym::d5(P); }, {}};
    return r;
  }();
  return reg;
}

}  // namespace

std::vector<std::string> named_symbols() {
  std::vector<std::string> v;
  for (auto& [k, e] : registry()) v.push_back(k);
  return v;
}

bool symbol_available(const std::string& name, Case c) {
  auto it = registry().find(name);
  if (it == registry().end()) return false;
  return std::find(it->second.cases.begin(), it->second.cases.end(), c) != it->second.cases.end();
}

SymbolSpec make_named_symbol(const FluidParams& params, const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) throw UsageError("unknown symbol name: " + name);
  if (!symbol_available(name, params.tag))
    throw DomainError("symbol " + name + " is unavailable in Case " + case_name(params.tag));
  const Entry e = it->second;
  SymbolSpec s;
  s.name = name;
  s.order = e.order;
  s.type = 1;
  s.eval = [params, f = e.f](const rvec& xi, cd lam) { return f(SymbolPoint(params, xi, lam)); };
  if (e.alt)
    s.alt_eval = [params, f = e.alt](const rvec& xi, cd lam) {
      return f(SymbolPoint(params, xi, lam));
    };
  return s;
}

SymbolSpec make_basic_symbol(const std::string& name) {
  SymbolSpec s;
  s.name = name;
  if (name == "one") {
    s.order = 0;
    s.eval = [](const rvec&, cd) { return cd(1.0); };
    return s;
  }
  if (name == "sqrt_lambda") {
    s.order = 1;
    s.eval = [](const rvec&, cd l) { return std::sqrt(l); };
    return s;
  }
  if (name.rfind("xi", 0) == 0) {
    std::size_t pos = 2;
    int k = 0;
    while (pos < name.size() && std::isdigit(static_cast<unsigned char>(name[pos])))
      k = 10 * k + (name[pos++] - '0');
    if (k < 1) throw UsageError("basic symbol index must be >= 1: " + name);
    const std::string rest = name.substr(pos);
    if (rest.empty()) {
      s.order = 1;
      s.eval = [k](const rvec& xi, cd) {
        if (static_cast<int>(xi.size()) < k) throw DomainError("xi index out of range");
        return cd(xi[k - 1]);
      };
      return s;
    }
    if (rest == "_over_abs") {
      s.order = 0;
      s.type = 2;
      s.eval = [k](const rvec& xi, cd) {
        if (static_cast<int>(xi.size()) < k) throw DomainError("xi index out of range");
        return cd(xi[k - 1] / norm2(xi));
      };
      return s;
    }
  }
  throw UsageError("unknown basic symbol: " + name);
}

SymbolSpec product(const SymbolSpec& a, const SymbolSpec& b) {
  SymbolSpec s;
  s.name = a.name + "*" + b.name;
  s.order = a.order + b.order;
  s.type = std::max(a.type, b.type);
  s.eval = [fa = a.eval, fb = b.eval](const rvec& xi, cd l) { return fa(xi, l) * fb(xi, l); };
  return s;
}

namespace {

constexpr double kLogLambdaStep = 1e-4;

cd derivative_rec(const SymbolFn& f, const rvec& xi, cd lam, std::vector<int> alpha, int n,
                  double delta) {
  if (n > 0) {
    const cd a = derivative_rec(f, xi, lam * std::exp(kLogLambdaStep), alpha, n - 1, delta);
    const cd b = derivative_rec(f, xi, lam * std::exp(-kLogLambdaStep), alpha, n - 1, delta);
    return (a - b) / (2 * kLogLambdaStep);
  }
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (alpha[k] == 0) continue;
    alpha[k] -= 1;
    rvec xp = xi, xm = xi;
    xp[k] += delta;
    xm[k] -= delta;
    const cd a = derivative_rec(f, xp, lam, alpha, 0, delta);
    const cd b = derivative_rec(f, xm, lam, alpha, 0, delta);
    return (a - b) / (2 * delta);
  }
  return f(xi, lam);
}

double step_for(const SymbolSpec& s, const rvec& xi, cd lam, double fd_step) {
  if (s.type == 2) return fd_step * norm2(xi);
  return fd_step * (std::sqrt(std::abs(lam)) + norm2(xi));
}

void multi_indices(int dim, int max_order, std::vector<std::vector<int>>& out) {
  std::vector<int> a(dim, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == dim) {
      out.push_back(a);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      a[pos] = v;
      rec(pos + 1, left - v);
    }
    a[pos] = 0;
  };
  rec(0, max_order);
  std::stable_sort(out.begin(), out.end(), [](auto& x, auto& y) {
    int sx = 0, sy = 0;
    for (int v : x) sx += v;
    for (int v : y) sy += v;
    return sx < sy;
  });
}

}  // namespace

cd symbol_derivative(const SymbolSpec& s, const rvec& xi, cd lambda, const std::vector<int>& alpha,
                     int n, double fd_step) {
  return derivative_rec(s.eval, xi, lambda, alpha, n, step_for(s, xi, lambda, fd_step));
}

bool ClassReport::stable() const {
  for (const auto& e : entries)
    if (!e.stable) return false;
  return true;
}

ClassReport verify_symbol_class(const SymbolSpec& s, const ScanGrid& grid, int max_multi_order,
                                Exec exec) {
  grid.validate();
  if (max_multi_order < 0 || max_multi_order > 2) throw UsageError("max_multi_order must be 0, 1 or 2");
  const int dim = static_cast<int>(grid.directions.at(0).size());
  std::vector<std::vector<int>> alphas;
  multi_indices(dim, max_multi_order, alphas);
  const std::size_t npts = grid.size();
  const std::size_t ne = alphas.size() * 2;

  std::vector<double> vals(npts * ne, 0.0);
  std::vector<int> bands(npts);
  std::vector<std::string> errors(npts);
  for_each_index(npts, exec, [&](std::size_t i) {
    auto [xi, lam] = grid.point(i);
    const double xn = norm2(xi);
    const double scale = std::sqrt(std::abs(lam)) + xn;
    bands[i] = dyadic_band(scale);
    try {
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        int abs_a = 0;
        for (int v : alphas[a]) abs_a += v;
        if (s.type == 2 && xn == 0.0) continue;
        for (int n = 0; n <= 1; ++n) {
          const cd d = symbol_derivative(s, xi, lam, alphas[a], n, grid.fd_step);
          if (!std::isfinite(d.real()) || !std::isfinite(d.imag())) {
            std::ostringstream os;
            os << "non-finite symbol value for " << s.name << " at |xi'|=" << xn << ", lambda=" << lam;
            errors[i] = os.str();
            return;
          }
          double shape = s.type == 1 ? std::pow(scale, s.order - abs_a)
                                     : std::pow(scale, s.order) * std::pow(xn, -abs_a);
          vals[i * ne + a * 2 + n] = std::abs(d) / shape;
        }
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw EvaluationError(e);

  // bands covering the full range of xi'/(|lambda|^{1/2}+|xi'|) ratios on this grid
  double xlo = std::numeric_limits<double>::infinity(), xhi = 0;
  for (double x : grid.xi_magnitudes) {
    if (x > 0) xlo = std::min(xlo, x);
    xhi = std::max(xhi, x);
  }
  double llo = std::sqrt(*std::min_element(grid.lambda_magnitudes.begin(), grid.lambda_magnitudes.end()));
  double lhi = std::sqrt(*std::max_element(grid.lambda_magnitudes.begin(), grid.lambda_magnitudes.end()));
  const double lo = 1e3 * std::max(xlo, llo), hi = std::min(xhi, lhi);

  ClassReport rep;
  rep.name = s.name;
  rep.order = s.order;
  rep.type = s.type;
  std::vector<int> adm;
  for (int b = dyadic_band(lo) + 1; std::ldexp(1.0, b + 1) <= hi; ++b) adm.push_back(b);
  rep.admissible_bands = adm;

  for (std::size_t a = 0; a < alphas.size(); ++a)
    for (int n = 0; n <= 1; ++n) {
      ClassEntry e;
      e.alpha = alphas[a];
      e.n = n;
      for (std::size_t i = 0; i < npts; ++i) {
        const double v = vals[i * ne + a * 2 + n];
        e.constant = std::max(e.constant, v);
        auto& bm = e.band_max[bands[i]];
        bm = std::max(bm, v);
      }
      e.vanishing = e.constant <= 1e-7;
      if (!e.vanishing) {
        std::vector<double> use;
        for (auto& [b, v] : e.band_max)
          if (adm.empty() || std::find(adm.begin(), adm.end(), b) != adm.end()) use.push_back(v);
        if (!use.empty()) {
          const double mx = *std::max_element(use.begin(), use.end());
          const double mn = *std::min_element(use.begin(), use.end());
          e.stable = mn > 0 && mx / mn <= 2.0;
        }
      }
      rep.entries.push_back(e);
    }
  return rep;
}

cd asymptotic_limit(const FluidParams& params, int k, Regime regime, const rvec& xi, cd lambda) {
  if (params.tag != Case::I && params.tag != Case::II)
    throw DomainError("asymptotic constants of m_k exist only in Cases I/II");
  if (regime == Regime::xi_dominant) {
    const double x2 = norm2(xi) * norm2(xi);
    return 2.0 * params.mu_inv * x2 * x2;
  }
  const cd r1 = std::sqrt(params.s1), r2 = std::sqrt(params.s2), rk = k == 1 ? r1 : r2;
  const double rm = std::sqrt(params.mu_inv);
  return rk * (rk + rm) * r2 * r1 * rm * (r2 + r1) * lambda * lambda;
}

AsymptoticReport asymptotic_check(const FluidParams& params, const std::string& name, Regime regime,
                                  const rvec& ys, double base, double lambda_arg) {
  if (name != "m1" && name != "m2") throw DomainError("asymptotic check is defined for m1 and m2");
  if (params.tag != Case::I && params.tag != Case::II)
    throw DomainError("asymptotic check requires Case I or II");
  if (!(std::abs(lambda_arg) < M_PI / 2)) throw DomainError("regime ray leaves Re lambda > 0");
  const int k = name == "m1" ? 1 : 2;
  AsymptoticReport rep{name, regime, {}};
  for (double y : ys) {
    if (!(y >= 0)) throw DomainError("negative regime parameter");
    rvec xi(1);
    cd lam;
    if (regime == Regime::xi_dominant) {
      if (y == 0) throw DomainError("xi-dominant ray needs lambda != 0");
      xi[0] = base;
      lam = std::polar(y * base * base, lambda_arg);
    } else {
      lam = std::polar(base, lambda_arg);
      xi[0] = std::sqrt(y * base);
    }
    const SymbolPoint P(params, xi, lam);
    rep.ratios.emplace_back(y, sym::m(P, k) / asymptotic_limit(params, k, regime, xi, lam));
  }
  return rep;
}

}  // namespace hsr
