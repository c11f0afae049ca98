// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_complex.hpp>

#include "hsr/field_pipeline.hpp"
#include "hsr/lopatinski.hpp"
#include "hsr/mode_solver.hpp"
#include "hsr/oracle_bvp.hpp"
#include "hsr/rbound.hpp"
#include "hsr/scan_grid.hpp"
#include "hsr/symbols.hpp"
#include "hsr/vertical_kernels.hpp"
#include "support/hp_reference.hpp"
#include "support/manufactured.hpp"

using namespace hsr;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const std::vector<std::array<double, 3>> kCaseParams{{1, 1, 2}, {3, 1, 1}, {2, 1, 2}, {3, 1, 4}, {1, 1, 1}};

std::string num(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", x);
  return b;
}

struct Draw {
  FluidParams p;
  TangentialMode m;
  BoundaryTrace tr;
};

// 5 parameter sets x 20 modes with log-uniform |xi'|, |lambda| in [1e-2, 1e2] and arg lambda in (-1.4, 1.4)
std::vector<Draw> mode_sweep() {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> lx(-2, 2), arg(-1.4, 1.4), u(-1, 1);
  std::vector<Draw> out;
  for (const auto& pr : kCaseParams) {
    const FluidParams p = classify(pr[0], pr[1], pr[2]);
    for (int i = 0; i < 20; ++i) {
      const double xi = std::pow(10.0, lx(rng));
      const cd lam = std::polar(std::pow(10.0, lx(rng)), arg(rng));
      out.push_back({p, make_mode({xi}, lam, &p), {cd(u(rng), u(rng)), {cd(u(rng), u(rng))}}});
    }
  }
  return out;
}

rvec dense_points(const RootData& r) {
  rvec xs = default_sample_points(r);
  for (int i = 1; i < 64; ++i) xs.push_back(20.0 / r.min_re() * i / 63.0);
  return xs;
}

Outcome closed_form_residuals() {
  double pde = 0, bc = 0;
  for (const Draw& d : mode_sweep()) {
    const ModeSolution s = solve_mode(d.p, d.m, d.tr);
    const ResidualReport r = pde_residual(d.p, d.m, s, d.tr, dense_points(s.roots));
    pde = std::max(pde, r.pde());
    bc = std::max(bc, r.bc_rel);
  }
  return {pde <= 1e-10 && bc <= 1e-12, "max pde " + num(pde) + ", max bc " + num(bc) + " over 100 modes"};
}

Outcome dual_derivation() {
  double worst = 0;
  for (const Draw& d : mode_sweep())
    worst = std::max(worst, assembled_discrepancy(d.p, d.m, d.tr, dense_points(compute_roots(d.p, d.m))).max_rel);
  return {worst <= 1e-8, "max discrepancy " + num(worst) + " over 100 modes"};
}

Outcome oracle_equivalence() {
  const std::vector<std::pair<double, cd>> modes{{1.0, 1.0}, {0.5, cd(1, 0.5)}, {2.0, cd(0.5, -0.5)}};
  const BoundaryTrace tr{cd(1, 0.5), {cd(0.3, -0.2)}};
  double worst = 0, order_dev = 0;
  for (const auto& pr : kCaseParams) {
    const FluidParams p = classify(pr[0], pr[1], pr[2]);
    for (const auto& [xi, lam] : modes) {
      const TangentialMode m = make_mode({xi}, lam, &p);
      BvpConfig cfg;
      cfg.n = 4096;
      const BvpComparison c = compare_with_closed_form(solve_mode_bvp(p, m, tr, cfg), solve_mode(p, m, tr));
      worst = std::max(worst, c.max_rel);
    }
    const TangentialMode m = make_mode({modes[0].first}, modes[0].second, &p);
    const ConvergenceReport r = convergence_study(p, m, tr, {256, 512, 1024});
    order_dev = std::max(order_dev, r.inconclusive ? INFINITY : std::abs(r.order - 2.0));
  }
  return {worst <= 1e-4 && order_dev <= 0.3,
          "max rel error " + num(worst) + " on 15 modes, max |order - 2| " + num(order_dev)};
}

Outcome lopatinski_positivity() {
  const ScanGrid g = ScanGrid::log_grid(1e-2, 1e2, 40, 1e-2, 1e2, 40, 5, 1.4);
  const ScanGrid fine = g.refined();
  struct Item {
    std::array<double, 3> params;
    const char* name;
    double power;
  };
  const std::vector<Item> items{{{1, 1, 2}, "m1", 4}, {{1, 1, 2}, "m2", 4}, {{3, 1, 1}, "m1", 4},
                                {{3, 1, 1}, "m2", 4}, {{2, 1, 2}, "d3", 2}, {{3, 1, 4}, "q", 3},
                                {{1, 1, 1}, "d5", 2}};
  bool ok = true;
  double lowest = INFINITY, change = 0;
  for (const Item& it : items) {
    const FluidParams p = classify(it.params[0], it.params[1], it.params[2]);
    const LowerBoundReport a = lower_bound_scan(p, it.name, g, it.power);
    const LowerBoundReport b = lower_bound_scan(p, it.name, fine, it.power);
    const double c = std::abs(b.inf - a.inf) / a.inf;
    ok = ok && a.inf > 0 && !a.potential_zero && !b.potential_zero && c <= 0.1;
    lowest = std::min(lowest, a.inf);
    change = std::max(change, c);
  }
  return {ok, "smallest normalized inf " + num(lowest) + ", max refinement change " + num(100 * change) + "%"};
}

// leading behaviour of m_k for |xi'|^2 << |lambda|, from the root structure
cd lambda_dominant_product(const FluidParams& p, int k, cd lam) {
  const cd a = std::sqrt(p.s1), b = std::sqrt(p.s2), w = std::sqrt(1.0 / p.mu);
  const cd sk = k == 1 ? a : b;
  return sk * (sk + w) * b * a * w * (b + a) * lam * lam;
}

Outcome asymptotic_constants() {
  double worst = 0;
  for (const auto& pr : {kCaseParams[0], kCaseParams[1]}) {
    const FluidParams p = classify(pr[0], pr[1], pr[2]);
    for (int k : {1, 2})
      for (double a : {0.0, 1.0, -1.0}) {
        for (double y : {1e-4, 1e-6, 1e-8}) {
          // |lambda| / |xi'|^2 = y
          const double xi = 3.0;
          const cd v = sym::m(SymbolPoint(p, {xi}, std::polar(y * xi * xi, a)), k);
          worst = std::max(worst, std::abs(v / (2.0 / p.mu * std::pow(xi, 4)) - 1.0));
          // |xi'|^2 / |lambda| = y
          const cd lam = std::polar(5.0, a);
          const cd w = sym::m(SymbolPoint(p, {std::sqrt(y * 5.0)}, lam), k);
          worst = std::max(worst, std::abs(w / lambda_dominant_product(p, k, lam) - 1.0));
        }
      }
  }
  return {worst <= 0.01, "max deviation from the limit constants " + num(100 * worst) + "%"};
}

Outcome algebraic_identities() {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> lx(-2, 2), arg(-1.4, 1.4), lp(-1, 1);
  auto rel = [](cd a, cd b) { return std::abs(a - b) / std::abs(b); };
  double md = 0, nd = 0, dm = 0, vt = 0;
  const FluidParams p12[] = {classify(1, 1, 2), classify(3, 1, 1)};
  const FluidParams p4 = classify(3, 1, 4);
  for (int i = 0; i < 10000; ++i) {
    const double xi = std::pow(10.0, lx(rng));
    const cd lam = std::polar(std::pow(10.0, lx(rng)), arg(rng));
    const FluidParams& p = p12[i % 2];
    const SymbolPoint P(p, {xi}, lam);
    const hpref::Point R(p, {xi}, lam);
    const int k = 1 + (i / 2) % 2;
    md = std::max(md, rel(sym::m(P, k), hpref::D(R.m_raw(k))));
    nd = std::max(nd, rel(sym::n(P, k), hpref::D(R.n_raw(k))));

    const SymbolPoint Q(p4, {xi}, lam);
    const cd fact = (p4.nu - p4.mu) * sym::t_minus_omega(Q) * sym::q(Q);
    dm = std::max(dm, rel(fact, hpref::D(hpref::Point(p4, {xi}, lam).detM_raw())));

    const FluidParams r = classify(std::pow(10.0, lp(rng)), std::pow(10.0, lp(rng)), std::pow(10.0, lp(rng)));
    vt = std::max(vt, std::abs(r.s1 + r.s2 - (r.mu + r.nu) / r.kappa) / (std::abs(r.s1) + std::abs(r.s2)));
    vt = std::max(vt, std::abs(r.s1 * r.s2 - 1.0 / r.kappa) / std::abs(r.s1 * r.s2));
  }
  const double worst = std::max({md, nd, dm, vt});
  return {worst <= 1e-12, "m dual " + num(md) + ", n dual " + num(nd) + ", det M factorization " + num(dm) +
                              ", Vieta " + num(vt) + " over 1e4 points each"};
}

Outcome confluent_kernels() {
  using hp = boost::multiprecision::cpp_complex_50;
  const cd bases[] = {1.0, cd(1, 0.5), cd(3, -2), 0.2};
  const cd dirs[] = {1.0, cd(0, 1), cd(1, 1) / std::sqrt(2.0), cd(-1, 0.3)};
  double worst = 0;
  for (cd t1 : bases)
    for (cd dir : dirs)
      for (double x : {0.5, 1.0, 4.0}) {
        rvec steps = logspace(1e-14, 1.0, 57);
        // both sides of the series switch
        for (double f : {0.999999, 1.0, 1.000001}) steps.push_back(f * kConfluentSwitch);
        for (double s : steps) {
          const cd t2 = t1 + dir * (s / x);
          const hp a = hpref::H(t1), b = hpref::H(t2), X(x);
          const cd ref = hpref::D((exp(-b * X) - exp(-a * X)) / (b - a));
          worst = std::max(worst, std::abs(confluent_M0(t1, t2, x) - ref) / std::abs(ref));
        }
      }
  for (cd dir : dirs)
    for (double f : {0.5, 0.999999, 1.0, 1.000001, 2.0})
      for (double sg : {1.0, -1.0}) {
        const cd z = sg * dir * (f * kConfluentSwitch);
        const hp w = hpref::H(z);
        const cd ref = hpref::D((exp(w) - hp(1)) / w);
        worst = std::max(worst, std::abs(phi1(z) - ref) / std::abs(ref));
      }
  return {worst <= 1e-12, "max relative error " + num(worst) + " for |dt| x in [1e-14, 1]"};
}

double profile_gap(const ModeSolution& a, const ModeSolution& b) {
  double diff = 0, scale = 0;
  for (double x : default_sample_points(a.roots)) {
    std::vector<std::pair<cd, cd>> vals{{a.rho.eval(x), b.rho.eval(x)}};
    for (std::size_t j = 0; j < a.u.size(); ++j) vals.push_back({a.u[j].eval(x), b.u[j].eval(x)});
    for (const auto& [u, v] : vals) {
      diff = std::max(diff, std::abs(u - v));
      scale = std::max(scale, std::abs(v));
    }
  }
  return diff / scale;
}

Outcome case_boundaries() {
  const std::vector<std::pair<FluidParams, FluidParams>> pairs{
      {classify(3, 1, 4 * (1 - 1e-6)), classify(3, 1, 4)}, {classify(1, 1, 1 + 1e-6), classify(1, 1, 1)}};
  bool tags = pairs[0].first.tag == Case::II && pairs[0].second.tag == Case::IV &&
              pairs[1].first.tag == Case::I && pairs[1].second.tag == Case::V;
  double worst = 0;
  for (const auto& [near, on] : pairs)
    for (int i = 0; i < 10; ++i) {
      const double xi = 0.05 * std::pow(2.0, i);
      const cd lam = std::polar(0.3 * std::pow(1.8, i), -1.2 + 0.25 * i);
      const BoundaryTrace tr{cd(1, -0.3 * i), {cd(0.2 * i, 0.5)}};
      const ModeSolution a = solve_mode(near, make_mode({xi}, lam, &near), tr);
      const ModeSolution b = solve_mode(on, make_mode({xi}, lam, &on), tr);
      worst = std::max(worst, profile_gap(a, b));
    }
  return {tags && worst <= 1e-3, "max relative gap " + num(worst) + " at 10 modes per boundary"};
}

Outcome full_pipeline() {
  const FluidParams p = classify(1, 1, 2);
  const cd lam = 1.0;
  mms::Manufactured M(p, lam);
  rvec errs;
  double un = 0;
  for (int P : {64, 128, 256}) {
    GridSpec s;
    s.dim = 2;
    s.half_length = 40;
    s.points = P;
    s.L = default_vertical_length(p, lam);
    s.nz = 257;
    const ResolventResult r =
        solve_resolvent(p, s, M.sample(s, M.d), {M.sample(s, M.f1), M.sample(s, M.f2)}, M.sample_g(s), lam);
    // compare on a common set of nodes shared by all three grids
    std::vector<double> xs, zs;
    std::vector<int> ix, iz;
    for (int i = 0; i < P; i += P / 64) {
      xs.push_back(s.coord(i));
      ix.push_back(i);
    }
    for (int k = 0; k < s.nz; k += 4) {
      zs.push_back(s.z(k));
      iz.push_back(k);
    }
    const auto ref = M.boundary_reference(xs, zs);
    const mms::PolyGauss* whole[3] = {&M.rho, &M.u1, &M.u2};
    const GridField* got[3] = {&r.rho, &r.u[0], &r.u[1]};
    double e = 0;
    for (int c = 0; c < 3; ++c) {
      double err = 0, sc = 0;
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t k = 0; k < zs.size(); ++k) {
          const cd v = (*whole[c])(xs[i], zs[k]) + ref[c][i][k];
          sc = std::max(sc, std::abs(v));
          err = std::max(err, std::abs(v - got[c]->at(ix[i], iz[k])));
        }
      e = std::max(e, err / sc);
    }
    errs.push_back(e);
    if (P == 256) un = r.un_trace;
  }
  const bool mono = errs[1] < errs[0] && errs[2] < errs[1];
  return {errs[2] <= 1e-6 && un <= 1e-10 && mono,
          "errors " + num(errs[0]) + " / " + num(errs[1]) + " / " + num(errs[2]) + " at 64/128/256, U_N trace " + num(un)};
}

Outcome rbound_probe() {
  const FluidParams p = classify(1, 1, 2);
  const ProbeGrid g;
  ProbeConfig cfg;
  cfg.m = 8;
  cfg.trials = 200;
  const int draws = cfg.draws_for(g);
  bool ok = true;
  std::string detail;

  const ProbeReport id = estimate_rbound(identity_family(p, FamilyKind::A2, g), shell_sampler(g, FamilyKind::A2), cfg, 2);
  double dev = 0;
  for (const auto& d : id.decades) dev = std::max({dev, std::abs(d.max_ratio - 1), std::abs(d.min_ratio - 1)});
  ok = ok && dev <= 1e-12;
  detail += "identity " + num(dev);

  for (FamilyKind k : {FamilyKind::A2, FamilyKind::B2}) {
    const ProbeFamily f = make_family(p, k, g);
    const ProbeSampler s = shell_sampler(g, k);
    const ProbeReport a = estimate_rbound(f, s, cfg, draws);
    const ProbeReport b = estimate_rbound(lambda_log_derivative(f, 1e-3), s, cfg, draws);
    ok = ok && a.spread <= 10 && b.spread <= 10;
    detail += ", " + family_name(k) + " spread " + num(a.spread) + " (dlog " + num(b.spread) + ")";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {"closed-form residuals", 5, closed_form_residuals},
      {"dual-derivation agreement", 10, dual_derivation},
      {"oracle equivalence", 60, oracle_equivalence},
      {"Lopatinski positivity and stability", 30, lopatinski_positivity},
      {"asymptotic constants", 5, asymptotic_constants},
      {"algebraic identities", 5, algebraic_identities},
      {"confluent kernels", 2, confluent_kernels},
      {"case-boundary continuity", 5, case_boundaries},
      {"full pipeline", 60, full_pipeline},
      {"R-bound probe", 120, rbound_probe},
  };
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && sec < all[i].budget;
    failed += !pass;
    std::printf("%s %2zu %s: %s; %.2f s (budget %g s)\n", pass ? "PASS" : "FAIL", i + 1, all[i].name,
                o.detail.c_str(), sec, all[i].budget);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}
