#include "hsr/oracle_bvp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace hsr {

double default_bvp_length(const RootData& r) { return 40.0 / r.min_re(); }

void BvpConfig::validate(const RootData& r) const {
  if (n < 64) throw ConfigError("oracle grid needs n >= 64 intervals");
  if (L > 0 && L < 10.0 / r.min_re()) throw ConfigError("oracle interval shorter than 10 / min Re rate");
}

namespace {

using Mat = std::vector<cd>;  // row-major d x d

Mat companion(const FluidParams& p, const TangentialMode& mode, int d) {
  const int N = mode.dim, n = N - 1;
  const cd lam = mode.lambda;
  const double x2 = mode.xi2();
  const double mu = p.mu, nu = p.nu, ka = p.kappa;
  const cd w2 = x2 + lam / mu;
  Mat A(d * d, 0.0);
  auto a = [&](int r, int c) -> cd& { return A[r * d + c]; };
  const int V = N, F = 2 * N;
  for (int J = 0; J < N; ++J) {
    a(J, V + J) = 1.0;
    a(V + J, J) = w2;
  }
  const cd c0 = (nu * lam + ka * x2) / (mu * lam);
  const cd c2 = ka / (mu * lam);
  for (int j = 0; j < n; ++j) {
    a(V + j, F) = -I * mode.xi[j] * c0;
    a(V + j, F + 2) = I * mode.xi[j] * c2;
  }
  a(V + n, F + 1) = -c0;
  a(V + n, F + 3) = c2;
  a(F, F + 1) = 1.0;
  a(F + 1, F + 2) = 1.0;
  a(F + 2, F + 3) = 1.0;
  const cd b = lam * (mu + nu) / ka;
  a(F + 3, F) = -x2 * x2 - b * x2 - lam * lam / ka;
  a(F + 3, F + 2) = 2.0 * x2 + b;
  return A;
}

Mat matmul(const Mat& A, const Mat& B, int d) {
  Mat C(d * d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      const cd aik = A[i * d + k];
      if (aik == 0.0) continue;
      for (int j = 0; j < d; ++j) C[i * d + j] += aik * B[k * d + j];
    }
  return C;
}

struct Banded {
  int n, kl, ku, ldab;
  std::vector<cd> ab;
  Banded(int n_, int kl_, int ku_) : n(n_), kl(kl_), ku(ku_), ldab(2 * kl_ + ku_ + 1) {
    ab.assign(static_cast<std::size_t>(ldab) * n, cd(0.0));
  }
  void set(int i, int j, cd v) {
    if (j - i > ku || i - j > kl) throw std::logic_error("band overflow in oracle assembly");
    auto& e = ab[static_cast<std::size_t>(j) * ldab + kl + ku + i - j];
    e = v;
  }
};

}  // namespace

BvpSolution solve_mode_bvp(const FluidParams& p, const TangentialMode& mode, const BoundaryTrace& trace,
                           BvpConfig cfg) {
  TangentialMode m = mode;
  const RootData r = compute_roots(p, m);
  if (cfg.L <= 0) cfg.L = default_bvp_length(r);
  cfg.validate(r);
  if (trace.h_hat.size() != mode.xi.size()) throw UsageError("h_hat must have N-1 entries");

  const int N = mode.dim, n = N - 1;
  const int d = 2 * N + 4;
  const int V = N, F = 2 * N;
  const int nodes = cfg.n + 1;
  const int tot = nodes * d;
  const double h = cfg.L / cfg.n;
  const cd lam = mode.lambda;

  const Mat A = companion(p, mode, d);
  Mat Lm(d * d), Rm(d * d);  // Lm y_{i+1} = Rm y_i
  {
    Mat A2 = matmul(A, A, d);
    const double c2 = cfg.scheme == BvpScheme::fourth_order_fd ? h * h / 12.0 : 0.0;
    for (int i = 0; i < d * d; ++i) {
      const cd id = (i / d == i % d) ? 1.0 : 0.0;
      Lm[i] = id - 0.5 * h * A[i] + c2 * A2[i];
      Rm[i] = id + 0.5 * h * A[i] + c2 * A2[i];
    }
  }

  const int nb0 = N + 2;
  Banded B(tot, nb0 + d - 1, 2 * d - 1 - nb0 + d);
  std::vector<cd> rhs(tot, cd(0.0));
  auto setr = [&](int row, cd v) { rhs[row] = v; };

  // x = 0: u_J(0), phi'(0) = lambda g, phi(0) = i xi'.u'(0) + u_N'(0)
  int row = 0;
  for (int j = 0; j < n; ++j) {
    B.set(row, j, 1.0);
    setr(row++, trace.h_hat[j]);
  }
  B.set(row++, n, 1.0);
  B.set(row, F + 1, 1.0);
  setr(row++, (cfg.inject_bc_sign_error ? -1.0 : 1.0) * lam * trace.g_hat);
  B.set(row, F, 1.0);
  for (int j = 0; j < n; ++j) B.set(row, j, -I * mode.xi[j]);
  B.set(row++, V + n, -1.0);

  for (int i = 0; i < cfg.n; ++i) {
    const int c0 = i * d, c1 = (i + 1) * d;
    for (int k = 0; k < d; ++k) {
      for (int c = 0; c < d; ++c) {
        if (Lm[k * d + c] != 0.0) B.set(row, c1 + c, Lm[k * d + c]);
        if (Rm[k * d + c] != 0.0) B.set(row, c0 + c, -Rm[k * d + c]);
      }
      ++row;
    }
  }
  // x = L: u_J = 0, phi = phi' = 0
  const int cL = cfg.n * d;
  for (int J = 0; J < N; ++J) B.set(row++, cL + J, 1.0);
  B.set(row++, cL + F, 1.0);
  B.set(row++, cL + F + 1, 1.0);
  if (row != tot) throw std::logic_error("oracle row count mismatch");

  std::vector<lapack_int> ipiv(tot);
  const lapack_int info = LAPACKE_zgbsv(LAPACK_COL_MAJOR, tot, B.kl, B.ku, 1, B.ab.data(), B.ldab,
                                        ipiv.data(), rhs.data(), tot);
  if (info != 0) throw ConfigError("singular oracle system (increase n or L)");

  BvpSolution s;
  s.L = cfg.L;
  s.x.resize(nodes);
  s.rho.resize(nodes);
  s.phi.resize(nodes);
  s.u.assign(N, cvec(nodes));
  for (int i = 0; i < nodes; ++i) {
    s.x[i] = i * h;
    auto y = [&](int k) { return rhs[i * d + k]; };
    for (int J = 0; J < N; ++J) s.u[J][i] = y(J);
    s.phi[i] = y(F);
    s.rho[i] = -s.phi[i] / lam;
  }
  return s;
}

BvpComparison compare_with_closed_form(const BvpSolution& o, const ModeSolution& c) {
  BvpComparison rep;
  const int N = static_cast<int>(o.u.size());
  auto one = [&](const cvec& vals, const VerticalProfile& prof, const std::string& name) {
    cvec ref(vals.size());
    double scale = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      ref[i] = prof.eval(o.x[i]);
      scale = std::max(scale, std::abs(ref[i]));
    }
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double e = std::abs(vals[i] - ref[i]) / (scale > 0 ? scale : 1.0);
      if (e > rep.max_rel) {
        rep.max_rel = e;
        rep.worst_component = name;
        rep.worst_x = o.x[i];
      }
    }
  };
  one(o.rho, c.rho, "rho");
  for (int J = 0; J < N; ++J) one(o.u[J], c.u[J], "u_" + std::to_string(J + 1));
  return rep;
}

ConvergenceReport convergence_study(const FluidParams& p, const TangentialMode& mode,
                                    const BoundaryTrace& trace, const std::vector<int>& n_list,
                                    BvpConfig base) {
  if (n_list.size() < 3) throw UsageError("convergence study needs at least three grid sizes");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw UsageError("grid sizes must be ascending");
  const ModeSolution closed = solve_mode(p, mode, trace);
  ConvergenceReport rep;
  rep.n = n_list;
  for (int n : n_list) {
    BvpConfig c = base;
    c.n = n;
    rep.errors.push_back(compare_with_closed_form(solve_mode_bvp(p, mode, trace, c), closed).max_rel);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const double lx = std::log(double(n_list[i])), ly = -std::log(std::max(rep.errors[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    if (i > 0) {
      rep.pairwise_orders.push_back(std::log(rep.errors[i - 1] / rep.errors[i]) /
                                    std::log(double(n_list[i]) / n_list[i - 1]));
      if (!(rep.errors[i] < rep.errors[i - 1])) rep.monotone = false;
    }
  }
  rep.order = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  rep.inconclusive = !rep.monotone;
  return rep;
}

}  // namespace hsr
