#include "hsr/field_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hsr {

double default_vertical_length(const FluidParams& p, cd lambda) {
  TangentialMode m;
  m.dim = 2;
  m.xi = {0.0};
  m.lambda = lambda;
  return 40.0 / compute_roots(p, m).min_re();
}

namespace {

double vertical_frequency(const GridSpec& s, int m) {
  const int M2 = s.doubled_nz();
  if (m == M2 / 2) return 0.0;
  const int k = m < M2 / 2 ? m : m - M2;
  return std::numbers::pi * k / s.L;
}

bool vertical_nyquist(const GridSpec& s, int m) { return m == s.doubled_nz() / 2; }

std::vector<int> full_dims(const GridSpec& s) {
  std::vector<int> d(s.taxes(), s.points);
  d.push_back(s.doubled_nz());
  return d;
}

void check_doubled(const DoubledField& f, const GridSpec& s, const char* what) {
  if (f.values.empty()) return;
  if (!(f.spec == s) || f.values.size() != s.tangential_count() * s.doubled_nz())
    throw UsageError(std::string("grid mismatch for ") + what);
}

// vertical derivative of order k from a full spectrum, restricted to the half-space nodes
cvec vertical_derivative(const GridSpec& s, const cvec& full_hat, int order) {
  const int M2 = s.doubled_nz(), nz = s.nz;
  const std::size_t T = s.tangential_count();
  cvec work(full_hat.size());
  for (std::size_t t = 0; t < T; ++t)
    for (int m = 0; m < M2; ++m) {
      const cd fac = std::pow(I * vertical_frequency(s, m), order);
      work[t * M2 + m] = (order == 0 ? cd(1.0) : fac) * full_hat[t * M2 + m];
    }
  const Fft fft({M2}, static_cast<int>(T), 1, M2);
  fft.backward(work.data());
  cvec out(T * nz);
  for (std::size_t t = 0; t < T; ++t)
    for (int k = 0; k < nz; ++k) out[t * nz + k] = work[t * M2 + k] / double(M2);
  return out;
}

cvec spectral_trace(const GridField& g, const GridSpec& spec) {
  const std::size_t T = spec.tangential_count();
  if (g.values.empty()) return cvec(T, 0.0);
  if (g.values.size() != T) throw UsageError("trace field must have one vertical node");
  cvec v = g.values;
  tangential_forward(spec, 1, v);
  return v;
}

cvec spectral_half(const GridField& f, const GridSpec& spec) {
  const std::size_t n = spec.tangential_count() * spec.nz;
  if (f.values.empty()) return cvec(n, 0.0);
  if (f.values.size() != n) throw UsageError("field does not match the grid");
  cvec v = f.values;
  tangential_forward(spec, spec.nz, v);
  return v;
}

}  // namespace

WholeSpaceSolution whole_space_solve(const FluidParams& p, const DoubledField& d,
                                     const std::vector<DoubledField>& f, cd lambda, Exec exec) {
  if (!(lambda.real() > 0)) throw DomainError("whole-space solve requires Re lambda > 0");
  const GridSpec s = !d.values.empty() ? d.spec : (!f.empty() ? f[0].spec : GridSpec{});
  s.validate();
  const int N = s.dim, M2 = s.doubled_nz();
  if (static_cast<int>(f.size()) != N && !f.empty()) throw UsageError("f must have N components");
  check_doubled(d, s, "d");
  for (const auto& fj : f) check_doubled(fj, s, "f");
  const std::size_t T = s.tangential_count(), total = T * M2;

  const Fft fft(full_dims(s), 1, 1, 0);
  auto fwd = [&](const DoubledField& x) {
    cvec v = x.values.empty() ? cvec(total, 0.0) : x.values;
    fft.forward(v.data());
    return v;
  };
  const cvec dh = fwd(d);
  std::vector<cvec> fh(N);
  for (int J = 0; J < N; ++J) fh[J] = f.empty() ? cvec(total, 0.0) : fwd(f[J]);

  WholeSpaceSolution w;
  w.spec = s;
  w.rho_hat.assign(total, 0.0);
  w.u_hat.assign(N, cvec(total, 0.0));
  for_each_index(T, exec, [&](std::size_t t) {
    if (s.any_nyquist(t)) return;
    const rvec xt = s.xi_of(t);
    for (int m = 0; m < M2; ++m) {
      if (vertical_nyquist(s, m)) continue;
      rvec xi = xt;
      xi.push_back(vertical_frequency(s, m));
      double x2 = 0;
      for (double v : xi) x2 += v * v;
      const std::size_t i = t * M2 + m;
      cd xf = 0;
      for (int J = 0; J < N; ++J) xf += xi[J] * fh[J][i];
      const cd D = lambda * lambda + (p.mu + p.nu) * lambda * x2 + p.kappa * x2 * x2;
      const cd P = (lambda * xf - I * p.kappa * x2 * x2 * dh[i]) / D;
      const cd r = (dh[i] - I * P) / lambda;
      w.rho_hat[i] = r;
      for (int J = 0; J < N; ++J)
        w.u_hat[J][i] = (fh[J][i] - p.nu * xi[J] * P - I * p.kappa * x2 * xi[J] * r) / (lambda + p.mu * x2);
    }
  });

  auto back = [&](const cvec& hat) {
    DoubledField o;
    o.spec = s;
    o.values = hat;
    fft.backward(o.values.data());
    const double sc = 1.0 / double(total);
    for (cd& v : o.values) v *= sc;
    return o;
  };
  w.rho = back(w.rho_hat);
  for (int J = 0; J < N; ++J) w.u.push_back(back(w.u_hat[J]));
  return w;
}

SpectralStack SpectralStack::zeros(const GridSpec& s) {
  SpectralStack z;
  z.spec = s;
  const std::size_t n = s.tangential_count() * s.nz;
  z.rho.assign(4, cvec(n, 0.0));
  z.u.assign(s.dim, std::vector<cvec>(3, cvec(n, 0.0)));
  return z;
}

void SpectralStack::add(const SpectralStack& o) {
  for (std::size_t k = 0; k < rho.size(); ++k)
    for (std::size_t i = 0; i < rho[k].size(); ++i) rho[k][i] += o.rho[k][i];
  for (std::size_t J = 0; J < u.size(); ++J)
    for (std::size_t k = 0; k < u[J].size(); ++k)
      for (std::size_t i = 0; i < u[J][k].size(); ++i) u[J][k][i] += o.u[J][k][i];
}

ReducedBoundaryData reduce_boundary_data(const FluidParams& p, const GridSpec& spec, const GridField& d,
                                         const std::vector<GridField>& f, const GridField& g, cd lambda,
                                         const PipelineOptions& opt) {
  spec.validate();
  const int N = spec.dim, n = N - 1, nz = spec.nz, M2 = spec.doubled_nz();
  const std::size_t T = spec.tangential_count();
  if (opt.validate_decay) {
    if (!d.values.empty()) validate_decay(d, opt.decay_tol, "d");
    for (int J = 0; J < static_cast<int>(f.size()); ++J)
      if (!f[J].values.empty()) validate_decay(f[J], opt.decay_tol, "f" + std::to_string(J + 1));
    if (!g.values.empty()) validate_decay(g, opt.decay_tol, "g");
  }
  if (!f.empty() && static_cast<int>(f.size()) != N) throw UsageError("f must have N components");

  DoubledField de;
  de.spec = spec;
  if (!d.values.empty()) de = extend(d, Parity::even);
  std::vector<DoubledField> fe;
  for (int J = 0; J < static_cast<int>(f.size()); ++J) {
    if (f[J].values.empty()) {
      DoubledField z;
      z.spec = spec;
      fe.push_back(z);
    } else {
      fe.push_back(extend(f[J], J < n ? Parity::even : Parity::odd));
    }
  }
  // normal component enters only through parity; the zero default keeps sizes aligned
  ReducedBoundaryData r;
  {
    DoubledField dd = de;
    if (dd.values.empty()) dd.values.assign(T * M2, 0.0);
    r.whole = whole_space_solve(p, dd, fe, lambda, opt.exec);
  }

  SpectralStack& ws = r.whole_stack;
  ws.spec = spec;
  ws.rho.resize(4);
  for (int k = 0; k < 4; ++k) ws.rho[k] = vertical_derivative(spec, r.whole.rho_hat, k);
  ws.u.assign(N, std::vector<cvec>(3));
  for (int J = 0; J < N; ++J)
    for (int k = 0; k < 3; ++k) ws.u[J][k] = vertical_derivative(spec, r.whole.u_hat[J], k);

  // g~ = g + d_N R(., 0), h~_j = -U_j(., 0); traces in physical space
  const cvec gs = spectral_trace(g, spec);
  cvec gt(T), unt(T);
  std::vector<cvec> ht(n, cvec(T));
  for (std::size_t t = 0; t < T; ++t) {
    gt[t] = gs[t] + ws.rho[1][t * nz];
    for (int j = 0; j < n; ++j) ht[j][t] = -ws.u[j][0][t * nz];
    unt[t] = ws.u[n][0][t * nz];
  }
  tangential_inverse(spec, 1, gt);
  r.g_tilde = GridField{spec.trace(), FieldRole::datum, gt};
  for (int j = 0; j < n; ++j) {
    tangential_inverse(spec, 1, ht[j]);
    r.h_tilde.push_back(GridField{spec.trace(), FieldRole::datum, ht[j]});
  }
  tangential_inverse(spec, 1, unt);
  double umax = 0;
  for (const auto& uj : r.whole.u)
    for (int t = 0; t < static_cast<int>(T); ++t)
      for (int k = 0; k < nz; ++k) umax = std::max(umax, std::abs(uj.at(t, k)));
  double un = 0;
  for (cd v : unt) un = std::max(un, std::abs(v));
  r.un_trace = umax > 0 ? un / umax : un;
  return r;
}

SpectralStack boundary_correction(const FluidParams& p, const GridSpec& spec, cd lambda,
                                  const cvec& g_spec, const std::vector<cvec>& h_spec,
                                  const PipelineOptions& opt) {
  spec.validate();
  const int N = spec.dim, n = N - 1, nz = spec.nz;
  const std::size_t T = spec.tangential_count();
  if (g_spec.size() != T || static_cast<int>(h_spec.size()) != n) throw UsageError("trace spectra do not match the grid");
  SpectralStack s = SpectralStack::zeros(spec);
  std::vector<std::string> errors(T);
  for_each_index(T, opt.exec, [&](std::size_t t) {
    if (spec.any_nyquist(t)) return;
    try {
      const TangentialMode mode = make_mode(spec.xi_of(t), lambda, &p, opt.mode_opt);
      BoundaryTrace tr;
      tr.g_hat = g_spec[t];
      tr.h_hat.resize(n);
      for (int j = 0; j < n; ++j) tr.h_hat[j] = h_spec[j][t];
      bool zero = tr.g_hat == 0.0;
      for (cd h : tr.h_hat) zero = zero && h == 0.0;
      if (zero) return;
      const ModeSolution sol = solve_mode(p, mode, tr);
      VerticalProfile rd = sol.rho;
      for (int k = 0; k < 4; ++k) {
        for (int z = 0; z < nz; ++z) s.rho[k][t * nz + z] = rd.eval(spec.z(z));
        rd = rd.derivative(1);
      }
      for (int J = 0; J < N; ++J) {
        VerticalProfile ud = sol.u[J];
        for (int k = 0; k < 3; ++k) {
          for (int z = 0; z < nz; ++z) s.u[J][k][t * nz + z] = ud.eval(spec.z(z));
          ud = ud.derivative(1);
        }
      }
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw EvaluationError("boundary correction failed: " + e);
  return s;
}

GridField to_physical(const GridSpec& spec, cvec spectral, FieldRole role) {
  tangential_inverse(spec, spec.nz, spectral);
  return GridField{spec, role, std::move(spectral)};
}

FieldResiduals field_residuals(const FluidParams& p, const SpectralStack& s, const GridField& d,
                               const std::vector<GridField>& f, const GridField& g, cd lambda) {
  const GridSpec& spec = s.spec;
  const int N = spec.dim, n = N - 1, nz = spec.nz;
  const std::size_t T = spec.tangential_count(), tot = T * nz;
  const cvec dh = spectral_half(d, spec);
  std::vector<cvec> fh(N);
  for (int J = 0; J < N; ++J) fh[J] = f.empty() ? cvec(tot, 0.0) : spectral_half(f[J], spec);

  auto make = [&](auto&& fn) {
    cvec v(tot);
    for (std::size_t t = 0; t < T; ++t) {
      const rvec xi = spec.xi_of(t);
      double x2 = 0;
      for (double a : xi) x2 += a * a;
      for (int k = 0; k < nz; ++k) v[t * nz + k] = fn(t * nz + k, xi, x2);
    }
    return to_physical(spec, std::move(v), FieldRole::datum).values;
  };
  auto div = [&](std::size_t i, const rvec& xi, int order) {
    cd r = s.u[n][order + 1][i];
    for (int j = 0; j < n; ++j) r += I * xi[j] * s.u[j][order][i];
    return r;
  };

  // each equation as a list of physical-space term arrays
  auto rel = [&](const std::vector<cvec>& terms) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < tot; ++i) {
      cd sum = 0;
      double a = 0;
      for (const auto& tm : terms) {
        sum += tm[i];
        a += std::abs(tm[i]);
      }
      num = std::max(num, std::abs(sum));
      den = std::max(den, a);
    }
    return den > 0 ? num / den : 0.0;
  };

  FieldResiduals r;
  {
    std::vector<cvec> terms;
    terms.push_back(make([&](std::size_t i, const rvec&, double) { return lambda * s.rho[0][i]; }));
    terms.push_back(make([&](std::size_t i, const rvec& xi, double) { return div(i, xi, 0); }));
    terms.push_back(make([&](std::size_t i, const rvec&, double) { return -dh[i]; }));
    r.mass = rel(terms);
  }
  for (int J = 0; J < N; ++J) {
    std::vector<cvec> terms;
    terms.push_back(make([&](std::size_t i, const rvec&, double) { return lambda * s.u[J][0][i]; }));
    terms.push_back(make([&](std::size_t i, const rvec&, double x2) {
      return -p.mu * (s.u[J][2][i] - x2 * s.u[J][0][i]);
    }));
    if (J < n) {
      terms.push_back(make([&](std::size_t i, const rvec& xi, double) { return -p.nu * I * xi[J] * div(i, xi, 0); }));
      terms.push_back(make([&](std::size_t i, const rvec& xi, double x2) {
        return -p.kappa * I * xi[J] * (s.rho[2][i] - x2 * s.rho[0][i]);
      }));
    } else {
      terms.push_back(make([&](std::size_t i, const rvec& xi, double) { return -p.nu * div(i, xi, 1); }));
      terms.push_back(make([&](std::size_t i, const rvec&, double x2) {
        return -p.kappa * (s.rho[3][i] - x2 * s.rho[1][i]);
      }));
    }
    terms.push_back(make([&](std::size_t i, const rvec&, double) { return -fh[J][i]; }));
    r.momentum = std::max(r.momentum, rel(terms));
  }

  // boundary traces at the first vertical node
  double umax = 0, ub = 0;
  for (int J = 0; J < N; ++J) {
    const GridField uj = to_physical(spec, s.u[J][0], FieldRole::velocity_component);
    umax = std::max(umax, uj.max_abs());
    for (std::size_t t = 0; t < T; ++t) ub = std::max(ub, std::abs(uj.at(t, 0)));
  }
  r.bc_velocity = umax > 0 ? ub / umax : ub;
  const GridField dr = to_physical(spec, s.rho[1], FieldRole::datum);
  double gb = 0, gs = 0;
  for (std::size_t t = 0; t < T; ++t) {
    const cd gv = g.values.empty() ? cd(0.0) : g.values[t];
    gb = std::max(gb, std::abs(-dr.at(t, 0) - gv));
    gs = std::max({gs, std::abs(gv), std::abs(dr.at(t, 0))});
  }
  r.bc_neumann = gs > 0 ? gb / gs : gb;
  return r;
}

ResolventResult solve_resolvent(const FluidParams& p, const GridSpec& spec, const GridField& d,
                                const std::vector<GridField>& f, const GridField& g, cd lambda,
                                const PipelineOptions& opt) {
  if (!(lambda.real() > 0)) throw DomainError("resolvent solve requires Re lambda > 0");
  ReducedBoundaryData red = reduce_boundary_data(p, spec, d, f, g, lambda, opt);
  const int n = spec.dim - 1;
  cvec gs = red.g_tilde.values;
  tangential_forward(spec, 1, gs);
  std::vector<cvec> hs(n);
  for (int j = 0; j < n; ++j) {
    hs[j] = red.h_tilde[j].values;
    tangential_forward(spec, 1, hs[j]);
  }
  ResolventResult res;
  res.stack = red.whole_stack;
  res.stack.add(boundary_correction(p, spec, lambda, gs, hs, opt));
  res.rho = to_physical(spec, res.stack.rho[0], FieldRole::density);
  for (int J = 0; J <= n; ++J) res.u.push_back(to_physical(spec, res.stack.u[J][0], FieldRole::velocity_component));
  res.un_trace = red.un_trace;
  res.residuals = field_residuals(p, res.stack, d, f, g, lambda);
  return res;
}

}  // namespace hsr
