#include "hsr/rbound.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "hsr/field_pipeline.hpp"
#include "hsr/grid.hpp"
#include "hsr/mode_solver.hpp"
#include "hsr/parallel.hpp"

namespace hsr {

double lift_norm(const LiftVector& a, double q) {
  if (a.v.size() != a.w.size()) throw UsageError("lift vector and weights differ in length");
  double s = 0;
  if (q == 2) {
    for (std::size_t i = 0; i < a.v.size(); ++i) s += a.w[i] * std::norm(a.v[i]);
    return std::sqrt(s);
  }
  for (std::size_t i = 0; i < a.v.size(); ++i) s += a.w[i] * std::pow(std::abs(a.v[i]), q);
  return std::pow(s, 1 / q);
}

void ProbeGrid::validate() const {
  if (dim < 2 || dim > 4) throw ConfigError("probe dimension must be 2, 3 or 4");
  if (points < 4 || (points & (points - 1)) != 0) throw ConfigError("probe points must be a power of two");
  if (band < 1 || band >= points / 2) throw ConfigError("probe band must satisfy 1 <= band < points/2");
  if (!(half_length > 0) || !(zmax > 0) || !(grading > 0)) throw ConfigError("probe lengths must be positive");
  if (nz < 16) throw ConfigError("probe needs at least 16 vertical nodes");
  if (!(full_L > 0) || full_nz < 16) throw ConfigError("full-family grid is too small");
}

rvec ProbeGrid::z_nodes() const {
  rvec z(nz);
  const double den = std::expm1(grading);
  for (int i = 0; i < nz; ++i) z[i] = zmax * std::expm1(grading * i / (nz - 1.0)) / den;
  return z;
}

rvec ProbeGrid::z_weights() const {
  const rvec z = z_nodes();
  rvec w(nz, 0.0);
  for (int i = 0; i + 1 < nz; ++i) {
    const double h = z[i + 1] - z[i];
    w[i] += h / 2;
    w[i + 1] += h / 2;
  }
  return w;
}

std::size_t ProbeGrid::tangential_count() const {
  std::size_t t = 1;
  for (int a = 0; a < dim - 1; ++a) t *= points;
  return t;
}

FamilyKind family_from_name(const std::string& s) {
  if (s == "A2") return FamilyKind::A2;
  if (s == "B2") return FamilyKind::B2;
  if (s == "A") return FamilyKind::A;
  if (s == "B") return FamilyKind::B;
  throw UsageError("unknown family '" + s + "' (A2, B2, A, B)");
}

std::string family_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::A2: return "A2";
    case FamilyKind::B2: return "B2";
    case FamilyKind::A: return "A";
    case FamilyKind::B: return "B";
  }
  return "?";
}

namespace {

bool reduced(FamilyKind k) { return k == FamilyKind::A2 || k == FamilyKind::B2; }

GridSpec tangential_spec(const ProbeGrid& g, int nz, double L) {
  GridSpec s;
  s.dim = g.dim;
  s.half_length = g.half_length;
  s.points = g.points;
  s.nz = nz;
  s.L = L;
  return s;
}

// multi-indices over n tangential axes with |alpha| = k
void tangential_indices(int n, int k, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == n - 1) {
    cur.push_back(k);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int a = 0; a <= k; ++a) {
    cur.push_back(a);
    tangential_indices(n, k - a, cur, out);
    cur.pop_back();
  }
}

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Appends (grad^top F, lambda^{1/2} grad^{top-1} F, ..., lambda^{top/2} F) in physical space.
// dz[b] holds the tangential spectrum of d^b F / dz^b on the vertical nodes, b = 0..top.
void append_lift(LiftVector& out, const GridSpec& s, const rvec& wz, int top, cd lambda,
                 const std::vector<cvec>& dz) {
  const int n = s.taxes(), nz = s.nz;
  const std::size_t T = s.tangential_count();
  double cell = 1;
  for (int a = 0; a < n; ++a) cell *= s.dx();
  const cd sl = principal_sqrt(lambda);
  std::vector<rvec> xi(T);
  for (std::size_t t = 0; t < T; ++t) xi[t] = s.xi_of(t);
  for (int k = 0; k <= top; ++k) {
    const cd scale = std::pow(sl, top - k);
    for (int b = 0; b <= k; ++b) {
      std::vector<std::vector<int>> alphas;
      std::vector<int> cur;
      if (n == 0) alphas.push_back({});
      else tangential_indices(n, k - b, cur, alphas);
      for (const auto& al : alphas) {
        double mult = factorial(k) / factorial(b);
        for (int a : al) mult /= factorial(a);
        cvec v(T * nz);
        for (std::size_t t = 0; t < T; ++t) {
          cd sym = scale;
          for (int a = 0; a < n; ++a) sym *= std::pow(I * xi[t][a], al[a]);
          for (int z = 0; z < nz; ++z) v[t * nz + z] = sym * dz[b][t * nz + z];
        }
        tangential_inverse(s, nz, v);
        for (std::size_t t = 0; t < T; ++t)
          for (int z = 0; z < nz; ++z) {
            out.v.push_back(v[t * nz + z]);
            out.w.push_back(mult * cell * wz[z]);
          }
      }
    }
  }
}

// lift of a trace extended by e^{-B z}, B = sqrt(|xi'|^2 + |lambda|)
void append_trace_lift(LiftVector& out, const GridSpec& s, const rvec& z, const rvec& wz, cd lambda,
                       const cvec& spec) {
  const std::size_t T = s.tangential_count();
  const int nz = s.nz;
  std::vector<cvec> dz(3, cvec(T * nz, 0.0));
  for (std::size_t t = 0; t < T; ++t) {
    if (spec[t] == 0.0) continue;
    double x2 = 0;
    for (double x : s.xi_of(t)) x2 += x * x;
    const double B = std::sqrt(x2 + std::abs(lambda));
    for (int k = 0; k < nz; ++k) {
      const cd e = spec[t] * std::exp(-B * z[k]);
      dz[0][t * nz + k] = e;
      dz[1][t * nz + k] = -B * e;
      dz[2][t * nz + k] = B * B * e;
    }
  }
  append_lift(out, s, wz, 2, lambda, dz);
}

// z-profile amplitudes of the full-family body data: even Gaussian, odd z e^{-z^2/2} for the normal force
void append_body_lift(LiftVector& out, const GridSpec& s, const rvec& z, const rvec& wz, int top, cd lambda,
                      const cvec& spec, bool odd) {
  const std::size_t T = s.tangential_count();
  const int nz = s.nz;
  std::vector<cvec> dz(top + 1, cvec(T * nz, 0.0));
  for (std::size_t t = 0; t < T; ++t) {
    if (spec[t] == 0.0) continue;
    for (int k = 0; k < nz; ++k) {
      const double x = z[k], e = std::exp(-x * x / 2);
      const double v0 = odd ? x * e : e;
      const double v1 = odd ? (1 - x * x) * e : -x * e;
      dz[0][t * nz + k] = spec[t] * v0;
      if (top >= 1) dz[1][t * nz + k] = spec[t] * v1;
    }
  }
  append_lift(out, s, wz, top, lambda, dz);
}

GridField body_field(const GridSpec& s, const cvec& spec, bool odd) {
  const std::size_t T = s.tangential_count();
  cvec v(T * s.nz, 0.0);
  for (std::size_t t = 0; t < T; ++t)
    for (int k = 0; k < s.nz; ++k) {
      const double x = s.z(k), e = std::exp(-x * x / 2);
      v[t * s.nz + k] = spec[t] * (odd ? x * e : e);
    }
  return to_physical(s, std::move(v), FieldRole::datum);
}

rvec uniform_weights(const GridSpec& s) {
  rvec w(s.nz, s.dz());
  w.front() = w.back() = s.dz() / 2;
  return w;
}

rvec uniform_nodes(const GridSpec& s) {
  rvec z(s.nz);
  for (int k = 0; k < s.nz; ++k) z[k] = s.z(k);
  return z;
}

LiftVector input_lift_of(const ProbeGrid& g, FamilyKind kind, cd lambda, const ProbeInput& in) {
  LiftVector out;
  if (reduced(kind)) {
    const GridSpec s = tangential_spec(g, g.nz, g.zmax);
    const rvec z = g.z_nodes(), wz = g.z_weights();
    append_trace_lift(out, s, z, wz, lambda, in.g_spec);
    for (const auto& h : in.h_spec) append_trace_lift(out, s, z, wz, lambda, h);
    return out;
  }
  const GridSpec s = tangential_spec(g, g.full_nz, g.full_L);
  const rvec z = uniform_nodes(s), wz = uniform_weights(s);
  append_body_lift(out, s, z, wz, 1, lambda, in.d_spec, false);
  for (int J = 0; J < g.dim; ++J) append_body_lift(out, s, z, wz, 0, lambda, in.f_spec[J], J == g.dim - 1);
  append_trace_lift(out, s, z, wz, lambda, in.g_spec);
  return out;
}

}  // namespace

ProbeFamily make_family(const FluidParams& p, FamilyKind kind, const ProbeGrid& g) {
  g.validate();
  ProbeFamily fam;
  fam.name = family_name(kind);
  fam.input_lift = [g, kind](cd lambda, const ProbeInput& in) { return input_lift_of(g, kind, lambda, in); };
  const bool density = kind == FamilyKind::A2 || kind == FamilyKind::A;
  if (reduced(kind)) {
    fam.apply = [p, g, density](cd lambda, const ProbeInput& in) {
      const GridSpec s = tangential_spec(g, g.nz, g.zmax);
      const rvec z = g.z_nodes(), wz = g.z_weights();
      const std::size_t T = s.tangential_count();
      const int nz = g.nz, N = g.dim, n = N - 1;
      const int top = density ? 3 : 2;
      // [field][order][t * nz + k], field 0 is rho or the velocity components
      const int fields = density ? 1 : N;
      std::vector<std::vector<cvec>> dz(fields, std::vector<cvec>(top + 1, cvec(T * nz, 0.0)));
      for (std::size_t t = 0; t < T; ++t) {
        BoundaryTrace tr;
        tr.g_hat = in.g_spec[t];
        tr.h_hat.resize(n);
        bool zero = tr.g_hat == 0.0;
        for (int j = 0; j < n; ++j) {
          tr.h_hat[j] = in.h_spec[j][t];
          zero = zero && tr.h_hat[j] == 0.0;
        }
        if (zero || s.any_nyquist(t)) continue;
        const TangentialMode mode = make_mode(s.xi_of(t), lambda, &p);
        const ModeSolution sol = solve_mode(p, mode, tr);
        for (int f = 0; f < fields; ++f) {
          VerticalProfile pr = density ? sol.rho : sol.u[f];
          for (int b = 0; b <= top; ++b) {
            for (int k = 0; k < nz; ++k) dz[f][b][t * nz + k] = pr.eval(z[k]);
            if (b < top) pr = pr.derivative(1);
          }
        }
      }
      LiftVector out;
      for (int f = 0; f < fields; ++f) append_lift(out, s, wz, top, lambda, dz[f]);
      return out;
    };
    return fam;
  }
  fam.apply = [p, g, density](cd lambda, const ProbeInput& in) {
    const GridSpec s = tangential_spec(g, g.full_nz, g.full_L);
    const GridField d = body_field(s, in.d_spec, false);
    std::vector<GridField> f;
    for (int J = 0; J < g.dim; ++J) f.push_back(body_field(s, in.f_spec[J], J == g.dim - 1));
    const GridField gt = to_physical(s.trace(), in.g_spec, FieldRole::datum);
    PipelineOptions opt;
    opt.exec = Exec::serial;
    opt.validate_decay = false;
    const ResolventResult r = solve_resolvent(p, s, d, f, gt, lambda, opt);
    const rvec wz = uniform_weights(s);
    LiftVector out;
    if (density) {
      append_lift(out, s, wz, 3, lambda, r.stack.rho);
    } else {
      for (int J = 0; J < g.dim; ++J) append_lift(out, s, wz, 2, lambda, r.stack.u[J]);
    }
    return out;
  };
  return fam;
}

ProbeFamily identity_family(const FluidParams& p, FamilyKind kind, const ProbeGrid& g) {
  ProbeFamily fam = make_family(p, kind, g);
  fam.name = "identity";
  fam.apply = fam.input_lift;
  return fam;
}

ProbeFamily scalar_family(const ProbeFamily& base, std::function<cd(cd)> c) {
  ProbeFamily fam = base;
  fam.name = base.name + "_scalar";
  fam.apply = [lift = base.input_lift, c](cd lambda, const ProbeInput& in) {
    LiftVector v = lift(lambda, in);
    const cd a = c(lambda);
    for (cd& x : v.v) x *= a;
    return v;
  };
  return fam;
}

ProbeFamily lambda_log_derivative(const ProbeFamily& f, double rel_step) {
  if (!(rel_step >= 1e-6 && rel_step <= 1e-2)) throw UsageError("rel_step must lie in [1e-6, 1e-2]");
  ProbeFamily d = f;
  d.name = f.name + "_dlog";
  d.apply = [apply = f.apply, h = rel_step](cd lambda, const ProbeInput& in) {
    const cd lp = lambda * (1 + h), lm = lambda * (1 - h);
    if (!(lp.real() > 0) || !(lm.real() > 0)) throw DomainError("shifted lambda leaves the right half-plane");
    LiftVector a = apply(lp, in);
    const LiftVector b = apply(lm, in);
    if (a.v.size() != b.v.size()) throw EvaluationError("shifted members have different lift layouts");
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] = (a.v[i] - b.v[i]) / (2 * h);
    return a;
  };
  return d;
}

int probe_shells(const ProbeGrid& g) {
  int s = 0;
  while ((2 << s) <= g.band) ++s;
  return s + 1;
}

ProbeInput random_input(const ProbeGrid& g, FamilyKind kind, std::mt19937_64& rng, int shell) {
  g.validate();
  if (shell >= probe_shells(g)) throw UsageError("shell index outside the band");
  const GridSpec s = tangential_spec(g, 1, 1);
  const std::size_t T = s.tangential_count();
  const int n = g.dim - 1;
  std::normal_distribution<double> nd;
  auto draw = [&]() {
    cvec v(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      int kmax = 0;
      for (int i : s.unflatten(t)) kmax = std::max(kmax, std::abs(i < g.points / 2 ? i : i - g.points));
      const bool in_shell = shell < 0 ? true : (kmax >= (1 << shell) && kmax < (2 << shell));
      if (kmax >= 1 && kmax <= g.band && in_shell) {
        const double re = nd(rng), im = nd(rng);
        v[t] = cd(re, im);
      }
    }
    return v;
  };
  ProbeInput in;
  in.g_spec = draw();
  if (reduced(kind)) {
    for (int j = 0; j < n; ++j) in.h_spec.push_back(draw());
  } else {
    in.d_spec = draw();
    for (int J = 0; J <= n; ++J) in.f_spec.push_back(draw());
  }
  return in;
}

ProbeSampler shell_sampler(const ProbeGrid& g, FamilyKind kind) {
  const int shells = probe_shells(g);
  return [g, kind, shells](std::mt19937_64& rng, int draw) {
    return random_input(g, kind, rng, draw % (shells + 1) - 1);
  };
}

void ProbeConfig::validate() const {
  if (m < 1 || trials < 50) throw ConfigError("need m >= 1 and trials >= 50");
  if (draws < 0) throw ConfigError("draws must be non-negative");
  if (!(q >= 1)) throw ConfigError("q must be at least 1");
  if (decade_lo >= decade_hi) throw ConfigError("empty decade range");
  for (double a : ray_args)
    if (!(std::abs(a) < std::numbers::pi / 2)) throw ConfigError("rays must lie in the right half-plane");
  for (double l : lambda_samples)
    if (!(l > 0)) throw ConfigError("explicit lambda magnitudes must be positive");
}

double rademacher_ratio(const std::vector<LiftVector>& outputs, const std::vector<LiftVector>& inputs,
                        double q, int trials, std::mt19937_64& rng) {
  const std::size_t m = outputs.size();
  if (m == 0 || inputs.size() != m) throw UsageError("member counts differ");
  std::vector<std::vector<int>> signs(trials, std::vector<int>(m));
  std::bernoulli_distribution coin;
  for (auto& s : signs)
    for (auto& r : s) r = coin(rng) ? 1 : -1;

  auto moment = [&](const std::vector<LiftVector>& vs) {
    const std::size_t len = vs[0].v.size();
    for (const auto& v : vs)
      if (v.v.size() != len) throw UsageError("members have different lift layouts");
    double acc = 0;
    if (q == 2) {
      std::vector<double> G(m * m, 0.0);
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j; k < m; ++k) {
          double s = 0;
          for (std::size_t i = 0; i < len; ++i) s += vs[0].w[i] * (std::conj(vs[j].v[i]) * vs[k].v[i]).real();
          G[j * m + k] = G[k * m + j] = s;
        }
      for (const auto& r : signs) {
        double s = 0;
        for (std::size_t j = 0; j < m; ++j)
          for (std::size_t k = 0; k < m; ++k) s += r[j] * r[k] * G[j * m + k];
        acc += s;
      }
      return acc / trials;
    }
    cvec sum(len);
    for (const auto& r : signs) {
      std::fill(sum.begin(), sum.end(), cd(0));
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < len; ++i) sum[i] += double(r[j]) * vs[j].v[i];
      acc += std::pow(lift_norm(LiftVector{sum, vs[0].w}, q), q);
    }
    return acc / trials;
  };
  const double num = moment(outputs), den = moment(inputs);
  if (!(den > 0)) throw EvaluationError("zero input norm");
  return std::pow(num / den, 1 / q);
}

ProbeReport estimate_rbound(const ProbeFamily& family,
                            const ProbeSampler& sampler, const ProbeConfig& cfg, int draws) {
  cfg.validate();
  if (draws < 1) throw ConfigError("at least one draw per decade is required");
  ProbeReport rep;
  rep.family = family.name;
  rep.trials = cfg.trials;
  for (int dec = cfg.decade_lo; dec < cfg.decade_hi; ++dec) {
    std::vector<cd> pool;
    const double lo = std::pow(10.0, dec), hi = std::pow(10.0, dec + 1);
    rvec mags;
    if (cfg.lambda_samples.empty()) {
      for (int i = 0; i < 5; ++i) mags.push_back(std::pow(10.0, dec + i / 5.0));
    } else {
      for (double l : cfg.lambda_samples)
        if (l >= lo && (l < hi || (dec + 1 == cfg.decade_hi && l <= hi))) mags.push_back(l);
    }
    for (double r : mags)
      for (double a : cfg.ray_args) pool.push_back(std::polar(r, a));
    if (pool.empty()) continue;

    DecadeStat st;
    st.decade = dec;
    st.min_ratio = INFINITY;
    for (int draw = 0; draw < draws; ++draw) {
      std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed), static_cast<std::uint32_t>(cfg.rng_seed >> 32),
                        static_cast<std::uint32_t>(dec + 1000), static_cast<std::uint32_t>(draw)};
      std::mt19937_64 rng(seq);
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      std::vector<cd> lams(cfg.m);
      std::vector<ProbeInput> ins(cfg.m);
      std::vector<LiftVector> outs(cfg.m), lifts(cfg.m);
      for (int j = 0; j < cfg.m; ++j) lams[j] = pool[pick(rng)];
      for (int j = 0; j < cfg.m; ++j) {
        // redraw degenerate data with a vanishing lift
        for (int attempt = 0;; ++attempt) {
          ins[j] = sampler(rng, draw);
          lifts[j] = family.input_lift(lams[j], ins[j]);
          if (lift_norm(lifts[j], cfg.q) > 0) break;
          if (attempt >= 10) throw EvaluationError("sampler keeps producing zero data");
          ++rep.redraws;
        }
      }
      std::vector<std::string> errors(cfg.m);
      for_each_index(cfg.m, Exec::parallel, [&](std::size_t j) {
        try {
          outs[j] = family.apply(lams[j], ins[j]);
        } catch (const std::exception& e) {
          errors[j] = e.what();
        }
      });
      for (const auto& e : errors)
        if (!e.empty()) throw EvaluationError("probe member failed: " + e);
      const double r = rademacher_ratio(outs, lifts, cfg.q, cfg.trials, rng);
      st.max_ratio = std::max(st.max_ratio, r);
      st.min_ratio = std::min(st.min_ratio, r);
      ++st.draws;
    }
    rep.decades.push_back(st);
  }
  if (rep.decades.empty()) throw ConfigError("no lambda samples fall in the decade range");
  double mx = 0, mn = INFINITY;
  for (const auto& d : rep.decades) {
    mx = std::max(mx, d.max_ratio);
    mn = std::min(mn, d.max_ratio);
  }
  rep.global_max = mx;
  rep.spread = mx / mn;
  return rep;
}

std::string ProbeReport::to_json() const {
  nlohmann::json j;
  j["family"] = family;
  j["trials"] = trials;
  j["redraws"] = redraws;
  j["global_max"] = global_max;
  j["spread"] = spread;
  for (const auto& d : decades)
    j["decades"].push_back({{"decade", d.decade}, {"max_ratio", d.max_ratio}, {"min_ratio", d.min_ratio},
                            {"draws", d.draws}});
  return j.dump(2);
}

}  // namespace hsr
