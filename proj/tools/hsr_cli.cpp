#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "hsr/field_pipeline.hpp"
#include "hsr/io.hpp"
#include "hsr/lopatinski.hpp"
#include "hsr/mode_solver.hpp"
#include "hsr/oracle_bvp.hpp"
#include "hsr/parallel.hpp"
#include "hsr/rbound.hpp"
#include "hsr/symbols.hpp"

using namespace hsr;
using nlohmann::json;

namespace {

struct ParamOpts {
  std::string params;
  double mu = NAN, nu = NAN, kappa = NAN;
  double tol = 1e-12;

  void attach(CLI::App* app) {
    app->add_option("--params", params, "mu,nu,kappa or a key = value file");
    app->add_option("--mu", mu);
    app->add_option("--nu", nu);
    app->add_option("--kappa", kappa);
    app->add_option("--case-tol", tol, "tolerance of the case decision")->capture_default_str();
  }
  FluidParams resolve(json& cfg, RunManifest& man) const {
    ParamTriple t;
    if (!params.empty()) {
      t = parse_params(params);
      if (std::filesystem::is_regular_file(params)) man.add_input(params);
    } else if (!std::isnan(mu) && !std::isnan(nu) && !std::isnan(kappa)) {
      t = {mu, nu, kappa};
    } else {
      throw UsageError("give --params or all of --mu --nu --kappa");
    }
    cfg["mu"] = t.mu;
    cfg["nu"] = t.nu;
    cfg["kappa"] = t.kappa;
    cfg["case_tol"] = tol;
    return classify(t.mu, t.nu, t.kappa, tol);
  }
};

struct ModeOpts {
  std::string xi = "1", lambda = "1", g = "0", h;
  double sector = -1;
  void attach(CLI::App* app) {
    app->add_option("--xi", xi, "tangential frequency, comma list of N-1 entries")->capture_default_str();
    app->add_option("--lambda", lambda, "resolvent parameter, e.g. 1+2i")->capture_default_str();
    app->add_option("--g", g, "Neumann trace coefficient")->capture_default_str();
    app->add_option("--h", h, "tangential velocity trace coefficients, comma list");
    app->add_option("--sector", sector, "accept |arg lambda| < pi - EPS instead of Re lambda > 0");
  }
  TangentialMode mode(const FluidParams& p, json& cfg) const {
    const rvec x = parse_real_list(xi);
    const cd lam = parse_complex(lambda);
    cfg["xi"] = x;
    cfg["lambda"] = complex_json(lam);
    ModeOptions opt;
    if (sector >= 0) {
      opt.sector = true;
      opt.eps = sector;
      cfg["sector_eps"] = sector;
    }
    return make_mode(x, lam, &p, opt);
  }
  BoundaryTrace trace(int dim, json& cfg) const {
    BoundaryTrace t;
    t.g_hat = parse_complex(g);
    t.h_hat = parse_complex_list(h);
    if (t.h_hat.empty()) t.h_hat.assign(dim - 1, 0.0);
    if (static_cast<int>(t.h_hat.size()) != dim - 1) throw UsageError("--h needs N-1 entries");
    cfg["g"] = complex_json(t.g_hat);
    for (cd z : t.h_hat) cfg["h"].push_back(complex_json(z));
    return t;
  }
};

std::string cstr(cd z) {
  if (z.imag() == 0) return fmt(z.real());
  return fmt(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt(std::abs(z.imag())) + "i";
}

// primary output goes to --out or stdout
struct Sink {
  std::string path;
  std::ostringstream buf;
  void flush(RunManifest& man) {
    if (path.empty()) {
      std::cout << buf.str();
      return;
    }
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write " + path);
    f << buf.str();
    man.outputs.push_back(path);
  }
};

int tolerance_exit(bool ok, const std::string& what) {
  if (!ok) std::cerr << "tolerance failure: " << what << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"half-space resolvent toolkit for the linearized Korteweg system"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  std::string out, manifest_path;
  app.add_option("--threads", threads, "worker cap (default: HSR_THREADS or the OpenMP default)");
  app.add_option("--out", out, "write the primary output here instead of stdout");
  app.add_option("--manifest", manifest_path, "manifest path (default: <out>.manifest.json, else stderr)");

  ParamOpts po;
  ModeOpts mo;

  auto* c_classify = app.add_subcommand("classify", "case decision and the roots s1, s2");
  po.attach(c_classify);
  bool as_json = false;
  c_classify->add_flag("--json", as_json);

  auto* c_roots = app.add_subcommand("roots", "characteristic roots of one tangential mode");
  po.attach(c_roots);
  mo.attach(c_roots);

  std::string sym_name, grid_spec, asym;
  int max_order = 2;
  bool list_symbols = false;
  auto* c_sym = app.add_subcommand("symbol-check", "empirical multiplier-class constants per dyadic band");
  po.attach(c_sym);
  c_sym->add_option("--name", sym_name);
  c_sym->add_option("--grid", grid_spec, "xi=lo:hi,nx=..,lambda=lo:hi,nl=..,na=..,arg=..");
  c_sym->add_option("--max-order", max_order)->capture_default_str();
  c_sym->add_option("--asymptotic", asym, "xi or lambda: ratio against the leading asymptotic form");
  c_sym->add_flag("--list", list_symbols);

  double power = NAN;
  auto* c_lop = app.add_subcommand("lopatinski-scan", "normalized lower bound of a boundary symbol");
  po.attach(c_lop);
  c_lop->add_option("--name", sym_name)->required();
  c_lop->add_option("--grid", grid_spec);
  c_lop->add_option("--power", power)->required();

  std::string emit_profile;
  auto* c_mode = app.add_subcommand("solve-mode", "closed-form solution of one mode with residuals");
  po.attach(c_mode);
  mo.attach(c_mode);
  c_mode->add_option("--emit-profile", emit_profile, "write the profiles as JSON");

  std::string data_dir, out_dir = "field_out";
  std::string field_lambda = "1";
  double field_tol = 1e-6;
  bool no_decay = false;
  auto* c_field = app.add_subcommand("solve-field", "FFT-assembled half-space solve on a grid");
  po.attach(c_field);
  c_field->add_option("--lambda", field_lambda)->capture_default_str();
  c_field->add_option("--data", data_dir, "directory with d, f1..fN, g field files (missing = zero)")->required();
  c_field->add_option("--out-dir", out_dir)->capture_default_str();
  c_field->add_option("--tol", field_tol, "residual tolerance")->capture_default_str();
  c_field->add_flag("--no-decay-check", no_decay);

  int bvp_n = 4096, scheme = 2, stride = 1;
  double bvp_L = 0, oracle_tol = 1e-4;
  auto* c_oracle = app.add_subcommand("oracle-compare", "closed form against the finite-difference oracle");
  po.attach(c_oracle);
  mo.attach(c_oracle);
  c_oracle->add_option("--n", bvp_n)->capture_default_str();
  c_oracle->add_option("--L", bvp_L, "vertical length (0: 40 / min Re rate)")->capture_default_str();
  c_oracle->add_option("--scheme", scheme, "2 or 4")->check(CLI::IsMember({2, 4}))->capture_default_str();
  c_oracle->add_option("--tol", oracle_tol)->capture_default_str();
  c_oracle->add_option("--stride", stride, "emit every stride-th node")->check(CLI::PositiveNumber);

  std::string family = "A2", decades = "-2:2";
  ProbeConfig pc;
  ProbeGrid pg;
  bool deriv = false, identity = false;
  double rel_step = 1e-3;
  auto* c_rb = app.add_subcommand("rbound", "Monte-Carlo Rademacher ratio of a solution-operator family");
  po.attach(c_rb);
  c_rb->add_option("--family", family)->check(CLI::IsMember({"A2", "B2", "A", "B"}))->capture_default_str();
  c_rb->add_option("--decades", decades, "lo:hi exponents of |lambda|")->capture_default_str();
  c_rb->add_option("--m", pc.m)->capture_default_str();
  c_rb->add_option("--trials", pc.trials)->capture_default_str();
  c_rb->add_option("--seed", pc.rng_seed)->capture_default_str();
  c_rb->add_option("--q", pc.q)->capture_default_str();
  c_rb->add_option("--draws", pc.draws, "0: one per frequency shell plus one full-band")->capture_default_str();
  c_rb->add_option("--points", pg.points)->capture_default_str();
  c_rb->add_option("--half-length", pg.half_length)->capture_default_str();
  c_rb->add_option("--band", pg.band)->capture_default_str();
  c_rb->add_flag("--log-derivative", deriv, "probe lambda d/dlambda of the family");
  c_rb->add_option("--rel-step", rel_step)->capture_default_str();
  c_rb->add_flag("--identity", identity, "calibration family");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  RunManifest man;
  json cfg;
  Sink sink{out, {}};
  int status = 0;
  try {
    set_threads(threads > 0 ? threads : default_threads());
    cfg["threads"] = current_threads();
    CLI::App* sub = app.get_subcommands().front();
    man.subcommand = sub->get_name();

    if (sub == c_classify) {
      const FluidParams p = po.resolve(cfg, man);
      if (as_json) {
        json j{{"case", case_name(p.tag)}, {"eta", p.eta}, {"s1", complex_json(p.s1)}, {"s2", complex_json(p.s2)},
               {"eps_star", p.eps_star()}};
        sink.buf << j.dump(2) << "\n";
      } else {
        sink.buf << "case = " << case_name(p.tag) << "\n"
                 << "eta = " << fmt(p.eta) << "\n"
                 << "s1 = " << cstr(p.s1) << "\n"
                 << "s2 = " << cstr(p.s2) << "\n"
                 << "eps_star = " << fmt(p.eps_star()) << "\n";
      }
    } else if (sub == c_roots) {
      const FluidParams p = po.resolve(cfg, man);
      const TangentialMode m = mo.mode(p, cfg);
      const RootData r = compute_roots(p, m);
      json j{{"case", case_name(p.tag)},
             {"t1", complex_json(r.t1)},
             {"t2", complex_json(r.t2)},
             {"omega", complex_json(r.omega)},
             {"shift1", complex_json(r.shift1)},
             {"shift2", complex_json(r.shift2)},
             {"shift_omega", complex_json(r.shift_omega)},
             {"degeneracy", degeneracy_name(r.degeneracy)},
             {"min_re", r.min_re()},
             {"char_poly_t1", std::abs(char_poly(p, m, r.t1))},
             {"char_poly_t2", std::abs(char_poly(p, m, r.t2))}};
      sink.buf << j.dump(2) << "\n";
    } else if (sub == c_sym) {
      if (list_symbols) {
        for (const auto& n : named_symbols()) sink.buf << n << "\n";
      } else {
        if (sym_name.empty()) throw UsageError("--name is required");
        const FluidParams p = po.resolve(cfg, man);
        cfg["name"] = sym_name;
        if (!asym.empty()) {
          if (asym != "xi" && asym != "lambda") throw UsageError("--asymptotic takes xi or lambda");
          cfg["asymptotic"] = asym;
          const AsymptoticReport rep = asymptotic_check(
              p, sym_name, asym == "xi" ? Regime::xi_dominant : Regime::lambda_dominant, logspace(1e-8, 1e-1, 15));
          CsvWriter w(sink.buf, {"y", "ratio_re", "ratio_im"});
          for (const auto& [y, r] : rep.ratios) w.add(y).add(r), w.end_row();
        } else {
          const ScanGrid g = parse_scan_grid(grid_spec);
          cfg["grid"] = grid_spec;
          cfg["max_order"] = max_order;
          const ClassReport rep = verify_symbol_class(make_named_symbol(p, sym_name), g, max_order);
          CsvWriter w(sink.buf, {"band", "alpha", "n", "constant", "stable", "vanishing"});
          for (const auto& e : rep.entries) {
            std::string a;
            for (std::size_t k = 0; k < e.alpha.size(); ++k) a += (k ? ";" : "") + std::to_string(e.alpha[k]);
            for (const auto& [b, c] : e.band_max) {
              w.add(b).add(a).add(e.n).add(c).add(e.stable ? "1" : "0").add(e.vanishing ? "1" : "0");
              w.end_row();
            }
          }
          status = tolerance_exit(rep.stable(), "band constants of " + sym_name + " vary by more than 2x");
        }
      }
    } else if (sub == c_lop) {
      const FluidParams p = po.resolve(cfg, man);
      const ScanGrid g = parse_scan_grid(grid_spec);
      cfg["name"] = sym_name;
      cfg["grid"] = grid_spec;
      cfg["power"] = power;
      const LowerBoundReport rep = lower_bound_scan(p, sym_name, g, power);
      CsvWriter w(sink.buf, {"band", "inf", "argmin_xi", "argmin_lambda_re", "argmin_lambda_im"});
      auto xs = [](const rvec& x) {
        std::string s;
        for (std::size_t k = 0; k < x.size(); ++k) s += (k ? ";" : "") + fmt(x[k]);
        return s;
      };
      for (const auto& [b, v] : rep.band_inf) {
        const auto& am = rep.band_argmin.at(b);
        w.add(std::to_string(b)).add(v).add(xs(am.first)).add(am.second), w.end_row();
      }
      w.add(std::string("all")).add(rep.inf).add(xs(rep.argmin_xi)).add(rep.argmin_lambda), w.end_row();
      status = tolerance_exit(!rep.potential_zero, "lower bound below " + fmt(kPotentialZero));
    } else if (sub == c_mode) {
      const FluidParams p = po.resolve(cfg, man);
      const TangentialMode m = mo.mode(p, cfg);
      const BoundaryTrace tr = mo.trace(m.dim, cfg);
      const ModeSolution sol = solve_mode(p, m, tr);
      if (!emit_profile.empty()) {
        json j;
        j["case"] = case_name(sol.coeffs.tag);
        j["rho"] = json::parse(sol.rho.to_json());
        j["phi"] = json::parse(sol.phi.to_json());
        for (const auto& u : sol.u) j["u"].push_back(json::parse(u.to_json()));
        std::ofstream f(emit_profile);
        if (!f) throw UsageError("cannot write " + emit_profile);
        f << j.dump(2) << "\n";
        man.outputs.push_back(emit_profile);
      }
      CsvWriter w(sink.buf, {"x", "mass", "tangential", "normal"});
      const rvec xs = default_sample_points(sol.roots);
      for (double x : xs) {
        const ResidualReport r = pde_residual(p, m, sol, tr, {x});
        w.add(x).add(r.mass).add(r.tangential).add(r.normal), w.end_row();
      }
      const ResidualReport all = pde_residual(p, m, sol, tr, xs);
      std::cerr << "pde residual " << fmt(all.pde()) << ", boundary residual " << fmt(all.bc_rel) << "\n";
      status = tolerance_exit(all.pde() <= 1e-10 && all.bc_rel <= 1e-12, "closed-form residuals");
    } else if (sub == c_field) {
      const FluidParams p = po.resolve(cfg, man);
      const cd lam = parse_complex(field_lambda);
      cfg["lambda"] = complex_json(lam);
      cfg["data"] = data_dir;
      auto load = [&](const std::string& name) -> GridField {
        const std::string path = data_dir + "/" + name;
        if (!std::filesystem::exists(path + ".json")) return {};
        man.add_input(path + ".json");
        man.add_input(path);
        return read_field(path);
      };
      GridField d = load("d"), g = load("g");
      GridSpec spec;
      bool have = false;
      if (!d.values.empty()) spec = d.spec, have = true;
      std::vector<GridField> f;
      for (int J = 1; J <= 4; ++J) {
        GridField fj = load("f" + std::to_string(J));
        if (fj.values.empty()) break;
        if (!have) spec = fj.spec, have = true;
        f.push_back(std::move(fj));
      }
      if (!have && !g.values.empty()) throw UsageError("trace-only data needs a d or f file to fix the vertical grid");
      if (!have) throw UsageError("no field files in " + data_dir);
      if (!f.empty() && static_cast<int>(f.size()) != spec.dim) throw UsageError("need f1..fN for all N components");
      if (!g.values.empty() && !(g.spec == spec.trace())) throw UsageError("g does not match the grid");
      for (const auto& fj : f)
        if (!(fj.spec == spec)) throw UsageError("f fields do not match the grid");
      if (g.values.empty()) g = GridField::zeros(spec.trace(), FieldRole::datum);
      if (d.values.empty()) d = GridField::zeros(spec, FieldRole::datum);
      cfg["grid"] = json{{"dim", spec.dim}, {"points", spec.points}, {"half_length", spec.half_length},
                         {"L", spec.L}, {"nz", spec.nz}};
      PipelineOptions opt;
      opt.validate_decay = !no_decay;
      const ResolventResult res = solve_resolvent(p, spec, d, f, g, lam, opt);
      std::filesystem::create_directories(out_dir);
      write_field(out_dir + "/rho", res.rho);
      man.outputs.push_back(out_dir + "/rho");
      for (std::size_t J = 0; J < res.u.size(); ++J) {
        write_field(out_dir + "/u" + std::to_string(J + 1), res.u[J]);
        man.outputs.push_back(out_dir + "/u" + std::to_string(J + 1));
      }
      json r{{"mass", res.residuals.mass},
             {"momentum", res.residuals.momentum},
             {"bc_velocity", res.residuals.bc_velocity},
             {"bc_neumann", res.residuals.bc_neumann},
             {"un_trace", res.un_trace}};
      std::ofstream rf(out_dir + "/residuals.json");
      rf << r.dump(2) << "\n";
      man.outputs.push_back(out_dir + "/residuals.json");
      sink.buf << r.dump(2) << "\n";
      status = tolerance_exit(res.residuals.pde() <= field_tol && res.residuals.bc() <= field_tol,
                              "field residuals above " + fmt(field_tol));
    } else if (sub == c_oracle) {
      const FluidParams p = po.resolve(cfg, man);
      const TangentialMode m = mo.mode(p, cfg);
      const BoundaryTrace tr = mo.trace(m.dim, cfg);
      BvpConfig bc;
      bc.n = bvp_n;
      bc.L = bvp_L;
      bc.scheme = scheme == 4 ? BvpScheme::fourth_order_fd : BvpScheme::second_order_fd;
      cfg["n"] = bvp_n;
      cfg["L"] = bvp_L;
      cfg["scheme"] = scheme;
      const ModeSolution sol = solve_mode(p, m, tr);
      const BvpSolution o = solve_mode_bvp(p, m, tr, bc);
      std::vector<std::pair<std::string, const VerticalProfile*>> comps{{"rho", &sol.rho}, {"phi", &sol.phi}};
      std::vector<const cvec*> ovals{&o.rho, &o.phi};
      for (std::size_t J = 0; J < sol.u.size(); ++J) {
        comps.emplace_back("u" + std::to_string(J + 1), &sol.u[J]);
        ovals.push_back(&o.u[J]);
      }
      CsvWriter w(sink.buf, {"x", "component", "closed_re", "closed_im", "oracle_re", "oracle_im", "abs_err", "rel_err"});
      for (std::size_t c = 0; c < comps.size(); ++c) {
        double scale = 0;
        for (double x : o.x) scale = std::max(scale, std::abs(comps[c].second->eval(x)));
        for (std::size_t i = 0; i < o.x.size(); i += stride) {
          const cd cv = comps[c].second->eval(o.x[i]);
          const double e = std::abs(cv - (*ovals[c])[i]);
          w.add(o.x[i]).add(comps[c].first).add(cv).add((*ovals[c])[i]).add(e).add(scale > 0 ? e / scale : e);
          w.end_row();
        }
      }
      const BvpComparison cmp = compare_with_closed_form(o, sol);
      std::cerr << "max relative error " << fmt(cmp.max_rel) << " (" << cmp.worst_component << " at x = "
                << fmt(cmp.worst_x) << ")\n";
      status = tolerance_exit(cmp.max_rel <= oracle_tol, "oracle disagreement above " + fmt(oracle_tol));
    } else if (sub == c_rb) {
      const FluidParams p = po.resolve(cfg, man);
      const auto colon = decades.find(':');
      if (colon == std::string::npos) throw UsageError("--decades expects lo:hi");
      pc.decade_lo = std::stoi(decades.substr(0, colon));
      pc.decade_hi = std::stoi(decades.substr(colon + 1));
      const FamilyKind k = family_from_name(family);
      ProbeFamily fam = identity ? identity_family(p, k, pg) : make_family(p, k, pg);
      if (deriv) fam = lambda_log_derivative(fam, rel_step);
      cfg["family"] = fam.name;
      cfg["decades"] = decades;
      cfg["m"] = pc.m;
      cfg["trials"] = pc.trials;
      cfg["seed"] = pc.rng_seed;
      cfg["q"] = pc.q;
      cfg["draws"] = pc.draws_for(pg);
      cfg["grid"] = json{{"points", pg.points}, {"half_length", pg.half_length}, {"band", pg.band}};
      if (deriv) cfg["rel_step"] = rel_step;
      const ProbeReport rep = estimate_rbound(fam, shell_sampler(pg, k), pc, pc.draws_for(pg));
      sink.buf << rep.to_json() << "\n";
    }
    man.config = cfg;
    sink.flush(man);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::string mpath = manifest_path;
  if (mpath.empty() && !out.empty()) mpath = out + ".manifest.json";
  if (mpath.empty())
    std::cerr << "manifest " << man.to_json().dump() << "\n";
  else
    man.write(mpath);
  return status;
}
