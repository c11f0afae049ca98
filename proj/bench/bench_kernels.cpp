// Serial reference vs OpenMP kernels. Thread count follows HSR_THREADS.

#include <benchmark/benchmark.h>

#include <cmath>

#include "hsr/field_pipeline.hpp"
#include "hsr/parallel.hpp"
#include "hsr/symbols.hpp"

using namespace hsr;

namespace {

GridSpec bench_grid(int points) {
  GridSpec s;
  s.dim = 2;
  s.half_length = 40;
  s.points = points;
  s.L = 40;
  s.nz = 257;
  return s;
}

void trace_spectra(const GridSpec& s, cvec& g, cvec& h) {
  g.assign(s.tangential_count(), 0.0);
  h.assign(s.tangential_count(), 0.0);
  for (std::size_t t = 0; t < g.size(); ++t) {
    const double x = s.xi_of(t)[0];
    g[t] = std::exp(-x * x / 2);
    h[t] = cd(0, x) * std::exp(-x * x / 2);
  }
}

void BM_boundary_correction(benchmark::State& st, Exec exec) {
  set_threads(default_threads());
  const FluidParams p = classify(1, 1, 2);
  const GridSpec s = bench_grid(static_cast<int>(st.range(0)));
  cvec g, h;
  trace_spectra(s, g, h);
  PipelineOptions opt;
  opt.exec = exec;
  for (auto _ : st) benchmark::DoNotOptimize(boundary_correction(p, s, cd(1, 0.5), g, {h}, opt));
  st.counters["threads"] = exec == Exec::serial ? 1 : current_threads();
}

void BM_symbol_class(benchmark::State& st, Exec exec) {
  set_threads(default_threads());
  const FluidParams p = classify(1, 1, 2);
  const SymbolSpec m1 = make_named_symbol(p, "m1");
  const int n = static_cast<int>(st.range(0));
  const ScanGrid g = ScanGrid::log_grid(1e-2, 1e2, n, 1e-2, 1e2, n, 5, 1.4);
  for (auto _ : st) benchmark::DoNotOptimize(verify_symbol_class(m1, g, 2, exec));
  st.counters["threads"] = exec == Exec::serial ? 1 : current_threads();
}

}  // namespace

BENCHMARK_CAPTURE(BM_boundary_correction, serial, Exec::serial)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_boundary_correction, parallel, Exec::parallel)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_symbol_class, serial, Exec::serial)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_symbol_class, parallel, Exec::parallel)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
