// Serial against OpenMP variants of the hot kernels, plus the fused B
// operator against its composed reference. Set OMP_NUM_THREADS to compare
// thread counts; on a single core both policies should time alike.

#include <benchmark/benchmark.h>

#include "ds1/evolution.hpp"
#include "ds1/log.hpp"
#include "ds1/reference.hpp"
#include "ds1/singular_ops.hpp"

namespace {

using ds1::exec::Policy;

ds1::SpectralGrid grid_for(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  return ds1::make_grid(n, n, 4.0, 4.0);
}

template <Policy P>
void BM_B_fused(benchmark::State& state) {
  const auto g = grid_for(state);
  ds1::NonlocalOperator B(g, P);
  const ds1::RealField f = ds1::gaussian(g, 1.0);
  ds1::RealField out(g);
  for (auto _ : state) {
    B.apply(f.values(), out.values());
    benchmark::DoNotOptimize(out.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}

void BM_B_reference(benchmark::State& state) {
  const auto g = grid_for(state);
  const ds1::RealField f = ds1::gaussian(g, 1.0);
  // The composed route warns about its intermediate products on every call.
  const auto previous = ds1::set_warning_handler([](const std::string&) {});
  for (auto _ : state) benchmark::DoNotOptimize(ds1::reference::apply_B(f));
  ds1::set_warning_handler(previous);
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}

template <Policy P>
void BM_nonlinear(benchmark::State& state) {
  const auto g = grid_for(state);
  ds1::Etdrk4 stepper(g, P);
  const ds1::ComplexField u = ds1::forward(ds1::to_complex(ds1::gaussian(g, 3.0)));
  ds1::aligned_vector<ds1::cplx> out(u.values().size());
  for (auto _ : state) {
    stepper.nonlinear(u.values(), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}

template <Policy P>
void BM_etdrk4_step(benchmark::State& state) {
  const auto g = grid_for(state);
  ds1::Etdrk4 stepper(g, P);
  const ds1::ComplexField u0 = ds1::forward(ds1::to_complex(ds1::gaussian(g, 3.0)));
  ds1::aligned_vector<ds1::cplx> u(u0.values().begin(), u0.values().end());
  stepper.step(u, 1e-4);  // coefficients
  for (auto _ : state) {
    state.PauseTiming();
    std::copy(u0.values().begin(), u0.values().end(), u.begin());
    state.ResumeTiming();
    stepper.step(u, 1e-4);
    benchmark::DoNotOptimize(u.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}

}  // namespace

BENCHMARK(BM_B_fused<Policy::serial>)->Name("B_fused/serial")->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_B_fused<Policy::omp>)->Name("B_fused/omp")->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_B_reference)->Name("B_reference")->RangeMultiplier(2)->Range(128, 512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nonlinear<Policy::serial>)->Name("nonlinear/serial")->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_nonlinear<Policy::omp>)->Name("nonlinear/omp")->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_etdrk4_step<Policy::serial>)->Name("etdrk4_step/serial")->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_etdrk4_step<Policy::omp>)->Name("etdrk4_step/omp")->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
