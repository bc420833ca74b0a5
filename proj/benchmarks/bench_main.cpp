#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "abe/kernel.hpp"
#include "abe/profile.hpp"
#include "abe/scheme.hpp"

using namespace abe;

namespace {

SchemeConfig config_for(double dx, std::size_t cells) {
  const Grid g(-0.5 * dx * static_cast<double>(cells), dx, cells);
  return SchemeConfig(EngquistOsher{}, KernelQuadrature::Build(dx, 1.0, choose_n(dx, 1.0, 1e-8)),
                      CorrectorMode::kPaper, g);
}

// One right-hand side evaluation on the default mesh size (4000 cells, N = 185).
void BM_RhsInto(benchmark::State& state) {
  const auto cells = static_cast<std::size_t>(state.range(0));
  const auto config = config_for(0.1, cells);
  const PhysicalParams p;
  std::vector<double> u(cells), out(cells), scratch(cells);
  for (std::size_t j = 0; j < cells; ++j) u[j] = 0.1 * std::sin(0.01 * static_cast<double>(j));
  for (auto _ : state) {
    rhs_into(u, p, config, out, scratch);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cells));
}
BENCHMARK(BM_RhsInto)->Arg(1000)->Arg(4000);

void BM_KernelBuild(benchmark::State& state) {
  const double dx = 1.0 / static_cast<double>(state.range(0));
  const auto n = choose_n(dx, 1.0, 1e-8);
  for (auto _ : state) benchmark::DoNotOptimize(KernelQuadrature::Build(dx, 1.0, n));
}
BENCHMARK(BM_KernelBuild)->Arg(10)->Arg(100);

void BM_ProfileEval(benchmark::State& state) {
  const AsymptoticProfile prof(0.15, 0.03);
  double x = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval(prof, 100.0, x));
    x = x > 3.0 ? -3.0 : x + 1e-3;
  }
}
BENCHMARK(BM_ProfileEval);

}  // namespace
BENCHMARK_MAIN();
