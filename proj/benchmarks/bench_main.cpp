#include <benchmark/benchmark.h>

#include "fracstab/char_fn.hpp"
#include "fracstab/criteria.hpp"
#include "fracstab/solver.hpp"
#include "fracstab/zero_oracle.hpp"

namespace {

using namespace fracstab;

MultiOrderSystem example3() {
  MultiOrderSystem s;
  s.order.alpha = {0.4, 0.3, 0.5};
  s.matrix.a = {{{-3.0, 0.0, 1.5}, {-0.5, 0.0, 0.5}, {6.0, -1.0, -3.0}}};
  s.x0 = {1.0, -2.0, 2.0};
  return s;
}

void BM_EvalQ(benchmark::State& st) {
  const auto s = example3();
  const GeneralCharFn q = build_general(s.order, s.matrix);
  Complex z{0.3, 0.7};
  for (auto _ : st) {
    benchmark::DoNotOptimize(eval(q, z));
    z += Complex{1e-9, 0.0};
  }
}
BENCHMARK(BM_EvalQ);

void BM_Assess(benchmark::State& st) {
  const auto s = example3();
  for (auto _ : st) benchmark::DoNotOptimize(assess(s));
}
BENCHMARK(BM_Assess);

void BM_CountZeros(benchmark::State& st) {
  const GeneralCharFn q = GeneralCharFn::from_terms({{2.1, 1.0}, {0.9, -0.5}, {0.5, -0.1}, {0.0, 0.2}});
  for (auto _ : st) benchmark::DoNotOptimize(count_rhp_zeros(q).zero_count);
}
BENCHMARK(BM_CountZeros);

void BM_Integrate(benchmark::State& st) {
  const auto s = example3();
  const SolverConfig cfg{0.005, static_cast<double>(st.range(0)) * 0.005};
  for (auto _ : st) benchmark::DoNotOptimize(integrate(s, cfg).x.back());
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_Integrate)->RangeMultiplier(4)->Range(1 << 10, 1 << 14)->Complexity(benchmark::oNSquared)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
