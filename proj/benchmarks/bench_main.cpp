#include "c2plus/global_extension.hpp"
#include "c2plus/one_dim.hpp"
#include "c2plus/qp_solver.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace c2plus;

namespace {

std::vector<Point2> random_points(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point2> p;
  for (int i = 0; i < n; ++i) p.push_back({u(rng), u(rng)});
  return p;
}

std::vector<double> smooth_values(const State& st) {
  std::vector<double> f;
  for (const Point2& p : st.points()) f.push_back((1 + p.x * p.y) * (1 + p.x * p.y));
  return f;
}

void BM_Preprocess(benchmark::State& state) {
  const auto pts = random_points(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(preprocess(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Preprocess)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNLogN);

// Cold queries: every iteration pays for the transition jets it touches.
void BM_GlobalJetCold(benchmark::State& state) {
  const State st = preprocess(random_points(static_cast<int>(state.range(0)), 2));
  const auto f = smooth_values(st);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto _ : state) {
    TransitionCache cache;
    benchmark::DoNotOptimize(global_jet(st, {u(rng), u(rng)}, f, 1e4, &cache));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GlobalJetCold)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oLogN);

// Grid-style evaluation sharing one cache.
void BM_GlobalJetWarm(benchmark::State& state) {
  const State st = preprocess(random_points(2000, 4));
  const auto f = smooth_values(st);
  TransitionCache cache;
  for (int a = 0; a < 100; ++a)
    for (int b = 0; b < 100; ++b) global_jet(st, {-1 + a / 49.5, -1 + b / 49.5}, f, 1e4, &cache);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(global_jet(st, {u(rng), u(rng)}, f, 1e4, &cache));
}
BENCHMARK(BM_GlobalJetWarm);

void BM_TraceNorm(benchmark::State& state) {
  const State st = preprocess(random_points(static_cast<int>(state.range(0)), 6));
  const auto f = smooth_values(st);
  for (auto _ : state) benchmark::DoNotOptimize(trace_norm(st, f));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TraceNorm)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kSecond)->Iterations(1)->Complexity(benchmark::oN);

void BM_QuadL1(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatX A(d, d), L(3 * d, d);
  for (auto& v : A.reshaped()) v = u(rng);
  for (auto& v : L.reshaped()) v = u(rng);
  VecX q(d), c(3 * d);
  for (auto& v : q) v = u(rng);
  for (auto& v : c) v = u(rng);
  const QuadL1Problem p = QuadL1Problem::unconstrained(A.transpose() * A, q, L, c);
  for (auto _ : state) benchmark::DoNotOptimize(solve_quad_l1(p));
}
BENCHMARK(BM_QuadL1)->DenseRange(2, 12, 2)->Arg(24)->Arg(48);

void BM_OneDimNonneg(benchmark::State& state) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SortedSamples s;
  for (int i = 0; i < state.range(0); ++i) s.t.push_back((i + 0.5 * u(rng)) / static_cast<double>(state.range(0)));
  for (int i = 0; i < state.range(0); ++i) s.v.push_back(u(rng));
  for (auto _ : state) benchmark::DoNotOptimize(oned_nonneg_jet(s, u(rng)));
}
BENCHMARK(BM_OneDimNonneg)->Arg(16)->Arg(256)->Arg(4096);

}  // namespace
BENCHMARK_MAIN();
