#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "clover/bench.hpp"
#include "clover/decide.hpp"
#include "clover/ground.hpp"
#include "clover/pipeline.hpp"
#include "clover/sat.hpp"
#include "clover/text.hpp"
#include "clover/verify.hpp"

using namespace clover;

namespace {

const Theory& potters() {
  static const Theory th = parse_theory(
      "sort positions = 1..6\n"
      "sort potters = {Larsen, Mills, Neiman, Olivera, Park, Reigel, Serra, Vance}\n"
      "func displayed : positions -> potters");
  return th;
}

const char* kPhi = "forall p: positions. displayed(p) = Reigel -> p = 1 | p = 6";
const char* kOnlyFirst = "forall p: positions. displayed(p) = Reigel -> p = 1";

// n pigeons into n - 1 holes.
Cnf pigeonhole(int n) {
  Cnf cnf;
  auto var = [n](int p, int h) { return static_cast<Lit>(p * (n - 1) + h + 1); };
  cnf.num_vars = static_cast<std::uint32_t>(n * (n - 1));
  for (int p = 0; p < n; ++p) {
    std::vector<Lit> some;
    for (int h = 0; h < n - 1; ++h) some.push_back(var(p, h));
    cnf.clauses.push_back(some);
  }
  for (int h = 0; h < n - 1; ++h)
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) cnf.clauses.push_back({-var(p, h), -var(q, h)});
  return cnf;
}

void BM_SolvePigeonhole(benchmark::State& state) {
  Cnf cnf = pigeonhole(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve(cnf).status);
}
BENCHMARK(BM_SolvePigeonhole)->DenseRange(5, 8)->Unit(benchmark::kMillisecond);

void BM_SolveRandom3Sat(benchmark::State& state) {
  // Clause/variable ratio near the hardness threshold.
  std::mt19937_64 rng(7);
  auto n = static_cast<std::uint32_t>(state.range(0));
  Cnf cnf;
  cnf.num_vars = n;
  for (std::uint32_t c = 0; c < n * 426 / 100; ++c) {
    std::vector<Lit> clause;
    for (int k = 0; k < 3; ++k) {
      Lit v = static_cast<Lit>(1 + rng() % n);
      clause.push_back(rng() % 2 ? v : -v);
    }
    cnf.clauses.push_back(clause);
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve(cnf).status);
}
BENCHMARK(BM_SolveRandom3Sat)->Arg(50)->Arg(100)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_GroundExample(benchmark::State& state) {
  Formula phi = parse_formula(potters(), kPhi);
  for (auto _ : state) benchmark::DoNotOptimize(ground(potters(), {phi}).cnf.clauses.size());
}
BENCHMARK(BM_GroundExample);

void BM_Equivalent(benchmark::State& state) {
  Formula a = parse_formula(potters(), kPhi);
  Formula b = parse_formula(potters(), "~exists p: positions. displayed(p) = Reigel & p != 1 & p != 6");
  for (auto _ : state) benchmark::DoNotOptimize(equivalent(potters(), a, b));
}
BENCHMARK(BM_Equivalent);

void BM_CounterInterpretation(benchmark::State& state) {
  Formula a = parse_formula(potters(), kPhi);
  Formula b = parse_formula(potters(), kOnlyFirst);
  for (auto _ : state) benchmark::DoNotOptimize(counter_interpretation(potters(), a, b));
}
BENCHMARK(BM_CounterInterpretation);

void BM_DisprovingPool(benchmark::State& state) {
  std::vector<std::string> pool{kOnlyFirst, kPhi, "forall p: positions. displayed(p) = Reigel -> p = 6",
                                "displayed(1) = Reigel | displayed(6) = Reigel",
                                "~exists p: positions. displayed(p) = Reigel & p != 1 & p != 6"};
  CandidateSet set = filter_satisfiable(potters(), "s", pool);
  GroundTruthOracle oracle(parse_formula(potters(), kPhi));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(select_by_disproving(set, oracle, seed++).selected);
}
BENCHMARK(BM_DisprovingPool)->Unit(benchmark::kMillisecond);

void BM_PipelineStubFixture(benchmark::State& state) {
  Dataset ds = load_dataset(std::filesystem::path(CLOVER_STUB_DIR) / "dataset.json");
  PromptAssets assets = PromptAssets::builtin();
  for (auto _ : state) {
    auto stub = StubLlm::load(std::filesystem::path(CLOVER_STUB_DIR) / "llm.json");
    benchmark::DoNotOptimize(run_problems(ds.problems, *stub, assets, PipelineConfig{}).size());
  }
}
BENCHMARK(BM_PipelineStubFixture)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
