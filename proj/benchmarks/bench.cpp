#include <benchmark/benchmark.h>

#include <symmetra/construct.hpp>
#include <symmetra/field.hpp>
#include <symmetra/incompat.hpp>
#include <symmetra/io.hpp>
#include <symmetra/mub.hpp>
#include <symmetra/numerics.hpp>

#include <random>

using namespace symmetra;

namespace {

CMat randomHermitian(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  CMat m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = Complex(g(rng), g(rng));
  return hermitize(m);
}

}  // namespace

static void BM_HermitianSpectrum(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const CMat m = randomHermitian(dim, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hermitianSpectrum(m));
  }
}
BENCHMARK(BM_HermitianSpectrum)->Arg(4)->Arg(8)->Arg(16);

static void BM_LambdaExhaustiveMub(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Assemblage a = mubAssemblage(buildField(d));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lambdaExhaustive(a));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(a.bundle.sectionCount()));
}
BENCHMARK(BM_LambdaExhaustiveMub)->Arg(3)->Arg(4)->Arg(5);

static void BM_LambdaExhaustiveQubit(benchmark::State& state) {
  // 2^15 sections through the closed-form qubit path.
  const Assemblage a = platonicAssemblage("icosidodecahedron");
  for (auto _ : state) {
    benchmark::DoNotOptimize(lambdaExhaustive(a));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(a.bundle.sectionCount()));
}
BENCHMARK(BM_LambdaExhaustiveQubit);

static void BM_LambdaGreedy(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Assemblage a = mubAssemblage(buildField(d));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lambdaGreedy(a));
  }
}
BENCHMARK(BM_LambdaGreedy)->Arg(5)->Arg(8)->Arg(9);

static void BM_OracleOctahedron(benchmark::State& state) {
  const Assemblage a = platonicAssemblage("octahedron");
  const double eta = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(compatibilityOracle(a, eta, NoiseKind::White));
  }
}
BENCHMARK(BM_OracleOctahedron)->Arg(40)->Arg(55);

static void BM_ReduceBySymmetry(benchmark::State& state) {
  const GroupPtr g =
      readGroupFile(dataFile("groups/binary_icosahedral.json"));
  const ConstructionResult res =
      constructAssemblages(g, GroupingMode::projectiveMode());
  const ConstructedAssemblage* dodeca = nullptr;
  for (const auto& c : res.assemblages)
    if (c.assemblage.bundle.measurements() == 10) dodeca = &c;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reduceBySymmetry(dodeca->assemblage, dodeca->symmetry));
  }
}
BENCHMARK(BM_ReduceBySymmetry);

static void BM_ConstructBinaryOctahedral(benchmark::State& state) {
  const GroupPtr g =
      readGroupFile(dataFile("groups/binary_octahedral.json"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        constructAssemblages(g, GroupingMode::projectiveMode()));
  }
}
BENCHMARK(BM_ConstructBinaryOctahedral);

static void BM_MubAssemblage(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const FiniteField f = buildField(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mubAssemblage(f));
  }
}
BENCHMARK(BM_MubAssemblage)->Arg(5)->Arg(9);

BENCHMARK_MAIN();
