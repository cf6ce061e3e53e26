// OpenMP kernels against their serial references.
#include <benchmark/benchmark.h>

#include "digeco/clustering.hpp"
#include "digeco/complexity.hpp"
#include "digeco/rng.hpp"

using namespace digeco;

namespace {

SitePopulation make_population(std::size_t n) {
  Rng rng(1);
  SitePopulation p;
  p.alphabet_size = 20;
  for (std::size_t i = 0; i < n; ++i) {
    Genome g(1 + rng.index(60));
    for (auto& s : g) s = static_cast<std::uint32_t>(rng.index(20));
    p.sequences.push_back(std::move(g));
  }
  return p;
}

std::vector<std::vector<AttributeTuple>> make_items(std::size_t n) {
  Rng rng(2);
  std::vector<std::vector<AttributeTuple>> items(n);
  for (auto& it : items) {
    it.resize(3 + rng.index(20));
    for (auto& t : it) t = {static_cast<int>(1 + rng.index(30)), static_cast<int>(1 + rng.index(100))};
  }
  return items;
}

void BM_SiteEntropies(benchmark::State& st) {
  const auto p = make_population(static_cast<std::size_t>(st.range(0)));
  const auto upto = ell_v(p);
  for (auto _ : st) benchmark::DoNotOptimize(site_entropies(p, upto));
}

void BM_SiteEntropiesSerial(benchmark::State& st) {
  const auto p = make_population(static_cast<std::size_t>(st.range(0)));
  const auto upto = ell_v(p);
  for (auto _ : st) benchmark::DoNotOptimize(site_entropies_serial(p, upto));
}

void BM_DistanceMatrix(benchmark::State& st) {
  const auto items = make_items(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(distance_matrix(items));
}

void BM_DistanceMatrixSerial(benchmark::State& st) {
  const auto items = make_items(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(distance_matrix_serial(items));
}

}  // namespace

BENCHMARK(BM_SiteEntropies)->Arg(1000)->Arg(10000);
BENCHMARK(BM_SiteEntropiesSerial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_DistanceMatrix)->Arg(200)->Arg(800);
BENCHMARK(BM_DistanceMatrixSerial)->Arg(200)->Arg(800);

BENCHMARK_MAIN();
