#include <benchmark/benchmark.h>

#include "netform/galois.hpp"
#include "netform/random.hpp"

namespace {

using namespace netform;

void BM_FieldMul(benchmark::State& state) {
  const galois::Field& f = galois::Field::of(8);
  rng::Stream s(7);
  std::uint16_t a = 1 + s.below(255), b = 1 + s.below(255);
  for (auto _ : state) {
    a = f.mul(a, b);
    b = f.add(b, 0x1d);
    if (b == 0) b = 1;
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_FieldMul);

void BM_MatrixSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  rng::Stream s(11);
  galois::GfMatrix m(n, n, 8);
  std::vector<galois::GfElement> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m(r, c) = s.below(256);
    y[r] = {static_cast<std::uint16_t>(s.below(256)), 8};
  }
  while (m.rank() < n) m(0, 0) = s.below(256);
  for (auto _ : state) {
    auto x = galois::solve(m, y);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_MatrixSolve)->Arg(4)->Arg(8)->Arg(16);

}  // namespace
