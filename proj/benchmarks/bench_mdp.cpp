#include <benchmark/benchmark.h>

#include "netform/config.hpp"
#include "netform/mdp.hpp"
#include "netform/netsim.hpp"

namespace {

using namespace netform;

void BM_BellmanBackup(benchmark::State& state) {
  const mdp::MdpModel model =
      netsim::build_model(config::preset("numeric-study"));
  std::vector<double> v(model.num_states(), 0.0);
  for (auto _ : state) {
    v = model.bellman_backup(v);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_BellmanBackup);

void BM_SolvePolicy(benchmark::State& state) {
  const mdp::MdpModel model =
      netsim::build_model(config::preset("numeric-study"));
  for (auto _ : state) {
    auto p = mdp::solve_policy(model, 0.01);
    benchmark::DoNotOptimize(p.iterations);
  }
}
BENCHMARK(BM_SolvePolicy);

}  // namespace
