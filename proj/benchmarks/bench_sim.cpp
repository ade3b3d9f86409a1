#include <benchmark/benchmark.h>

#include "netform/config.hpp"
#include "netform/netsim.hpp"

namespace {

using namespace netform;

void BM_SimStep(benchmark::State& state) {
  config::ExperimentConfig cfg = config::preset("wifi-direct-app");
  const netsim::StrategyPlan plan = netsim::plan_strategies(cfg);
  const netsim::Strategy strat =
      netsim::strategy_of(plan, netsim::StrategyKind::proposed);
  const rlnc::FlowSpec flows = netsim::build_flows(cfg);
  netsim::NetworkState st = netsim::generate_network(cfg, 1, strat);
  netsim::DeliveryLedger ledger;
  for (auto _ : state) {
    auto row = netsim::step(st, strat, ledger, flows, cfg);
    benchmark::DoNotOptimize(row.links);
  }
}
BENCHMARK(BM_SimStep);

}  // namespace
