#pragma once

#include <string>
#include <vector>

#include "netform/config.hpp"
#include "netform/netsim.hpp"

// Orchestration used by the command line tool: fan the (strategy, seed)
// matrix out across workers, render the metrics CSV and summary table, and
// drive the parameter sweeps. Output is deterministic for a given config:
// rows follow the configured strategy and seed order regardless of how the
// runs are scheduled.

namespace netform::experiment {

inline constexpr const char* kCsvHeader =
    "time,goodput_mbps,scr,power,links,alg_conn,strategy,seed";

std::string csv_row(const netsim::MetricsRow& row);

// Runs every configured strategy over every configured seed. preloaded,
// when given, replaces the solved proposed policy.
std::vector<netsim::RunResult> run_matrix(
    const config::ExperimentConfig& cfg, bool capture_events = false,
    const mdp::Policy* preloaded = nullptr);

struct SimulateOutput {
  std::vector<netsim::RunResult> runs;
  std::string csv;
  std::string summary;  // per-strategy means over all seeds
  std::string events;   // concatenated event logs when captured
};

SimulateOutput run_simulate(const config::ExperimentConfig& cfg,
                            bool capture_events = false,
                            const mdp::Policy* preloaded = nullptr);

// parameter is one of omega | beta | rho | area. Produces plot-ready
// columnar text: one line per grid point.
std::string run_sweep(const config::ExperimentConfig& cfg,
                      const std::string& parameter);

}  // namespace netform::experiment
