#include "netform/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>

#include "netform/mdp.hpp"

namespace netform::experiment {
namespace {

int worker_count(const config::ExperimentConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string fmt6(double d) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", d);
  return buf;
}

}  // namespace

std::string csv_row(const netsim::MetricsRow& row) {
  std::string out;
  out += std::to_string(row.time);
  out += ',';
  out += fmt6(row.goodput_mbps);
  out += ',';
  out += fmt6(row.scr);
  out += ',';
  out += fmt6(row.power);
  out += ',';
  out += std::to_string(row.links);
  out += ',';
  out += fmt6(row.alg_conn);
  out += ',';
  out += row.strategy;
  out += ',';
  out += std::to_string(row.seed);
  return out;
}

std::vector<netsim::RunResult> run_matrix(const config::ExperimentConfig& cfg,
                                          bool capture_events,
                                          const mdp::Policy* preloaded) {
  cfg.validate();
  const netsim::StrategyPlan plan = netsim::plan_strategies(cfg, preloaded);

  struct Job {
    netsim::StrategyKind kind;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const std::string& sname : cfg.strategies)
    for (std::uint64_t seed : cfg.seeds)
      jobs.push_back({netsim::strategy_from_name(sname), seed});

  const int workers = worker_count(cfg);
  std::vector<netsim::RunResult> results(jobs.size());
  if (workers <= 1 || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i)
      results[i] = netsim::run_with_plan(cfg, plan, jobs[i].kind, jobs[i].seed,
                                         capture_events);
    return results;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      results[i] = netsim::run_with_plan(cfg, plan, jobs[i].kind, jobs[i].seed,
                                         capture_events);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t pool_size =
      std::min<std::size_t>(static_cast<std::size_t>(workers), jobs.size());
  for (std::size_t w = 0; w < pool_size; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

SimulateOutput run_simulate(const config::ExperimentConfig& cfg,
                            bool capture_events,
                            const mdp::Policy* preloaded) {
  SimulateOutput out;
  out.runs = run_matrix(cfg, capture_events, preloaded);

  out.csv = kCsvHeader;
  out.csv += '\n';
  for (const auto& run : out.runs) {
    for (const auto& row : run.rows) {
      out.csv += csv_row(row);
      out.csv += '\n';
    }
    if (capture_events) out.events += run.events;
  }

  // Per-strategy means across seeds.
  struct Agg {
    double goodput = 0, scr = 0, power = 0, links = 0, alg = 0;
    int n = 0;
  };
  std::map<std::string, Agg> agg;
  std::vector<std::string> order;
  for (const auto& run : out.runs) {
    if (!agg.count(run.strategy)) order.push_back(run.strategy);
    Agg& a = agg[run.strategy];
    a.goodput += run.mean_goodput();
    a.scr += run.final_scr();
    a.power += run.mean_power();
    a.links += run.mean_links();
    a.alg += run.mean_alg_conn();
    ++a.n;
  }
  char line[200];
  out.summary =
      "strategy          goodput_mbps   scr      power_lin    power_dbm  "
      "links    alg_conn\n";
  for (const std::string& name : order) {
    const Agg& a = agg[name];
    const double power = a.power / a.n;
    std::snprintf(line, sizeof line,
                  "%-16s  %12.3f  %7.4f  %11.3f  %9.3f  %7.2f  %8.4f\n",
                  name.c_str(), a.goodput / a.n, a.scr / a.n, power,
                  power > 0 ? 10.0 * std::log10(power) : 0.0, a.links / a.n,
                  a.alg / a.n);
    out.summary += line;
  }
  return out;
}

std::string run_sweep(const config::ExperimentConfig& cfg,
                      const std::string& parameter) {
  cfg.validate();
  std::string out;
  char line[160];

  auto connectivity_point = [&](const config::ExperimentConfig& point_cfg,
                                double x) {
    config::ExperimentConfig c = point_cfg;
    c.strategies = {"proposed"};
    const auto runs = run_matrix(c);
    double links = 0, alg = 0;
    for (const auto& run : runs) {
      links += run.mean_links();
      alg += run.mean_alg_conn();
    }
    std::snprintf(line, sizeof line, "%.6g %.6f %.6f\n", x,
                  links / runs.size(), alg / runs.size());
    out += line;
  };

  if (parameter == "omega") {
    if (cfg.sweep_omega.empty()) throw config::config_error("empty omega grid");
    out += "# omega mean_links mean_alg_conn\n";
    for (double w : cfg.sweep_omega) {
      config::ExperimentConfig c = cfg;
      c.omega = w;
      connectivity_point(c, w);
    }
  } else if (parameter == "beta") {
    if (cfg.sweep_beta.empty()) throw config::config_error("empty beta grid");
    out += "# beta mean_links mean_alg_conn\n";
    for (double b : cfg.sweep_beta) {
      config::ExperimentConfig c = cfg;
      c.beta_mode = "fixed";
      c.beta_fixed = b;
      c.model_beta.reset();
      connectivity_point(c, b);
    }
  } else if (parameter == "rho") {
    if (cfg.sweep_rho.empty()) throw config::config_error("empty rho grid");
    out += "# rho iterations\n";
    for (double r : cfg.sweep_rho) {
      config::ExperimentConfig c = cfg;
      c.rho = r;
      const mdp::MdpModel model = netsim::build_model(c);
      const mdp::Policy pol = mdp::solve_policy(model, c.epsilon);
      std::snprintf(line, sizeof line, "%.6g %d\n", r, pol.iterations);
      out += line;
    }
  } else if (parameter == "area") {
    if (cfg.sweep_area.empty()) throw config::config_error("empty area grid");
    out += "# area mean_links mean_alg_conn\n";
    for (double area : cfg.sweep_area) {
      config::ExperimentConfig c = cfg;
      const double side = std::sqrt(area);
      c.region_width = side;
      c.region_height = side;
      connectivity_point(c, area);
    }
  } else {
    throw config::config_error("unknown sweep parameter '" + parameter +
                               "' (omega | beta | rho | area)");
  }
  return out;
}

}  // namespace netform::experiment
