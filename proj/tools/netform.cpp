// Command line front end: solve policies, analyze their stationary chains,
// simulate the dynamic network, sweep parameters and run the self checks.
//
// Exit codes: 0 ok, 1 validation or runtime failure, 2 config error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "netform/config.hpp"
#include "netform/experiment.hpp"
#include "netform/mdp.hpp"
#include "netform/netsim.hpp"
#include "netform/policy_io.hpp"
#include "netform/selfcheck.hpp"
#include "netform/stationary.hpp"

namespace {

namespace fs = std::filesystem;
using netform::config::ExperimentConfig;

struct ConfigArgs {
  std::string config_path;
  std::string preset = "numeric-study";
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string seeds;
  std::string strategies;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "config file (key = value)");
  cmd->add_option("-p,--preset", args.preset,
                  "base preset: numeric-study | wifi-direct-app");
  cmd->add_option("-s,--set", args.overrides,
                  "override a config key, e.g. --set omega=0.6");
  cmd->add_option("-o,--out", args.out_dir, "output directory");
  cmd->add_option("--seeds", args.seeds, "seed list, e.g. 1..20 or 1,5,9");
  cmd->add_option("--strategies", args.strategies,
                  "comma list of proposed,myopic,fixed");
}

ExperimentConfig resolve_config(const ConfigArgs& args) {
  ExperimentConfig cfg = args.config_path.empty()
                             ? netform::config::preset(args.preset)
                             : netform::config::load_config_file(args.config_path);
  for (const std::string& ov : args.overrides)
    netform::config::apply_override(cfg, ov);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (!args.seeds.empty()) cfg.seeds = netform::config::parse_seed_list(args.seeds);
  if (!args.strategies.empty()) {
    cfg.strategies.clear();
    std::stringstream ss(args.strategies);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) cfg.strategies.push_back(item);
  }
  cfg.validate();
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

int cmd_solve(const ConfigArgs& args) {
  const ExperimentConfig cfg = resolve_config(args);
  const netform::mdp::MdpModel model = netform::netsim::build_model(cfg);
  const netform::mdp::Policy policy =
      netform::mdp::solve_policy(model, cfg.epsilon);
  const fs::path out = fs::path(cfg.out_dir) / "policy.txt";
  write_file(out, netform::policy_io::export_policy(policy));
  std::printf("solved in %d iterations, certified epsilon %g\n",
              policy.iterations, policy.epsilon);
  std::printf("policy written to %s\n", out.string().c_str());
  return 0;
}

int cmd_stationary(const ConfigArgs& args, const std::string& policy_path) {
  const ExperimentConfig cfg = resolve_config(args);
  const netform::mdp::MdpModel model = netform::netsim::build_model(cfg);
  netform::mdp::Policy policy;
  if (policy_path.empty()) {
    policy = netform::mdp::solve_policy(model, cfg.epsilon);
  } else {
    policy = netform::policy_io::load_policy_file(policy_path);
  }
  netform::stationary::PolicyChain chain =
      netform::stationary::induce_chain(policy, model);
  netform::stationary::compute_sigma(chain);
  const std::string report = netform::stationary::chain_report(chain);
  const fs::path out = fs::path(cfg.out_dir) / "chain.txt";
  write_file(out, report);
  std::fputs(report.c_str(), stdout);
  std::printf("chain written to %s\n", out.string().c_str());
  return 0;
}

int cmd_simulate(const ConfigArgs& args, bool events,
                 const std::string& policy_path) {
  const ExperimentConfig cfg = resolve_config(args);
  netform::mdp::Policy preloaded;
  const netform::mdp::Policy* pre = nullptr;
  if (!policy_path.empty()) {
    preloaded = netform::policy_io::load_policy_file(policy_path);
    pre = &preloaded;
  }
  const auto out = netform::experiment::run_simulate(cfg, events, pre);
  const fs::path csv = fs::path(cfg.out_dir) / "metrics.csv";
  write_file(csv, out.csv);
  if (events)
    write_file(fs::path(cfg.out_dir) / "events.log", out.events);
  std::fputs(out.summary.c_str(), stdout);
  std::printf("metrics written to %s\n", csv.string().c_str());
  return 0;
}

int cmd_sweep(const ConfigArgs& args, const std::string& parameter) {
  const ExperimentConfig cfg = resolve_config(args);
  const std::string table = netform::experiment::run_sweep(cfg, parameter);
  const fs::path out = fs::path(cfg.out_dir) / ("sweep_" + parameter + ".dat");
  write_file(out, table);
  std::fputs(table.c_str(), stdout);
  std::printf("sweep written to %s\n", out.string().c_str());
  return 0;
}

int cmd_validate(const std::string& fault) {
  const auto results = netform::selfcheck::run_all(fault);
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] %s%s%s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.empty() ? "" : ": ", r.detail.c_str());
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MDP-driven network formation for coded wireless ad hoc networks"};
  app.require_subcommand(1);

  ConfigArgs args;
  std::string policy_path, parameter = "omega", fault;
  bool events = false;

  CLI::App* solve = app.add_subcommand("solve", "solve the per-node policy");
  add_config_options(solve, args);

  CLI::App* stat = app.add_subcommand(
      "stationary", "analyze the policy-induced chain and initial state");
  add_config_options(stat, args);
  stat->add_option("--policy", policy_path,
                   "policy file (default: solve from config)");

  CLI::App* sim = app.add_subcommand("simulate", "run the network simulation");
  add_config_options(sim, args);
  sim->add_flag("--events", events, "also write an event log");
  sim->add_option("--policy", policy_path,
                  "reuse a solved policy file for the proposed strategy");

  CLI::App* sweep = app.add_subcommand("sweep", "sweep a parameter grid");
  add_config_options(sweep, args);
  sweep->add_option("--parameter", parameter, "omega | beta | rho | area")
      ->required();

  CLI::App* validate =
      app.add_subcommand("validate", "run the module oracle suites");
  validate->add_option("--inject-fault", fault,
                       "test hook; 'gf' corrupts the field multiply");

  try {
    app.parse(argc, argv);
    if (solve->parsed()) return cmd_solve(args);
    if (stat->parsed()) return cmd_stationary(args, policy_path);
    if (sim->parsed()) return cmd_simulate(args, events, policy_path);
    if (sweep->parsed()) return cmd_sweep(args, parameter);
    if (validate->parsed()) return cmd_validate(fault);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const netform::config::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
