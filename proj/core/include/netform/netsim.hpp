#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "netform/config.hpp"
#include "netform/mdp.hpp"
#include "netform/random.hpp"
#include "netform/rlnc.hpp"

// Discrete-time simulation of the dynamic ad hoc network: Poisson placement,
// mobility and churn, per-node range adaptation through a solved policy,
// packet relaying through the coding layer, and the run metrics.

namespace netform::netsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Coverage measures are areas; the broadcast disc radius follows from them.
inline double radius_of(double coverage) {
  return std::sqrt(std::max(0.0, coverage) / M_PI);
}

struct SourceNode {
  int id = 0;
  std::size_t flow = 0;  // source index in the flow set
  Vec2 pos;
  double range = 0.0;  // stationary
};

struct IntermediateNode {
  int id = 0;
  Vec2 pos;
  double range = 0.0;
  int observed_state = 1;  // receivers acknowledged on the last broadcast
  rlnc::Buffer buf;
  rng::Stream coding;

  IntermediateNode(int id_, Vec2 pos_, double range_, int state0, int ttl,
                   std::uint64_t coding_seed)
      : id(id_), pos(pos_), range(range_), observed_state(state0), buf(ttl),
        coding(coding_seed) {}
};

struct TerminalNode {
  int id = 0;
  Vec2 pos;
  std::map<std::int64_t, std::vector<rlnc::Packet>> store;  // per stamp
};

struct NetworkState {
  std::int64_t time = 0;
  double beta = 0.0;
  double region_w = 0.0;
  double region_h = 0.0;
  std::uint64_t seed = 0;
  std::vector<SourceNode> sources;
  std::vector<TerminalNode> terminals;
  std::vector<IntermediateNode> intermediates;
  int next_node_id = 0;
  rng::Stream env;  // placement / membership draws

  // Relay packets broadcast during the most recent step.
  std::vector<rlnc::Packet> last_broadcasts;

  NetworkState() : env(0) {}
};

struct Link {
  int from = 0;
  int to = 0;
  bool failed = false;
};

enum class StrategyKind { proposed, myopic, fixed };

StrategyKind strategy_from_name(const std::string& name);
std::string strategy_name(StrategyKind k);

struct Strategy {
  StrategyKind kind = StrategyKind::fixed;
  const mdp::Policy* policy = nullptr;  // null for fixed
  double initial_range = 1.0;           // coverage units
  int initial_state = 1;
};

// Per-flow delivery bookkeeping keyed by (source, terminal, stamp).
struct DeliveryLedger {
  std::map<std::tuple<std::size_t, int, std::int64_t>, std::int64_t> pending;
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t expired = 0;

  void record_generated(std::size_t h, int t, std::int64_t stamp);
  // Returns the travel time in steps, or -1 when the triple was not pending.
  std::int64_t record_delivered(std::size_t h, int t, std::int64_t stamp,
                                std::int64_t now);
  void expire(std::int64_t now, int ttl);
  double ratio() const;
};

struct MetricsRow {
  std::int64_t time = 0;
  double goodput_mbps = 0.0;
  double scr = 0.0;
  double power = 0.0;  // linear sum of eta * d^alpha over transmitters
  long links = 0;
  double alg_conn = 0.0;
  std::string strategy;
  std::uint64_t seed = 0;
};

// Poisson(lambda * area) intermediates uniform over the region; sources and
// terminals per the configured placement; ranges and observed states seeded
// from the strategy's stationary initial state.
NetworkState generate_network(const config::ExperimentConfig& cfg,
                              std::uint64_t seed, const Strategy& strategy);

// Directed links under the current ranges: any transmitter-capable node to
// any receiver-capable node within its disc; each link carries this step's
// failure draw.
std::vector<Link> links_of(const NetworkState& state);

// Ground-truth payload symbol for (source flow h, stamp, symbol index).
std::uint16_t truth_symbol(std::uint64_t seed, std::size_t h,
                           std::int64_t stamp, int index, int gf_order_exp);

// One simulation step: source emissions, relay adaptation and broadcasts,
// terminal decoding, ledger and metrics update, then the dynamics schedule.
// When event_log is non-null, adaptation and broadcast events are appended
// as text lines.
MetricsRow step(NetworkState& state, const Strategy& strategy,
                DeliveryLedger& ledger, const rlnc::FlowSpec& flows,
                const config::ExperimentConfig& cfg,
                std::string* event_log = nullptr);

double goodput_mbps(double data_bits, std::int64_t travel_steps,
                    double unit_time_ms);
double connectivity_ratio(const DeliveryLedger& ledger);
double power_total(const NetworkState& state,
                   const config::ExperimentConfig& cfg);
double algebraic_connectivity(const NetworkState& state);

struct RunResult {
  std::string strategy;
  std::uint64_t seed = 0;
  std::vector<MetricsRow> rows;
  DeliveryLedger ledger;
  double initial_range = 0.0;
  int initial_state = 1;
  std::string events;  // filled when event capture was requested

  double mean_goodput() const;
  double mean_power() const;
  double mean_links() const;
  double mean_alg_conn() const;
  double final_scr() const;
};

// Solves/derives everything the strategy needs from the config (policy,
// stationary initial state and range) and runs the horizon.
RunResult run_simulation(const config::ExperimentConfig& cfg,
                         StrategyKind kind, std::uint64_t seed);

// Prepared per-config solver products, reusable across seeds.
struct StrategyPlan {
  mdp::Policy proposed;
  mdp::Policy myopic;
  int proposed_state = 1;
  int myopic_state = 1;
  double proposed_range = 1.0;
  double myopic_range = 1.0;
  double fixed_range = 1.0;
};

mdp::MdpModel build_model(const config::ExperimentConfig& cfg);
rlnc::FlowSpec build_flows(const config::ExperimentConfig& cfg);

// preloaded, when given, is used as the proposed policy instead of solving.
StrategyPlan plan_strategies(const config::ExperimentConfig& cfg,
                             const mdp::Policy* preloaded = nullptr);
Strategy strategy_of(const StrategyPlan& plan, StrategyKind kind);

RunResult run_with_plan(const config::ExperimentConfig& cfg,
                        const StrategyPlan& plan, StrategyKind kind,
                        std::uint64_t seed, bool capture_events = false);

// Packet-anonymity measurement on a static network: sources emit a single
// generation, relays mix it, and the index of the in-flight relay packets is
// tracked for 2 * diameter steps. A draw is usable when every relay is
// reachable from every source in the directed support graph.
struct AnonymityResult {
  bool usable = false;
  int nodes = 0;
  int diameter = 0;
  double index = 0.0;  // best index seen within 2 * diameter steps
};

AnonymityResult anonymity_experiment(const config::ExperimentConfig& cfg,
                                     std::uint64_t seed);

}  // namespace netform::netsim
