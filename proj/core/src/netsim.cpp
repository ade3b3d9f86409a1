#include "netform/netsim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "netform/stationary.hpp"

namespace netform::netsim {
namespace {

// Subsystem tags for deriving independent randomness from the master seed.
constexpr std::uint64_t kTagEnv = 0x6e7666656e76ull;      // placement, churn
constexpr std::uint64_t kTagLink = 0x6e76666c696eull;     // link failures
constexpr std::uint64_t kTagMove = 0x6e76666d6f76ull;     // mobility
constexpr std::uint64_t kTagBeta = 0x6e76666274ull;
constexpr std::uint64_t kTagData = 0x6e766664617461ull;   // source payloads
constexpr std::uint64_t kTagCode = 0x6e766663646eull;     // local coefficients

struct NodeRef {
  int id;
  Vec2 pos;
  double range;
  int kind;  // 0 source, 1 intermediate, 2 terminal
};

std::vector<NodeRef> snapshot(const NetworkState& st) {
  std::vector<NodeRef> out;
  out.reserve(st.sources.size() + st.intermediates.size() +
              st.terminals.size());
  for (const auto& n : st.sources) out.push_back({n.id, n.pos, n.range, 0});
  for (const auto& n : st.intermediates)
    out.push_back({n.id, n.pos, n.range, 1});
  for (const auto& n : st.terminals) out.push_back({n.id, n.pos, 0.0, 2});
  return out;
}

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double reflect(double x, double hi) {
  if (hi <= 0) return 0;
  while (x < 0 || x > hi) {
    if (x < 0) x = -x;
    if (x > hi) x = 2 * hi - x;
  }
  return x;
}

double banded_beta(const config::ExperimentConfig& cfg, std::uint64_t seed,
                   std::int64_t epoch) {
  return cfg.beta_band_lo +
         (cfg.beta_band_hi - cfg.beta_band_lo) *
             rng::event_uniform(rng::hash2(seed, kTagBeta),
                                static_cast<std::uint64_t>(epoch), 0, 0);
}

double clamp_range(double r, const config::ExperimentConfig& cfg) {
  return std::clamp(r, cfg.resolved_range_min(), cfg.area());
}

}  // namespace

StrategyKind strategy_from_name(const std::string& name) {
  if (name == "proposed") return StrategyKind::proposed;
  if (name == "myopic") return StrategyKind::myopic;
  if (name == "fixed") return StrategyKind::fixed;
  throw config::config_error("unknown strategy '" + name + "'");
}

std::string strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::proposed: return "proposed";
    case StrategyKind::myopic: return "myopic";
    case StrategyKind::fixed: return "fixed";
  }
  return "fixed";
}

void DeliveryLedger::record_generated(std::size_t h, int t,
                                      std::int64_t stamp) {
  pending.emplace(std::make_tuple(h, t, stamp), stamp);
  ++generated;
}

std::int64_t DeliveryLedger::record_delivered(std::size_t h, int t,
                                              std::int64_t stamp,
                                              std::int64_t now) {
  const auto it = pending.find(std::make_tuple(h, t, stamp));
  if (it == pending.end()) return -1;
  pending.erase(it);
  ++delivered;
  return now - stamp;
}

void DeliveryLedger::expire(std::int64_t now, int ttl) {
  for (auto it = pending.begin(); it != pending.end();) {
    if (now - std::get<2>(it->first) > ttl) {
      it = pending.erase(it);
      ++expired;
    } else {
      ++it;
    }
  }
}

double DeliveryLedger::ratio() const {
  if (generated == 0) return 0.0;
  return static_cast<double>(delivered) / static_cast<double>(generated);
}

NetworkState generate_network(const config::ExperimentConfig& cfg,
                              std::uint64_t seed, const Strategy& strategy) {
  cfg.validate();
  NetworkState st;
  st.seed = seed;
  st.region_w = cfg.region_width;
  st.region_h = cfg.region_height;
  st.env = rng::Stream(rng::hash2(seed, kTagEnv));
  st.beta = cfg.beta_mode == "banded" ? banded_beta(cfg, seed, 0)
                                      : cfg.beta_fixed;

  const double src_range =
      cfg.source_range.value_or(strategy.initial_range);
  const int nh = cfg.num_sources;
  const int nt = cfg.num_terminals;
  for (int h = 0; h < nh; ++h) {
    SourceNode s;
    s.id = h;
    s.flow = static_cast<std::size_t>(h);
    s.range = src_range;
    if (cfg.placement == "edges") {
      s.pos = {0.0, cfg.region_height * (h + 1) / (nh + 1)};
    } else {
      s.pos = {st.env.uniform(0, cfg.region_width),
               st.env.uniform(0, cfg.region_height)};
    }
    st.sources.push_back(s);
  }
  for (int t = 0; t < nt; ++t) {
    TerminalNode term;
    term.id = nh + t;
    if (cfg.placement == "edges") {
      term.pos = {cfg.region_width, cfg.region_height * (t + 1) / (nt + 1)};
    } else {
      term.pos = {st.env.uniform(0, cfg.region_width),
                  st.env.uniform(0, cfg.region_height)};
    }
    st.terminals.push_back(term);
  }

  st.next_node_id = nh + nt;
  const int count = st.env.poisson(cfg.lambda * cfg.area());
  for (int i = 0; i < count; ++i) {
    const int id = st.next_node_id++;
    const Vec2 pos{st.env.uniform(0, cfg.region_width),
                   st.env.uniform(0, cfg.region_height)};
    st.intermediates.emplace_back(id, pos, strategy.initial_range,
                                  strategy.initial_state, cfg.ttl,
                                  rng::hash3(seed, kTagCode,
                                             static_cast<std::uint64_t>(id)));
  }
  return st;
}

std::vector<Link> links_of(const NetworkState& st) {
  const auto nodes = snapshot(st);
  const std::uint64_t link_key = rng::hash2(st.seed, kTagLink);
  std::vector<Link> out;
  for (const NodeRef& a : nodes) {
    if (a.kind == 2) continue;  // terminals do not transmit
    const double r = radius_of(a.range);
    for (const NodeRef& b : nodes) {
      if (b.kind == 0 || b.id == a.id) continue;  // sources do not receive
      if (dist(a.pos, b.pos) > r) continue;
      const bool failed =
          rng::event_uniform(link_key, static_cast<std::uint64_t>(st.time),
                             static_cast<std::uint64_t>(a.id),
                             static_cast<std::uint64_t>(b.id)) < st.beta;
      out.push_back({a.id, b.id, failed});
    }
  }
  return out;
}

std::uint16_t truth_symbol(std::uint64_t seed, std::size_t h,
                           std::int64_t stamp, int index, int gf_order_exp) {
  const std::uint64_t u =
      rng::hash4(rng::hash2(seed, kTagData), static_cast<std::uint64_t>(h),
                 static_cast<std::uint64_t>(stamp),
                 static_cast<std::uint64_t>(index));
  return static_cast<std::uint16_t>(u & ((1u << gf_order_exp) - 1));
}

double goodput_mbps(double data_bits, std::int64_t travel_steps,
                    double unit_time_ms) {
  if (travel_steps <= 0) return 0.0;
  return data_bits / (static_cast<double>(travel_steps) * unit_time_ms) /
         1000.0;
}

double connectivity_ratio(const DeliveryLedger& ledger) {
  return ledger.ratio();
}

double power_total(const NetworkState& st,
                   const config::ExperimentConfig& cfg) {
  double total = 0.0;
  for (const auto& n : st.sources)
    total += cfg.eta *
             std::pow(radius_of(n.range) * cfg.length_unit_m, cfg.alpha);
  for (const auto& n : st.intermediates)
    total += cfg.eta *
             std::pow(radius_of(n.range) * cfg.length_unit_m, cfg.alpha);
  return total;
}

double algebraic_connectivity(const NetworkState& st) {
  const auto nodes = snapshot(st);
  const int n = static_cast<int>(nodes.size());
  if (n < 2) return 0.0;
  std::map<int, int> index;
  for (int i = 0; i < n; ++i) index[nodes[i].id] = i;

  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  for (const Link& l : links_of(st)) {
    const int i = index.at(l.from), j = index.at(l.to);
    adj(i, j) = 1.0;
    adj(j, i) = 1.0;
  }
  Eigen::MatrixXd lap = -adj;
  for (int i = 0; i < n; ++i) lap(i, i) = adj.row(i).sum();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap,
                                                    Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues()(1));
}

MetricsRow step(NetworkState& st, const Strategy& strategy,
                DeliveryLedger& ledger, const rlnc::FlowSpec& flows,
                const config::ExperimentConfig& cfg, std::string* event_log) {
  const std::int64_t now = st.time;
  const int smax = cfg.smax;
  char ev[160];

  for (auto& node : st.intermediates) node.buf.prune(now);

  // Range adaptation: active relays look up the policy for their observed
  // state and move their coverage before broadcasting.
  if (strategy.kind != StrategyKind::fixed) {
    for (auto& node : st.intermediates) {
      if (node.buf.empty()) continue;
      const int s = std::clamp(node.observed_state, 1, smax);
      const double a = strategy.policy->action_of(s);
      node.range = clamp_range(node.range + a, cfg);
      if (event_log) {
        std::snprintf(ev, sizeof ev, "t=%lld node=%d state=%d action=%g range=%g\n",
                      static_cast<long long>(now), node.id, s, a, node.range);
        *event_log += ev;
      }
    }
  }

  const std::vector<Link> links = links_of(st);
  std::map<int, std::vector<const Link*>> out_links;
  for (const Link& l : links) out_links[l.from].push_back(&l);

  // All of this step's transmissions are computed from pre-step buffers
  // before anything is delivered.
  struct Broadcast {
    int from;
    rlnc::Packet packet;
    bool relay;
  };
  std::vector<Broadcast> broadcasts;

  if (cfg.source_cadence == "every-step" || now == 0) {
    for (const auto& src : st.sources) {
      std::vector<galois::GfElement> data(cfg.payload_symbols);
      for (int i = 0; i < cfg.payload_symbols; ++i)
        data[i] = {truth_symbol(st.seed, src.flow, now, i, cfg.gf_order_exp),
                   static_cast<std::uint8_t>(cfg.gf_order_exp)};
      broadcasts.push_back(
          {src.id, rlnc::encode_source(src.flow, std::move(data), now, flows),
           false});
      for (int t : flows.terminals_of[src.flow])
        ledger.record_generated(src.flow, t, now);
    }
  }

  for (auto& node : st.intermediates) {
    if (node.buf.empty()) continue;
    const std::int64_t stamp = *node.buf.oldest_stamp();
    const rlnc::Packet pkt = rlnc::recombine(
        node.buf, stamp, node.coding,
        cfg.nonzero_coeffs ? rlnc::CoeffDraw::nonzero_only
                           : rlnc::CoeffDraw::uniform_full_field);
    node.buf.take_group(stamp);  // transmit-once service
    broadcasts.push_back({node.id, pkt, true});
  }

  std::map<int, IntermediateNode*> relays_by_id;
  for (auto& node : st.intermediates) relays_by_id[node.id] = &node;
  std::map<int, TerminalNode*> terminals_by_id;
  for (auto& node : st.terminals) terminals_by_id[node.id] = &node;

  st.last_broadcasts.clear();
  std::set<std::pair<int, std::int64_t>> dirty;  // (terminal, stamp)
  for (const Broadcast& b : broadcasts) {
    int acks = 0;
    const auto it = out_links.find(b.from);
    if (it != out_links.end()) {
      for (const Link* l : it->second) {
        if (l->failed) continue;
        ++acks;
        if (auto rit = relays_by_id.find(l->to); rit != relays_by_id.end()) {
          rit->second->buf.push(b.packet);
        } else {
          TerminalNode* term = terminals_by_id.at(l->to);
          term->store[b.packet.stamp].push_back(b.packet);
          dirty.insert({l->to, b.packet.stamp});
        }
      }
    }
    if (b.relay) {
      relays_by_id.at(b.from)->observed_state = std::clamp(acks, 1, smax);
      st.last_broadcasts.push_back(b.packet);
    }
    if (event_log) {
      std::snprintf(ev, sizeof ev, "t=%lld node=%d broadcast %s acks=%d\n",
                    static_cast<long long>(now), b.from,
                    rlnc::log_line(b.packet).c_str(), acks);
      *event_log += ev;
    }
  }

  // Terminal decoding; deliveries land at now + 1.
  double goodput = 0.0;
  for (const auto& [tid, stamp] : dirty) {
    const auto wanted = flows.sources_of(tid);
    bool any_pending = false;
    for (std::size_t h : wanted)
      any_pending =
          any_pending || ledger.pending.count(std::make_tuple(h, tid, stamp));
    if (!any_pending) continue;

    TerminalNode* term = terminals_by_id.at(tid);
    const auto result = rlnc::try_decode(term->store[stamp], tid, flows);
    if (!result.ok()) continue;
    for (std::size_t h : wanted) {
      const std::int64_t travel =
          ledger.record_delivered(h, tid, stamp, now + 1);
      if (travel < 0) continue;
      const auto& data = result.payloads.at(h);
      for (int i = 0; i < cfg.payload_symbols; ++i) {
        if (data[i].value !=
            truth_symbol(st.seed, h, stamp, i, cfg.gf_order_exp))
          throw std::logic_error("decoded payload differs from source data");
      }
      goodput += goodput_mbps(cfg.data_bits, travel, cfg.unit_time_ms);
    }
  }

  ledger.expire(now + 1, cfg.ttl);

  MetricsRow row;
  row.time = now;
  row.goodput_mbps = goodput;
  row.scr = ledger.ratio();
  row.power = power_total(st, cfg);
  row.links = static_cast<long>(links.size());
  row.alg_conn = algebraic_connectivity(st);
  row.seed = st.seed;

  // Dynamics: positions every step; membership and beta on their periods.
  st.time = now + 1;
  if (cfg.mobility_sigma > 0) {
    const std::uint64_t move_key = rng::hash2(st.seed, kTagMove);
    for (auto& node : st.intermediates) {
      node.pos.x = reflect(
          node.pos.x + cfg.mobility_sigma *
                           rng::event_gaussian(move_key,
                                               static_cast<std::uint64_t>(now),
                                               static_cast<std::uint64_t>(node.id), 0),
          st.region_w);
      node.pos.y = reflect(
          node.pos.y + cfg.mobility_sigma *
                           rng::event_gaussian(move_key,
                                               static_cast<std::uint64_t>(now),
                                               static_cast<std::uint64_t>(node.id), 1),
          st.region_h);
    }
  }
  if (st.time % cfg.membership_update_period == 0) {
    const int target = st.env.poisson(cfg.lambda * cfg.area());
    int current = static_cast<int>(st.intermediates.size());
    while (current > target) {
      const std::uint32_t victim =
          st.env.below(static_cast<std::uint32_t>(current));
      st.intermediates.erase(st.intermediates.begin() + victim);
      --current;
    }
    while (current < target) {
      const int id = st.next_node_id++;
      const Vec2 pos{st.env.uniform(0, st.region_w),
                     st.env.uniform(0, st.region_h)};
      st.intermediates.emplace_back(
          id, pos, strategy.initial_range, strategy.initial_state, cfg.ttl,
          rng::hash3(st.seed, kTagCode, static_cast<std::uint64_t>(id)));
      ++current;
    }
  }
  if (cfg.beta_mode == "banded" && st.time % cfg.beta_update_period == 0)
    st.beta = banded_beta(cfg, st.seed, st.time / cfg.beta_update_period);

  for (auto& term : st.terminals) {
    for (auto it = term.store.begin(); it != term.store.end();) {
      if (st.time - it->first > cfg.ttl)
        it = term.store.erase(it);
      else
        break;
    }
  }

  return row;
}

double RunResult::mean_goodput() const {
  double s = 0;
  for (const auto& r : rows) s += r.goodput_mbps;
  return rows.empty() ? 0 : s / rows.size();
}
double RunResult::mean_power() const {
  double s = 0;
  for (const auto& r : rows) s += r.power;
  return rows.empty() ? 0 : s / rows.size();
}
double RunResult::mean_links() const {
  double s = 0;
  for (const auto& r : rows) s += r.links;
  return rows.empty() ? 0 : s / rows.size();
}
double RunResult::mean_alg_conn() const {
  double s = 0;
  for (const auto& r : rows) s += r.alg_conn;
  return rows.empty() ? 0 : s / rows.size();
}
double RunResult::final_scr() const {
  return rows.empty() ? 0 : rows.back().scr;
}

mdp::MdpModel build_model(const config::ExperimentConfig& cfg) {
  cfg.validate();
  mdp::MdpParams p;
  p.smax = cfg.smax;
  const int k = (cfg.num_actions - 1) / 2;
  for (int i = -k; i <= k; ++i)
    p.actions.push_back(cfg.action_step * static_cast<double>(i));
  p.lambda = cfg.lambda;
  p.beta = cfg.resolved_model_beta();
  p.omega = cfg.omega;
  p.rho = cfg.rho;
  p.u = cfg.u;
  const int mid = (cfg.smax + 1) / 2;
  p.range_ref = cfg.range_ref.value_or(
      mdp::effective_to_raw(mid, p.beta) / cfg.lambda);
  p.gamma.preset = mdp::gamma_preset_from_name(cfg.gamma_preset);
  p.gamma.scale = cfg.gamma_scale;
  p.gamma.cap = cfg.resolved_gamma_cap();
  return mdp::MdpModel(p);
}

rlnc::FlowSpec build_flows(const config::ExperimentConfig& cfg) {
  rlnc::FlowSpec flows;
  flows.num_sources = static_cast<std::size_t>(cfg.num_sources);
  flows.terminals_of.resize(flows.num_sources);
  for (int t = 0; t < cfg.num_terminals; ++t) {
    const int tid = cfg.num_sources + t;
    if (cfg.flow_map == "all") {
      for (auto& ts : flows.terminals_of) ts.push_back(tid);
    } else {
      flows.terminals_of[t % cfg.num_sources].push_back(tid);
    }
  }
  return flows;
}

namespace {

struct StationaryStart {
  int state;
  double range;
};

StationaryStart stationary_start(const mdp::Policy& pol,
                                 const mdp::MdpModel& model) {
  stationary::PolicyChain chain = stationary::induce_chain(pol, model);
  stationary::compute_sigma(chain);
  const int s = stationary::initial_state(chain);
  const double range =
      mdp::effective_to_raw(s, model.beta()) / model.lambda();
  return {s, range};
}

}  // namespace

StrategyPlan plan_strategies(const config::ExperimentConfig& cfg,
                             const mdp::Policy* preloaded) {
  const mdp::MdpModel model = build_model(cfg);
  StrategyPlan plan;
  if (preloaded != nullptr) {
    if (preloaded->num_states() != model.num_states())
      throw config::config_error(
          "loaded policy does not match the configured state grid");
    plan.proposed = *preloaded;
  } else {
    plan.proposed = mdp::solve_policy(model, cfg.epsilon);
  }
  plan.myopic = mdp::myopic_policy(model);
  const StationaryStart ps = stationary_start(plan.proposed, model);
  const StationaryStart ms = stationary_start(plan.myopic, model);
  plan.proposed_state = ps.state;
  plan.proposed_range = ps.range;
  plan.myopic_state = ms.state;
  plan.myopic_range = ms.range;
  plan.fixed_range = cfg.fixed_range.value_or(ps.range);
  return plan;
}

Strategy strategy_of(const StrategyPlan& plan, StrategyKind kind) {
  Strategy s;
  s.kind = kind;
  switch (kind) {
    case StrategyKind::proposed:
      s.policy = &plan.proposed;
      s.initial_range = plan.proposed_range;
      s.initial_state = plan.proposed_state;
      break;
    case StrategyKind::myopic:
      s.policy = &plan.myopic;
      s.initial_range = plan.myopic_range;
      s.initial_state = plan.myopic_state;
      break;
    case StrategyKind::fixed:
      s.policy = nullptr;
      s.initial_range = plan.fixed_range;
      s.initial_state = 1;
      break;
  }
  return s;
}

RunResult run_with_plan(const config::ExperimentConfig& cfg,
                        const StrategyPlan& plan, StrategyKind kind,
                        std::uint64_t seed, bool capture_events) {
  const Strategy strat = strategy_of(plan, kind);
  const rlnc::FlowSpec flows = build_flows(cfg);
  NetworkState st = generate_network(cfg, seed, strat);
  RunResult result;
  result.strategy = strategy_name(kind);
  result.seed = seed;
  result.initial_range = strat.initial_range;
  result.initial_state = strat.initial_state;
  result.rows.reserve(cfg.horizon);
  std::string* events = capture_events ? &result.events : nullptr;
  for (int t = 0; t < cfg.horizon; ++t) {
    MetricsRow row = step(st, strat, result.ledger, flows, cfg, events);
    row.strategy = result.strategy;
    result.rows.push_back(std::move(row));
  }
  return result;
}

RunResult run_simulation(const config::ExperimentConfig& cfg,
                         StrategyKind kind, std::uint64_t seed) {
  return run_with_plan(cfg, plan_strategies(cfg), kind, seed);
}

namespace {

// Hop distances by breadth-first search over an adjacency list.
std::vector<int> bfs_hops(const std::vector<std::vector<int>>& adj,
                          int start) {
  std::vector<int> hops(adj.size(), -1);
  std::vector<int> queue = {start};
  hops[start] = 0;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int v = queue[qi];
    for (int w : adj[v]) {
      if (hops[w] < 0) {
        hops[w] = hops[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return hops;
}

}  // namespace

AnonymityResult anonymity_experiment(const config::ExperimentConfig& cfg,
                                     std::uint64_t seed) {
  AnonymityResult res;
  Strategy strat;
  strat.kind = StrategyKind::fixed;
  strat.initial_range = cfg.fixed_range.value_or(
      mdp::effective_to_raw((cfg.smax + 1) / 2, cfg.resolved_model_beta()) /
      cfg.lambda);
  strat.initial_state = 1;

  NetworkState st = generate_network(cfg, seed, strat);
  res.nodes = static_cast<int>(st.sources.size() + st.terminals.size() +
                               st.intermediates.size());
  if (res.nodes > 50) return res;

  // Index nodes and build the directed/undirected support adjacency.
  std::map<int, int> index;
  const auto nodes = [&] {
    std::vector<int> ids;
    for (const auto& n : st.sources) ids.push_back(n.id);
    for (const auto& n : st.intermediates) ids.push_back(n.id);
    for (const auto& n : st.terminals) ids.push_back(n.id);
    return ids;
  }();
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;

  std::vector<std::vector<int>> directed(nodes.size()), undirected(nodes.size());
  for (const Link& l : links_of(st)) {
    directed[index.at(l.from)].push_back(index.at(l.to));
    undirected[index.at(l.from)].push_back(index.at(l.to));
    undirected[index.at(l.to)].push_back(index.at(l.from));
  }

  // Every relay must be reachable from every source for full mixing.
  for (const auto& src : st.sources) {
    const auto hops = bfs_hops(directed, index.at(src.id));
    for (const auto& relay : st.intermediates)
      if (hops[index.at(relay.id)] < 0) return res;
  }

  int diameter = 0;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const auto hops = bfs_hops(undirected, static_cast<int>(v));
    for (int h : hops) {
      if (h < 0) return res;  // undirected graph disconnected
      diameter = std::max(diameter, h);
    }
  }
  res.diameter = diameter;

  const rlnc::FlowSpec flows = build_flows(cfg);
  DeliveryLedger ledger;
  double best = 0.0;
  for (int t = 0; t <= 2 * diameter; ++t) {
    step(st, strat, ledger, flows, cfg);
    if (!st.last_broadcasts.empty())
      best = std::max(best, rlnc::anonymity_index(st.last_broadcasts, flows));
  }
  res.index = best;
  res.usable = true;
  return res;
}

}  // namespace netform::netsim
