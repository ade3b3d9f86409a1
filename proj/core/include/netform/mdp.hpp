#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

// Per-node decision model: a state counts the effective nodes inside the
// transmission range, an action is a signed coverage-measure delta, and the
// kernel mixes a Poisson arrival law (grow), a point mass (hold) and a
// binomial thinning law (shrink). States are 1-based throughout this module;
// value and policy vectors use index s-1.

namespace netform::mdp {

// Raw in-range node count that corresponds to an effective count s under
// link failure rate beta.
int effective_to_raw(int s, double beta);

enum class GammaPreset { log2, sqrt, capped_linear };

GammaPreset gamma_preset_from_name(const std::string& name);
std::string gamma_preset_name(GammaPreset p);

// Concave increasing throughput curve gamma(s).
struct ThroughputFn {
  GammaPreset preset = GammaPreset::log2;
  double scale = 1.0;
  double cap = 0.0;         // capped_linear knee, in state units
  double tail_slope = 0.05; // capped_linear slope past the knee

  double operator()(double s) const;
};

struct MdpParams {
  int smax = 20;
  std::vector<double> actions;  // ordered coverage deltas
  double lambda = 0.8;          // node density per coverage unit
  double beta = 0.0;            // link failure rate
  double omega = 0.55;          // reward/cost weight
  double rho = 0.5;             // discount factor
  double range_ref = 0.0;       // reference coverage used by the shrink law
  std::optional<double> u;      // utility offset; defaulted when absent
  ThroughputFn gamma;
};

class MdpModel {
 public:
  explicit MdpModel(MdpParams params);

  int num_states() const { return params_.smax; }
  const std::vector<double>& actions() const { return params_.actions; }
  double lambda() const { return params_.lambda; }
  double beta() const { return params_.beta; }
  double omega() const { return params_.omega; }
  double rho() const { return params_.rho; }
  double range_ref() const { return params_.range_ref; }
  double u() const { return u_; }
  double gamma_of(int s) const { return gamma_table_[s - 1]; }

  // Transition row for an arbitrary action value; sums to 1.
  std::vector<double> transition(int s, double a) const;

  // Cached row for a grid action.
  std::span<const double> row(int s, int action_index) const;

  double utility(int s, double a, int s2) const;

  // Expected immediate utility of grid action ai in state s.
  double expected_utility(int s, int action_index) const;

  std::vector<double> bellman_backup(const std::vector<double>& v) const;
  std::vector<double> bellman_backup(const std::vector<double>& v,
                                     std::vector<int>* argmax_out) const;

  // Action indices in tie-break order: smallest magnitude first, negative
  // before positive on equal magnitude.
  const std::vector<int>& tie_order() const { return tie_order_; }

 private:
  MdpParams params_;
  double u_ = 0.0;
  std::vector<double> gamma_table_;           // gamma(1..smax)
  std::vector<double> kernel_;                // [action][s-1][s2-1]
  std::vector<double> expected_u_;            // [action][s-1]
  std::vector<int> tie_order_;
};

struct Policy {
  std::vector<double> actions;     // action grid the indices refer to
  std::vector<int> action_index;   // per state, size smax
  std::vector<double> value;       // fixed point reached at termination
  double epsilon = 0.0;            // certified optimality level
  double rho = 0.0;
  int iterations = 0;

  int num_states() const { return static_cast<int>(action_index.size()); }
  double action_of(int s) const { return actions[action_index[s - 1]]; }
};

// Value iteration from V = 0 with the (1-rho)/(2*rho)*epsilon stopping rule.
// rho = 0 degenerates to a single sweep (the myopic policy).
Policy solve_policy(const MdpModel& model, double epsilon);

// Direct argmax of expected immediate utility, no iteration.
Policy myopic_policy(const MdpModel& model);

// Free-function forms of the model operations.
std::vector<double> transition(int s, double a, const MdpModel& model);
double utility(int s, double a, int s2, const MdpModel& model);
std::vector<double> bellman_backup(const std::vector<double>& v,
                                   const MdpModel& model);

}  // namespace netform::mdp
