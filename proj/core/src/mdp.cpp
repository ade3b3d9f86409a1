#include "netform/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace netform::mdp {

int effective_to_raw(int s, double beta) {
  if (beta < 0.0 || beta >= 1.0)
    throw std::domain_error("effective_to_raw: beta must be in [0, 1)");
  if (s < 0) throw std::domain_error("effective_to_raw: negative state");
  // Guard against ratios that are mathematically integral landing a hair
  // above the integer in floating point.
  return static_cast<int>(std::ceil(s / (1.0 - beta) - 1e-9));
}

GammaPreset gamma_preset_from_name(const std::string& name) {
  if (name == "log") return GammaPreset::log2;
  if (name == "sqrt") return GammaPreset::sqrt;
  if (name == "capped-linear") return GammaPreset::capped_linear;
  throw std::invalid_argument("unknown gamma preset: " + name);
}

std::string gamma_preset_name(GammaPreset p) {
  switch (p) {
    case GammaPreset::log2: return "log";
    case GammaPreset::sqrt: return "sqrt";
    case GammaPreset::capped_linear: return "capped-linear";
  }
  return "log";
}

double ThroughputFn::operator()(double s) const {
  switch (preset) {
    case GammaPreset::log2:
      return scale * std::log2(1.0 + s);
    case GammaPreset::sqrt:
      return scale * std::sqrt(s);
    case GammaPreset::capped_linear:
      return s <= cap ? scale * s : scale * (cap + tail_slope * (s - cap));
  }
  return scale * std::log2(1.0 + s);
}

MdpModel::MdpModel(MdpParams params) : params_(std::move(params)) {
  if (params_.smax < 1)
    throw std::invalid_argument("MdpModel: need at least one state");
  if (params_.lambda <= 0.0)
    throw std::invalid_argument("MdpModel: lambda must be positive");
  if (params_.beta < 0.0 || params_.beta >= 1.0)
    throw std::invalid_argument("MdpModel: beta must be in [0, 1)");
  if (params_.omega < 0.0 || params_.omega > 1.0)
    throw std::invalid_argument("MdpModel: omega must be in [0, 1]");
  if (params_.rho < 0.0 || params_.rho >= 1.0)
    throw std::invalid_argument("MdpModel: rho must be in [0, 1)");
  if (params_.actions.empty())
    throw std::invalid_argument("MdpModel: empty action set");
  if (!std::is_sorted(params_.actions.begin(), params_.actions.end()))
    throw std::invalid_argument("MdpModel: actions must be ordered");
  double max_shrink = 0.0;
  for (double a : params_.actions) max_shrink = std::max(max_shrink, -a);
  if (max_shrink > 0.0 && params_.range_ref <= max_shrink)
    throw std::invalid_argument(
        "MdpModel: range_ref must exceed the largest shrink action");

  gamma_table_.resize(params_.smax);
  for (int s = 1; s <= params_.smax; ++s)
    gamma_table_[s - 1] = params_.gamma(static_cast<double>(s));
  for (int s = 2; s <= params_.smax; ++s)
    if (gamma_table_[s - 1] <= gamma_table_[s - 2])
      throw std::invalid_argument(
          "MdpModel: gamma must be strictly increasing on the state grid");

  double max_action = 0.0;
  for (double a : params_.actions) max_action = std::max(max_action, a);
  u_ = params_.u.value_or(
      std::max(0.0, (1.0 - params_.omega) * max_action) + 0.01);

  const int S = params_.smax;
  const int A = static_cast<int>(params_.actions.size());
  kernel_.resize(static_cast<std::size_t>(A) * S * S);
  expected_u_.resize(static_cast<std::size_t>(A) * S);
  for (int ai = 0; ai < A; ++ai) {
    const double a = params_.actions[ai];
    for (int s = 1; s <= S; ++s) {
      const std::vector<double> row = transition(s, a);
      double eu = 0.0;
      for (int s2 = 1; s2 <= S; ++s2) eu += row[s2 - 1] * utility(s, a, s2);
      std::copy(row.begin(), row.end(),
                kernel_.begin() + (static_cast<std::size_t>(ai) * S + s - 1) * S);
      expected_u_[static_cast<std::size_t>(ai) * S + s - 1] = eu;
    }
  }

  tie_order_.resize(A);
  for (int i = 0; i < A; ++i) tie_order_[i] = i;
  std::stable_sort(tie_order_.begin(), tie_order_.end(), [&](int lhs, int rhs) {
    const double la = params_.actions[lhs], ra = params_.actions[rhs];
    if (std::abs(la) != std::abs(ra)) return std::abs(la) < std::abs(ra);
    return la < ra;  // negative before positive
  });
}

std::vector<double> MdpModel::transition(int s, double a) const {
  const int S = params_.smax;
  if (s < 1 || s > S) throw std::domain_error("transition: state out of range");
  std::vector<double> row(S, 0.0);

  if (a == 0.0) {
    row[s - 1] = 1.0;
    return row;
  }

  const double beta = params_.beta;
  const int xi = effective_to_raw(s, beta);

  if (a > 0.0) {
    // Poisson arrivals over the added coverage; raw counts past the top
    // state are lumped into smax, gaps introduced by the ceil map are
    // handled by the final renormalization.
    const double mean = params_.lambda * a;
    const int xi_top = effective_to_raw(S, beta);
    std::vector<double> pmf(xi_top - xi + 1, 0.0);
    double p = std::exp(-mean);
    double cum = p;
    pmf[0] = p;
    for (int k = 1; k <= xi_top - xi; ++k) {
      p *= mean / k;
      pmf[k] = p;
      cum += p;
    }
    for (int s2 = s; s2 <= S; ++s2)
      row[s2 - 1] = pmf[effective_to_raw(s2, beta) - xi];
    row[S - 1] += std::max(0.0, 1.0 - cum);  // tail mass
  } else {
    const double frac = -a / params_.range_ref;
    if (frac >= 1.0)
      throw std::domain_error(
          "transition: shrink action at least as large as the current range");
    // Binomial thinning: each of the xi raw nodes stays with prob 1 - frac.
    // Raw counts below state 1 are lumped into state 1.
    std::vector<double> pmf(xi + 1, 0.0);
    double p = std::pow(1.0 - frac, xi);  // all kept
    pmf[xi] = p;
    for (int k = xi - 1; k >= 0; --k) {
      p *= (static_cast<double>(k + 1) / (xi - k)) * (frac / (1.0 - frac));
      pmf[k] = p;
    }
    const int xi_bottom = effective_to_raw(1, beta);
    for (int s2 = 1; s2 <= s; ++s2) {
      const int x2 = effective_to_raw(s2, beta);
      if (x2 <= xi) row[s2 - 1] = pmf[x2];
    }
    double below = 0.0;
    for (int k = 0; k < std::min(xi_bottom, xi + 1); ++k) below += pmf[k];
    row[0] += below;
  }

  double sum = 0.0;
  for (double v : row) sum += v;
  if (sum <= 0.0)
    throw std::domain_error("transition: degenerate row");
  for (double& v : row) v /= sum;
  return row;
}

std::span<const double> MdpModel::row(int s, int action_index) const {
  const int S = params_.smax;
  return {kernel_.data() +
              (static_cast<std::size_t>(action_index) * S + s - 1) * S,
          static_cast<std::size_t>(S)};
}

double MdpModel::utility(int s, double a, int s2) const {
  return u_ + params_.omega * (gamma_table_[s2 - 1] - gamma_table_[s - 1]) -
         (1.0 - params_.omega) * a;
}

double MdpModel::expected_utility(int s, int action_index) const {
  return expected_u_[static_cast<std::size_t>(action_index) * params_.smax +
                     s - 1];
}

std::vector<double> MdpModel::bellman_backup(
    const std::vector<double>& v) const {
  return bellman_backup(v, nullptr);
}

std::vector<double> MdpModel::bellman_backup(const std::vector<double>& v,
                                             std::vector<int>* argmax_out) const {
  const int S = params_.smax;
  if (static_cast<int>(v.size()) != S)
    throw std::invalid_argument("bellman_backup: one entry per state");
  std::vector<double> out(S, 0.0);
  if (argmax_out) argmax_out->assign(S, tie_order_.front());
  for (int s = 1; s <= S; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    int best_ai = tie_order_.front();
    for (int ai : tie_order_) {
      const std::span<const double> pr = row(s, ai);
      double q = expected_utility(s, ai);
      if (params_.rho != 0.0) {
        double ev = 0.0;
        for (int s2 = 0; s2 < S; ++s2) ev += pr[s2] * v[s2];
        q += params_.rho * ev;
      }
      if (q > best) {
        best = q;
        best_ai = ai;
      }
    }
    out[s - 1] = best;
    if (argmax_out) (*argmax_out)[s - 1] = best_ai;
  }
  return out;
}

Policy solve_policy(const MdpModel& model, double epsilon) {
  if (epsilon <= 0.0)
    throw std::invalid_argument("solve_policy: epsilon must be positive");
  const int S = model.num_states();
  Policy pol;
  pol.actions = model.actions();
  pol.rho = model.rho();
  pol.epsilon = epsilon;

  std::vector<double> v(S, 0.0);
  std::vector<int> greedy(S, 0);

  if (model.rho() == 0.0) {
    // One sweep: the backup ignores v entirely and the greedy policy is the
    // myopic argmax of expected immediate utility.
    v = model.bellman_backup(v, &greedy);
    pol.value = v;
    pol.action_index = greedy;
    pol.iterations = 1;
    pol.epsilon = 0.0;
    return pol;
  }

  const double threshold = (1.0 - model.rho()) / (2.0 * model.rho()) * epsilon;
  constexpr int kMaxIterations = 10'000'000;
  int it = 0;
  double diff = std::numeric_limits<double>::infinity();
  while (diff > threshold) {
    if (++it > kMaxIterations)
      throw std::runtime_error("solve_policy: iteration cap exceeded");
    const std::vector<double> next = model.bellman_backup(v, &greedy);
    diff = 0.0;
    for (int i = 0; i < S; ++i) diff = std::max(diff, std::abs(next[i] - v[i]));
    v = next;
    if (!std::isfinite(diff))
      throw std::runtime_error("solve_policy: diverged");
  }

  pol.value = v;
  pol.action_index = greedy;
  pol.iterations = it;
  return pol;
}

Policy myopic_policy(const MdpModel& model) {
  const int S = model.num_states();
  Policy pol;
  pol.actions = model.actions();
  pol.rho = 0.0;
  pol.epsilon = 0.0;
  pol.iterations = 1;
  pol.value.assign(S, 0.0);
  pol.action_index.assign(S, 0);
  for (int s = 1; s <= S; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    int best_ai = model.tie_order().front();
    for (int ai : model.tie_order()) {
      const double q = model.expected_utility(s, ai);
      if (q > best) {
        best = q;
        best_ai = ai;
      }
    }
    pol.value[s - 1] = best;
    pol.action_index[s - 1] = best_ai;
  }
  return pol;
}

std::vector<double> transition(int s, double a, const MdpModel& model) {
  return model.transition(s, a);
}

double utility(int s, double a, int s2, const MdpModel& model) {
  return model.utility(s, a, s2);
}

std::vector<double> bellman_backup(const std::vector<double>& v,
                                   const MdpModel& model) {
  return model.bellman_backup(v);
}

}  // namespace netform::mdp
