#include "netform/stationary.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace netform::stationary {
namespace {

constexpr double kUnitRowTol = 1e-12;

bool is_unit_row(const Eigen::MatrixXd& p, int s) {
  return p(s, s) >= 1.0 - kUnitRowTol;
}

// True when every state can reach some state in `targets` on the support
// graph of p.
bool all_reach(const Eigen::MatrixXd& p, const std::vector<int>& targets) {
  const int n = static_cast<int>(p.rows());
  std::vector<char> reaches(n, 0);
  for (int t : targets) reaches[t] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < n; ++s) {
      if (reaches[s]) continue;
      for (int s2 = 0; s2 < n; ++s2) {
        if (p(s, s2) > 0.0 && reaches[s2]) {
          reaches[s] = 1;
          changed = true;
          break;
        }
      }
    }
  }
  for (int s = 0; s < n; ++s)
    if (!reaches[s]) return false;
  return true;
}

bool strictly_positive(const Eigen::MatrixXd& m) {
  return (m.array() > 0.0).all();
}

// Some boolean power of the support pattern up to n is all-ones.
bool eventually_positive(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  Eigen::MatrixXd power = p;
  for (int k = 1; k <= n; ++k) {
    if (strictly_positive(power)) return true;
    power = power * p;
    // Keep the pattern numerically alive across many multiplications.
    power = (power.array() > 0.0).cast<double>();
  }
  return false;
}

}  // namespace

std::string chain_class_name(ChainClass c) {
  switch (c) {
    case ChainClass::absorbing: return "absorbing";
    case ChainClass::ergodic: return "ergodic";
    case ChainClass::mixed: return "mixed";
  }
  return "mixed";
}

PolicyChain induce_chain(const mdp::Policy& policy,
                         const mdp::MdpModel& model) {
  const int S = model.num_states();
  if (policy.num_states() != S)
    throw std::invalid_argument("induce_chain: policy defined on wrong grid");

  PolicyChain chain;
  chain.matrix.resize(S, S);
  std::vector<int> holding;
  for (int s = 1; s <= S; ++s) {
    const double a = policy.action_of(s);
    const std::vector<double> row = model.transition(s, a);
    for (int s2 = 0; s2 < S; ++s2) chain.matrix(s - 1, s2) = row[s2];
    if (a == 0.0) holding.push_back(s - 1);
  }

  if (!holding.empty() && all_reach(chain.matrix, holding)) {
    chain.cls = ChainClass::absorbing;
  } else if (strictly_positive(chain.matrix * chain.matrix)) {
    chain.cls = ChainClass::ergodic;
  } else {
    chain.cls = ChainClass::mixed;
    chain.note = "chain fits neither clean case; using matrix-power limiting";
  }
  return chain;
}

Eigen::VectorXd limiting_absorbing(const PolicyChain& chain) {
  const Eigen::MatrixXd& p = chain.matrix;
  const int n = static_cast<int>(p.rows());
  std::vector<int> absorbing, transient;
  for (int s = 0; s < n; ++s)
    (is_unit_row(p, s) ? absorbing : transient).push_back(s);
  if (absorbing.empty())
    throw misclassification_error("limiting_absorbing: no absorbing state");

  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(n);
  if (transient.empty()) {
    for (int s : absorbing) sigma(s) = 1.0 / absorbing.size();
    return sigma;
  }

  const int nt = static_cast<int>(transient.size());
  const int na = static_cast<int>(absorbing.size());
  Eigen::MatrixXd q(nt, nt), r(nt, na);
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < nt; ++j) q(i, j) = p(transient[i], transient[j]);
    for (int j = 0; j < na; ++j) r(i, j) = p(transient[i], absorbing[j]);
  }

  const Eigen::MatrixXd i_minus_q = Eigen::MatrixXd::Identity(nt, nt) - q;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(i_minus_q);
  const Eigen::MatrixXd fr = lu.solve(r);  // F R without forming F
  if (!fr.allFinite() ||
      (i_minus_q * fr - r).cwiseAbs().maxCoeff() > 1e-8)
    throw misclassification_error(
        "limiting_absorbing: I - Q is singular (misclassified chain)");

  Eigen::VectorXd colsum = fr.colwise().sum();
  const double total = colsum.sum();
  for (int j = 0; j < na; ++j) sigma(absorbing[j]) = colsum(j) / total;
  return sigma;
}

Eigen::VectorXd limiting_ergodic(const PolicyChain& chain) {
  const Eigen::MatrixXd& p = chain.matrix;
  const int n = static_cast<int>(p.rows());
  if (!eventually_positive(p))
    throw misclassification_error(
        "limiting_ergodic: no power of P up to |S| is strictly positive");

  Eigen::RowVectorXd sigma = Eigen::RowVectorXd::Constant(n, 1.0 / n);
  constexpr int kMaxIterations = 1'000'000;
  for (int it = 0; it < kMaxIterations; ++it) {
    Eigen::RowVectorXd next = sigma * p;
    next /= next.sum();
    const double residual = (next - sigma).cwiseAbs().maxCoeff();
    sigma = next;
    if (residual <= 1e-12) break;
  }
  return sigma.transpose();
}

Eigen::VectorXd limiting_by_powers(const Eigen::MatrixXd& p, int doublings) {
  Eigen::MatrixXd power = p;
  for (int k = 0; k < doublings; ++k) {
    power = power * power;
    // Repeated squaring drifts row sums; rescale to keep them stochastic.
    for (int i = 0; i < power.rows(); ++i) {
      const double s = power.row(i).sum();
      if (s > 0) power.row(i) /= s;
    }
  }
  Eigen::VectorXd colsum = power.colwise().sum();
  return colsum / colsum.sum();
}

const Eigen::VectorXd& compute_sigma(PolicyChain& chain) {
  switch (chain.cls) {
    case ChainClass::absorbing:
      chain.sigma = limiting_absorbing(chain);
      break;
    case ChainClass::ergodic:
      chain.sigma = limiting_ergodic(chain);
      break;
    case ChainClass::mixed:
      chain.sigma = limiting_by_powers(chain.matrix);
      break;
  }
  return chain.sigma;
}

int initial_state(const PolicyChain& chain) {
  if (chain.sigma.size() == 0)
    throw std::logic_error("initial_state: sigma not computed");
  int best = 0;
  for (int s = 1; s < chain.sigma.size(); ++s)
    if (chain.sigma(s) > chain.sigma(best)) best = s;
  return best + 1;
}

std::string chain_report(const PolicyChain& chain) {
  std::string out;
  out += "class " + chain_class_name(chain.cls) + "\n";
  if (!chain.note.empty()) out += "note " + chain.note + "\n";
  char buf[64];
  if (chain.sigma.size() > 0) {
    const Eigen::RowVectorXd sp = chain.sigma.transpose() * chain.matrix;
    const double residual =
        (sp.transpose() - chain.sigma).cwiseAbs().maxCoeff();
    std::snprintf(buf, sizeof buf, "stationarity_residual %.3e\n", residual);
    out += buf;
    for (int s = 0; s < chain.sigma.size(); ++s) {
      std::snprintf(buf, sizeof buf, "sigma %d %.12g\n", s + 1,
                    chain.sigma(s));
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "initial_state %d\n",
                  initial_state(chain));
    out += buf;
  }
  return out;
}

}  // namespace netform::stationary
