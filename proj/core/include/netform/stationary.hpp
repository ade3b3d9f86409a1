#pragma once

#include <Eigen/Dense>
#include <string>

#include "netform/mdp.hpp"

// Analysis of the Markov chain induced by running a fixed policy: chain
// construction, limiting distribution (absorbing and ergodic cases) and the
// initial-state choice used to seed a network near its stationary topology.

namespace netform::stationary {

struct misclassification_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ChainClass { absorbing, ergodic, mixed };

std::string chain_class_name(ChainClass c);

struct PolicyChain {
  Eigen::MatrixXd matrix;  // row-stochastic, indexed by state-1
  ChainClass cls = ChainClass::mixed;
  Eigen::VectorXd sigma;   // limiting distribution; empty until computed
  std::string note;        // set when the mixed fallback was taken
};

// Builds the chain whose row s is the kernel row of the policy's action at
// s. Classification: absorbing when some state holds (action 0) and every
// state can reach a holding state; ergodic when P^2 is strictly positive;
// mixed otherwise.
PolicyChain induce_chain(const mdp::Policy& policy, const mdp::MdpModel& model);

// Absorbing case: F = (I - Q)^{-1}, sigma proportional to the column sums of
// F R on absorbing states, zero on transient states. All states absorbing
// degenerates to the uniform distribution.
Eigen::VectorXd limiting_absorbing(const PolicyChain& chain);

// Ergodic case: left eigenvector of P for eigenvalue 1, found by power
// iteration to residual 1e-12. Requires some P^n (n <= |S|) to be strictly
// positive.
Eigen::VectorXd limiting_ergodic(const PolicyChain& chain);

// Limiting distribution read off P^(2^doublings) with column-sum
// normalization; the fallback route for chains fitting neither clean case.
Eigen::VectorXd limiting_by_powers(const Eigen::MatrixXd& p, int doublings = 40);

// Fills chain.sigma according to chain.cls and returns it.
const Eigen::VectorXd& compute_sigma(PolicyChain& chain);

// 1-based state with the highest limiting probability, ties toward the
// smaller state.
int initial_state(const PolicyChain& chain);

// Plain-text report: classification, stationarity residual, sigma and the
// chosen initial state.
std::string chain_report(const PolicyChain& chain);

}  // namespace netform::stationary
