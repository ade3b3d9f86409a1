#include "netform/selfcheck.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "netform/config.hpp"
#include "netform/galois.hpp"
#include "netform/mdp.hpp"
#include "netform/netsim.hpp"
#include "netform/random.hpp"
#include "netform/stationary.hpp"

namespace netform::selfcheck {
namespace {

using MulFn = std::function<std::uint16_t(std::uint16_t, std::uint16_t)>;

SuiteResult field_axioms(bool corrupt) {
  SuiteResult res{"field-axioms", true, ""};
  const galois::Field& f4 = galois::Field::of(4);
  const galois::Field& f8 = galois::Field::of(8);

  MulFn mul8 = [&](std::uint16_t a, std::uint16_t b) { return f8.mul(a, b); };
  if (corrupt) {
    mul8 = [&](std::uint16_t a, std::uint16_t b) -> std::uint16_t {
      if (a == 0x03 && b == 0x07) return f8.mul(a, b) ^ 1;
      return f8.mul(a, b);
    };
  }

  // Exhaustive axioms over GF(2^4).
  for (unsigned a = 0; a < 16 && res.passed; ++a)
    for (unsigned b = 0; b < 16 && res.passed; ++b)
      for (unsigned c = 0; c < 16; ++c) {
        const bool ok =
            f4.mul(a, f4.mul(b, c)) == f4.mul(f4.mul(a, b), c) &&
            f4.mul(a, b) == f4.mul(b, a) &&
            f4.mul(a, f4.add(b, c)) == f4.add(f4.mul(a, b), f4.mul(a, c));
        if (!ok) {
          res.passed = false;
          res.detail = "GF(2^4) axiom violated";
          break;
        }
      }

  // Inverses over GF(2^8) and sampled axioms with the (possibly hooked)
  // multiplication.
  for (unsigned a = 1; a < 256 && res.passed; ++a)
    if (f8.mul(a, f8.inv(a)) != 1) {
      res.passed = false;
      res.detail = "GF(2^8) inverse failed";
    }
  rng::Stream s(0x5eedf1e1d);
  for (int i = 0; i < 20000 && res.passed; ++i) {
    const std::uint16_t a = s.below(256), b = s.below(256), c = s.below(256);
    const bool ok =
        mul8(a, mul8(b, c)) == mul8(mul8(a, b), c) &&
        mul8(a, b) == mul8(b, a) &&
        mul8(a, f8.add(b, c)) == f8.add(mul8(a, b), mul8(a, c));
    if (!ok) {
      res.passed = false;
      res.detail = "GF(2^8) sampled axiom violated";
    }
  }
  return res;
}

SuiteResult kernel_stochasticity() {
  SuiteResult res{"kernel", true, ""};
  for (double beta : {0.0, 0.1, 0.2, 0.3}) {
    config::ExperimentConfig cfg = config::preset("numeric-study");
    cfg.beta_mode = "fixed";
    cfg.beta_fixed = beta;
    const mdp::MdpModel model = netsim::build_model(cfg);
    for (int s = 1; s <= model.num_states(); ++s) {
      for (std::size_t ai = 0; ai < model.actions().size(); ++ai) {
        const auto row = model.transition(s, model.actions()[ai]);
        double sum = 0;
        for (double v : row) {
          sum += v;
          if (v < 0) {
            res.passed = false;
            res.detail = "negative kernel entry";
          }
        }
        if (std::abs(sum - 1.0) > 1e-12) {
          res.passed = false;
          res.detail = "row sum off by " + std::to_string(sum - 1.0);
        }
      }
    }
  }
  return res;
}

SuiteResult bellman_properties() {
  SuiteResult res{"bellman", true, ""};
  config::ExperimentConfig cfg = config::preset("numeric-study");
  const mdp::MdpModel model = netsim::build_model(cfg);
  const int S = model.num_states();
  rng::Stream s(0xbe11);
  for (int trial = 0; trial < 20 && res.passed; ++trial) {
    std::vector<double> v(S), w(S);
    for (int i = 0; i < S; ++i) {
      v[i] = s.uniform(-5, 5);
      w[i] = v[i] + s.uniform(0, 3);  // w >= v
    }
    const auto tv = model.bellman_backup(v);
    const auto tw = model.bellman_backup(w);
    for (int i = 0; i < S; ++i)
      if (tv[i] > tw[i] + 1e-12) {
        res.passed = false;
        res.detail = "monotonicity violated";
      }
    const double d = s.uniform(-2, 2);
    std::vector<double> vd(S);
    for (int i = 0; i < S; ++i) vd[i] = v[i] + d;
    const auto tvd = model.bellman_backup(vd);
    for (int i = 0; i < S; ++i)
      if (std::abs(tvd[i] - (tv[i] + model.rho() * d)) > 1e-9) {
        res.passed = false;
        res.detail = "additivity violated";
      }
    double num = 0, den = 0;
    for (int i = 0; i < S; ++i) {
      num = std::max(num, std::abs(tv[i] - tw[i]));
      den = std::max(den, std::abs(v[i] - w[i]));
    }
    if (den > 0 && num > model.rho() * den + 1e-12) {
      res.passed = false;
      res.detail = "contraction ratio exceeded rho";
    }
  }
  return res;
}

SuiteResult chain_analysis() {
  SuiteResult res{"chain", true, ""};
  // Hand-checkable absorbing chain.
  stationary::PolicyChain chain;
  chain.matrix.resize(2, 2);
  chain.matrix << 0.5, 0.5, 0.0, 1.0;
  chain.cls = stationary::ChainClass::absorbing;
  const auto sigma = stationary::limiting_absorbing(chain);
  if (std::abs(sigma(0)) > 1e-12 || std::abs(sigma(1) - 1.0) > 1e-12) {
    res.passed = false;
    res.detail = "absorbing sigma wrong";
  }
  // Hand-checkable ergodic chain: sigma = (5/6, 1/6).
  stationary::PolicyChain erg;
  erg.matrix.resize(2, 2);
  erg.matrix << 0.9, 0.1, 0.5, 0.5;
  erg.cls = stationary::ChainClass::ergodic;
  const auto se = stationary::limiting_ergodic(erg);
  if (std::abs(se(0) - 5.0 / 6.0) > 1e-9 || std::abs(se(1) - 1.0 / 6.0) > 1e-9) {
    res.passed = false;
    res.detail = "ergodic sigma wrong";
  }
  erg.sigma = se;
  const double residual =
      ((erg.sigma.transpose() * erg.matrix).transpose() - erg.sigma)
          .cwiseAbs()
          .maxCoeff();
  if (residual > 1e-9) {
    res.passed = false;
    res.detail = "sigma P != sigma";
  }
  return res;
}

SuiteResult anonymity() {
  SuiteResult res{"anonymity", true, ""};
  config::ExperimentConfig cfg = config::preset("numeric-study");
  cfg.beta_mode = "fixed";
  cfg.beta_fixed = 0.0;
  cfg.mobility_sigma = 0.0;
  cfg.membership_update_period = 1000000;
  cfg.source_cadence = "once";
  cfg.ttl = 256;
  cfg.horizon = 64;
  cfg.fixed_range = 8.0;

  int usable = 0;
  double total = 0;
  for (std::uint64_t seed = 1; seed <= 12 && usable < 4; ++seed) {
    const auto r = netsim::anonymity_experiment(cfg, seed);
    if (!r.usable) continue;
    ++usable;
    total += r.index;
  }
  if (usable == 0) {
    res.passed = false;
    res.detail = "no usable draws";
  } else if (total / usable < 0.99) {
    res.passed = false;
    char buf[64];
    std::snprintf(buf, sizeof buf, "mean index %.4f < 0.99", total / usable);
    res.detail = buf;
  }
  return res;
}

}  // namespace

std::vector<SuiteResult> run_all(const std::string& fault) {
  std::vector<SuiteResult> out;
  out.push_back(field_axioms(fault == "gf"));
  out.push_back(kernel_stochasticity());
  out.push_back(bellman_properties());
  out.push_back(chain_analysis());
  out.push_back(anonymity());
  return out;
}

}  // namespace netform::selfcheck
