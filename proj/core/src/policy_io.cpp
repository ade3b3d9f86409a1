#include "netform/policy_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace netform::policy_io {
namespace {

std::string fmt(double d) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

}  // namespace

std::string export_policy(const mdp::Policy& p) {
  std::string out = "# policy\n";
  out += "states " + std::to_string(p.num_states()) + "\n";
  out += "rho " + fmt(p.rho) + "\n";
  out += "epsilon " + fmt(p.epsilon) + "\n";
  out += "iterations " + std::to_string(p.iterations) + "\n";
  out += "actions";
  for (double a : p.actions) out += " " + fmt(a);
  out += "\n";
  for (int s = 1; s <= p.num_states(); ++s)
    out += std::to_string(s) + " " + fmt(p.action_of(s)) + " " +
           fmt(p.value[s - 1]) + "\n";
  return out;
}

mdp::Policy import_policy(const std::string& text) {
  mdp::Policy p;
  std::stringstream ss(text);
  std::string line;
  int states = -1;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "states") {
      ls >> states;
      p.action_index.assign(states, 0);
      p.value.assign(states, 0.0);
    } else if (head == "rho") {
      ls >> p.rho;
    } else if (head == "epsilon") {
      ls >> p.epsilon;
    } else if (head == "iterations") {
      ls >> p.iterations;
    } else if (head == "actions") {
      double a;
      while (ls >> a) p.actions.push_back(a);
    } else {
      const int s = std::stoi(head);
      double action = 0.0, value = 0.0;
      ls >> action >> value;
      if (states < 1 || s < 1 || s > states)
        throw std::runtime_error("policy file: state outside declared grid");
      int ai = -1;
      for (std::size_t i = 0; i < p.actions.size(); ++i)
        if (p.actions[i] == action) ai = static_cast<int>(i);
      if (ai < 0)
        throw std::runtime_error("policy file: action not in declared grid");
      p.action_index[s - 1] = ai;
      p.value[s - 1] = value;
    }
  }
  if (states < 1 || p.actions.empty())
    throw std::runtime_error("policy file: missing header");
  return p;
}

void save_policy_file(const mdp::Policy& policy, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write policy file: " + path);
  out << export_policy(policy);
}

mdp::Policy load_policy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read policy file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return import_policy(ss.str());
}

}  // namespace netform::policy_io
