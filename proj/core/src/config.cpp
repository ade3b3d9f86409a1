#include "netform/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "netform/mdp.hpp"

namespace netform::config {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw config_error("config: bad number for '" + key + "': " + v);
  }
}

int parse_int(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != std::floor(d))
    throw config_error("config: expected integer for '" + key + "': " + v);
  return static_cast<int>(d);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw config_error("config: expected true/false for '" + key + "': " + v);
}

std::optional<double> parse_opt(const std::string& key, const std::string& v) {
  if (v == "auto") return std::nullopt;
  return parse_double(key, v);
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

std::vector<std::string> parse_string_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double d) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string fmt(const std::optional<double>& d) {
  return d ? fmt(*d) : std::string("auto");
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt(v[i]);
  }
  return out;
}

std::string join_strings(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v[i];
  }
  return out;
}

std::string join_seeds(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

void apply_key(ExperimentConfig& c, const std::string& key,
               const std::string& v) {
  if (key == "region_width") c.region_width = parse_double(key, v);
  else if (key == "region_height") c.region_height = parse_double(key, v);
  else if (key == "length_unit_m") c.length_unit_m = parse_double(key, v);
  else if (key == "lambda") c.lambda = parse_double(key, v);
  else if (key == "num_sources") c.num_sources = parse_int(key, v);
  else if (key == "num_terminals") c.num_terminals = parse_int(key, v);
  else if (key == "placement") c.placement = v;
  else if (key == "flow_map") c.flow_map = v;
  else if (key == "source_range") c.source_range = parse_opt(key, v);
  else if (key == "smax") c.smax = parse_int(key, v);
  else if (key == "num_actions") c.num_actions = parse_int(key, v);
  else if (key == "action_step") c.action_step = parse_double(key, v);
  else if (key == "omega") c.omega = parse_double(key, v);
  else if (key == "rho") c.rho = parse_double(key, v);
  else if (key == "epsilon") c.epsilon = parse_double(key, v);
  else if (key == "u") c.u = parse_opt(key, v);
  else if (key == "gamma_preset") c.gamma_preset = v;
  else if (key == "gamma_scale") c.gamma_scale = parse_double(key, v);
  else if (key == "gamma_cap") c.gamma_cap = parse_opt(key, v);
  else if (key == "model_beta") c.model_beta = parse_opt(key, v);
  else if (key == "range_ref") c.range_ref = parse_opt(key, v);
  else if (key == "range_min") c.range_min = parse_opt(key, v);
  else if (key == "beta_mode") c.beta_mode = v;
  else if (key == "beta_fixed") c.beta_fixed = parse_double(key, v);
  else if (key == "beta_band_lo") c.beta_band_lo = parse_double(key, v);
  else if (key == "beta_band_hi") c.beta_band_hi = parse_double(key, v);
  else if (key == "beta_update_period") c.beta_update_period = parse_int(key, v);
  else if (key == "membership_update_period")
    c.membership_update_period = parse_int(key, v);
  else if (key == "mobility_sigma") c.mobility_sigma = parse_double(key, v);
  else if (key == "ttl") c.ttl = parse_int(key, v);
  else if (key == "payload_symbols") c.payload_symbols = parse_int(key, v);
  else if (key == "gf_order_exp") c.gf_order_exp = parse_int(key, v);
  else if (key == "nonzero_coeffs") c.nonzero_coeffs = parse_bool(key, v);
  else if (key == "source_cadence") c.source_cadence = v;
  else if (key == "data_bits") c.data_bits = parse_double(key, v);
  else if (key == "unit_time_ms") c.unit_time_ms = parse_double(key, v);
  else if (key == "throughput_cap_mbps")
    c.throughput_cap_mbps = parse_double(key, v);
  else if (key == "eta") c.eta = parse_double(key, v);
  else if (key == "alpha") c.alpha = parse_double(key, v);
  else if (key == "horizon") c.horizon = parse_int(key, v);
  else if (key == "seeds") c.seeds = parse_seed_list(v);
  else if (key == "strategies") c.strategies = parse_string_list(v);
  else if (key == "fixed_range") c.fixed_range = parse_opt(key, v);
  else if (key == "out_dir") c.out_dir = v;
  else if (key == "threads") c.threads = parse_int(key, v);
  else if (key == "sweep_omega") c.sweep_omega = parse_double_list(key, v);
  else if (key == "sweep_beta") c.sweep_beta = parse_double_list(key, v);
  else if (key == "sweep_rho") c.sweep_rho = parse_double_list(key, v);
  else if (key == "sweep_area") c.sweep_area = parse_double_list(key, v);
  else
    throw config_error("config: unknown key '" + key + "'");
}

}  // namespace

double ExperimentConfig::resolved_model_beta() const {
  if (model_beta) return *model_beta;
  if (beta_mode == "fixed") return beta_fixed;
  return 0.5 * (beta_band_lo + beta_band_hi);
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw config_error("config: " + msg); };
  if (region_width <= 0 || region_height <= 0) fail("region must have positive measure");
  if (lambda <= 0) fail("lambda must be positive");
  if (lambda * area() <= 0) fail("expected node count lambda*area must be positive");
  if (num_sources < 1) fail("need at least one source");
  if (num_terminals < 1) fail("need at least one terminal");
  if (placement != "edges" && placement != "uniform") fail("placement must be edges or uniform");
  if (flow_map != "disjoint" && flow_map != "all") fail("flow_map must be disjoint or all");
  if (smax < 1) fail("smax must be >= 1");
  if (num_actions < 1 || num_actions % 2 == 0) fail("num_actions must be odd (symmetric grid around 0)");
  if (action_step <= 0) fail("action_step must be positive");
  if (omega < 0 || omega > 1) fail("omega must be in [0, 1]");
  if (rho < 0 || rho >= 1) fail("rho must be in [0, 1); the stopping rule is undefined at rho = 1");
  if (epsilon <= 0) fail("epsilon must be positive");
  if (gamma_scale <= 0) fail("gamma_scale must be positive");
  if (beta_mode != "fixed" && beta_mode != "banded") fail("beta_mode must be fixed or banded");
  if (beta_fixed < 0 || beta_fixed >= 1) fail("beta_fixed must be in [0, 1)");
  if (beta_band_lo < 0 || beta_band_hi >= 1 || beta_band_lo > beta_band_hi) fail("beta band must satisfy 0 <= lo <= hi < 1");
  if (beta_update_period < 1 || membership_update_period < 1) fail("update periods must be >= 1");
  if (mobility_sigma < 0) fail("mobility_sigma must be non-negative");
  if (ttl < 1) fail("ttl must be >= 1");
  if (payload_symbols < 1) fail("payload_symbols must be >= 1");
  if (gf_order_exp < 1 || gf_order_exp > 16) fail("gf_order_exp must be in [1, 16]");
  if (source_cadence != "every-step" && source_cadence != "once") fail("source_cadence must be every-step or once");
  if (data_bits <= 0) fail("data_bits must be positive");
  if (unit_time_ms <= 0) fail("unit_time_ms must be positive");
  if (eta < 0 || alpha < 0) fail("path loss parameters must be non-negative");
  if (horizon < 1) fail("horizon must be >= 1");
  if (seeds.empty()) fail("need at least one seed");
  for (const std::string& s : strategies)
    if (s != "proposed" && s != "myopic" && s != "fixed")
      fail("unknown strategy '" + s + "'");
  if (strategies.empty()) fail("need at least one strategy");
  const double mb = resolved_model_beta();
  if (mb < 0 || mb >= 1) fail("model_beta must be in [0, 1)");
  // The state grid cannot exceed what the expected population supports.
  const int bound = static_cast<int>(
      std::ceil((lambda * area() + num_terminals) / (1.0 - mb)));
  if (smax > bound)
    fail("smax exceeds ceil((expected nodes + terminals)/(1-beta)) = " +
         std::to_string(bound));
  const double max_shrink = action_step * ((num_actions - 1) / 2);
  if (range_ref && *range_ref <= max_shrink)
    fail("range_ref must exceed the largest shrink action");
  mdp::gamma_preset_from_name(gamma_preset);  // throws on unknown name
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "numeric-study") {
    // Two flows crossing a 6x6 region, density 4/5, no link failure.
    c.region_width = 6.0;
    c.region_height = 6.0;
    c.length_unit_m = 1.0;
    c.lambda = 0.8;
    c.num_sources = 2;
    c.num_terminals = 2;
    c.smax = 20;
    c.num_actions = 5;
    c.action_step = 1.0;
    c.omega = 0.55;
    c.rho = 0.5;
    c.epsilon = 0.01;
    c.gamma_preset = "capped-linear";
    c.gamma_scale = 12.0;
    c.beta_mode = "fixed";
    c.beta_fixed = 0.0;
    c.mobility_sigma = 0.05;
    c.horizon = 1000;
    c.seeds = parse_seed_list("1..20");
  } else if (name == "wifi-direct-app") {
    // 60x60 m^2 at 8e-3 nodes/m^2, expressed in 10 m units so coverage
    // measures stay O(1); IEEE 802.11ac MCS-9 rate constants. The model is
    // solved once at the adverse end of the failure band with a long
    // outlook, which is what makes the adaptive policy hold wider coverage
    // than the myopic one.
    c.region_width = 6.0;
    c.region_height = 6.0;
    c.length_unit_m = 10.0;
    c.lambda = 0.8;
    c.num_sources = 2;
    c.num_terminals = 2;
    c.smax = 18;
    c.num_actions = 7;
    c.action_step = 1.0;
    c.omega = 0.53;
    c.u = 0.2;
    c.rho = 0.9;
    c.epsilon = 0.01;
    c.gamma_preset = "capped-linear";
    c.gamma_scale = 12.0;
    c.model_beta = 0.25;
    c.range_ref = 20.0;
    c.beta_mode = "banded";
    c.beta_band_lo = 0.0;
    c.beta_band_hi = 0.3;
    c.beta_update_period = 5;
    c.membership_update_period = 5;
    c.mobility_sigma = 0.05;
    c.ttl = 16;
    c.payload_symbols = 32;
    c.gf_order_exp = 8;
    c.data_bits = 910000.0;
    c.unit_time_ms = 1.0;
    c.throughput_cap_mbps = 910.0;
    c.eta = 1.0;
    c.alpha = 2.0;
    c.horizon = 1000;
    c.seeds = parse_seed_list("1..20");
  } else {
    throw config_error("unknown preset '" + name + "'");
  }
  return c;
}

std::vector<std::string> preset_names() {
  return {"numeric-study", "wifi-direct-app"};
}

ExperimentConfig parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string preset_name;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config: line " + std::to_string(lineno) +
                         " is not key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "preset")
      preset_name = value;
    else
      entries.emplace_back(key, value);
  }
  ExperimentConfig cfg =
      preset_name.empty() ? ExperimentConfig{} : preset(preset_name);
  for (const auto& [k, v] : entries) apply_key(cfg, k, v);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw config_error("override must be key=value: " + assignment);
  apply_key(cfg, trim(assignment.substr(0, eq)),
            trim(assignment.substr(eq + 1)));
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  auto kv = [&out](const std::string& k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  };
  kv("region_width", fmt(c.region_width));
  kv("region_height", fmt(c.region_height));
  kv("length_unit_m", fmt(c.length_unit_m));
  kv("lambda", fmt(c.lambda));
  kv("num_sources", std::to_string(c.num_sources));
  kv("num_terminals", std::to_string(c.num_terminals));
  kv("placement", c.placement);
  kv("flow_map", c.flow_map);
  kv("source_range", fmt(c.source_range));
  kv("smax", std::to_string(c.smax));
  kv("num_actions", std::to_string(c.num_actions));
  kv("action_step", fmt(c.action_step));
  kv("omega", fmt(c.omega));
  kv("rho", fmt(c.rho));
  kv("epsilon", fmt(c.epsilon));
  kv("u", fmt(c.u));
  kv("gamma_preset", c.gamma_preset);
  kv("gamma_scale", fmt(c.gamma_scale));
  kv("gamma_cap", fmt(c.gamma_cap));
  kv("model_beta", fmt(c.model_beta));
  kv("range_ref", fmt(c.range_ref));
  kv("range_min", fmt(c.range_min));
  kv("beta_mode", c.beta_mode);
  kv("beta_fixed", fmt(c.beta_fixed));
  kv("beta_band_lo", fmt(c.beta_band_lo));
  kv("beta_band_hi", fmt(c.beta_band_hi));
  kv("beta_update_period", std::to_string(c.beta_update_period));
  kv("membership_update_period", std::to_string(c.membership_update_period));
  kv("mobility_sigma", fmt(c.mobility_sigma));
  kv("ttl", std::to_string(c.ttl));
  kv("payload_symbols", std::to_string(c.payload_symbols));
  kv("gf_order_exp", std::to_string(c.gf_order_exp));
  kv("nonzero_coeffs", c.nonzero_coeffs ? "true" : "false");
  kv("source_cadence", c.source_cadence);
  kv("data_bits", fmt(c.data_bits));
  kv("unit_time_ms", fmt(c.unit_time_ms));
  kv("throughput_cap_mbps", fmt(c.throughput_cap_mbps));
  kv("eta", fmt(c.eta));
  kv("alpha", fmt(c.alpha));
  kv("horizon", std::to_string(c.horizon));
  kv("seeds", join_seeds(c.seeds));
  kv("strategies", join_strings(c.strategies));
  kv("fixed_range", fmt(c.fixed_range));
  kv("out_dir", c.out_dir);
  kv("threads", std::to_string(c.threads));
  kv("sweep_omega", join_doubles(c.sweep_omega));
  kv("sweep_beta", join_doubles(c.sweep_beta));
  kv("sweep_rho", join_doubles(c.sweep_rho));
  kv("sweep_area", join_doubles(c.sweep_area));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto dots = item.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoull(item));
      } else {
        const std::uint64_t lo = std::stoull(item.substr(0, dots));
        const std::uint64_t hi = std::stoull(item.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument(item);
        for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
      }
    } catch (const std::exception&) {
      throw config_error("config: bad seed list entry: " + item);
    }
  }
  return out;
}

}  // namespace netform::config
