#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Flat key = value experiment configuration. Two named presets carry the
// parameter sets of the numerical study and the Wi-Fi Direct application
// experiment; a config file may start from a preset and override keys.

namespace netform::config {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // Region and node population. Lengths are in abstract units; one unit is
  // length_unit_m meters (only the power metric cares).
  double region_width = 6.0;
  double region_height = 6.0;
  double length_unit_m = 1.0;
  double lambda = 0.8;  // intermediate node density per unit^2
  int num_sources = 2;
  int num_terminals = 2;
  std::string placement = "edges";  // edges | uniform
  std::string flow_map = "disjoint";  // disjoint | all
  std::optional<double> source_range;  // coverage units; auto = initial range

  // Decision model.
  int smax = 20;
  int num_actions = 5;      // odd; grid is {-k..k} * action_step
  double action_step = 1.0;
  double omega = 0.55;
  double rho = 0.5;
  double epsilon = 0.01;
  std::optional<double> u;  // auto: max(0, (1-omega)*max action) + margin
  std::string gamma_preset = "log";
  double gamma_scale = 1.0;
  std::optional<double> gamma_cap;    // auto: smax / 2
  std::optional<double> model_beta;   // auto: fixed beta or band midpoint
  std::optional<double> range_ref;    // auto: raw mid-state count / lambda
  std::optional<double> range_min;    // auto: action_step / 2

  // Dynamics schedule.
  std::string beta_mode = "fixed";  // fixed | banded
  double beta_fixed = 0.0;
  double beta_band_lo = 0.0;
  double beta_band_hi = 0.3;
  int beta_update_period = 5;
  int membership_update_period = 5;
  double mobility_sigma = 0.05;  // per-step displacement, units

  // Coding layer.
  int ttl = 16;
  int payload_symbols = 32;
  int gf_order_exp = 8;
  bool nonzero_coeffs = false;
  std::string source_cadence = "every-step";  // every-step | once

  // Metrics.
  double data_bits = 910000.0;  // delivered data set size, bits
  double unit_time_ms = 1.0;
  double throughput_cap_mbps = 910.0;
  double eta = 1.0;
  double alpha = 2.0;

  // Run control.
  int horizon = 1000;
  std::vector<std::uint64_t> seeds = {1};
  std::vector<std::string> strategies = {"proposed", "myopic", "fixed"};
  std::optional<double> fixed_range;  // auto: proposed initial range
  std::string out_dir = "out";
  int threads = 0;  // 0 = hardware concurrency

  // Sweep grids.
  std::vector<double> sweep_omega = {0.45, 0.50, 0.55, 0.60, 0.65};
  std::vector<double> sweep_beta = {0.0, 0.1, 0.2, 0.3};
  std::vector<double> sweep_rho = {0.3, 0.5, 0.7, 0.9};
  std::vector<double> sweep_area = {36.0, 64.0, 100.0};

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;

  double area() const { return region_width * region_height; }
  double resolved_model_beta() const;
  double resolved_gamma_cap() const { return gamma_cap.value_or(smax / 2.0); }
  double resolved_range_min() const {
    return range_min.value_or(action_step / 2.0);
  }

  // Throws config_error on any out-of-range value.
  void validate() const;
};

// Named presets: "numeric-study" and "wifi-direct-app".
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

// Parses key = value text ('#' comments). A "preset" key, wherever it
// appears, is applied before every other key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Applies a single "key=value" override to an existing config.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

std::string serialize_config(const ExperimentConfig& cfg);

// "1,2,5" and "1..20" forms, mixable.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace netform::config
