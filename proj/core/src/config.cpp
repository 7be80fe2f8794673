#include "hpa/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "hpa/errors.hpp"

namespace hpa {

namespace {

using nlohmann::json;

// Visits every field as (name, reference); the order fixes the canonical
// serialization.
template <class Config, class F>
void for_each_field(Config& c, F&& f) {
  f("tau", c.tau);
  f("t", c.t);
  f("eta_L", c.eta_L);
  f("alpha", c.alpha);
  f("phases", c.phases);
  f("detector_efficiency_alice", c.detector_efficiency_alice);
  f("detector_efficiency_bob", c.detector_efficiency_bob);
  f("detector_efficiency_bsm", c.detector_efficiency_bsm);
  f("dark_click_alice", c.dark_click_alice);
  f("dark_click_bob", c.dark_click_bob);
  f("dark_click_bsm", c.dark_click_bsm);
  f("coupling_alice", c.coupling_alice);
  f("coupling_bob", c.coupling_bob);
  f("bsm_coupling", c.bsm_coupling);
  f("overlap_displacement", c.overlap_displacement);
  f("overlap_bsm", c.overlap_bsm);
  f("double_pair_probability", c.double_pair_probability);
  f("cutoff", c.cutoff);
  f("events_scan", c.events_scan);
  f("events_zero", c.events_zero);
  f("seed", c.seed);
  f("bootstrap_resamples", c.bootstrap_resamples);
  f("threads", c.threads);
  f("amplitude_jitter", c.amplitude_jitter);
  f("pair_rate", c.pair_rate);
  f("sigma_tau", c.sigma_tau);
  f("sigma_t", c.sigma_t);
  f("sigma_eta_d", c.sigma_eta_d);
  f("sigma_overlap", c.sigma_overlap);
}

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw ConfigError(std::string(name) + " must lie in [0, 1], got " + std::to_string(x));
  }
}

}  // namespace

std::vector<double> equally_spaced_phases(int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(2.0 * std::numbers::pi * k / n);
  return out;
}

void ExperimentConfig::validate() const {
  check_unit(tau, "tau");
  check_unit(t, "t");
  check_unit(eta_L, "eta_L");
  check_unit(detector_efficiency_alice, "detector_efficiency_alice");
  check_unit(detector_efficiency_bob, "detector_efficiency_bob");
  check_unit(detector_efficiency_bsm, "detector_efficiency_bsm");
  check_unit(dark_click_alice, "dark_click_alice");
  check_unit(dark_click_bob, "dark_click_bob");
  check_unit(dark_click_bsm, "dark_click_bsm");
  check_unit(coupling_alice, "coupling_alice");
  check_unit(coupling_bob, "coupling_bob");
  check_unit(bsm_coupling, "bsm_coupling");
  check_unit(overlap_displacement, "overlap_displacement");
  check_unit(overlap_bsm, "overlap_bsm");
  if (!(double_pair_probability >= 0.0 && double_pair_probability <= 0.1)) {
    throw ConfigError("double_pair_probability must lie in [0, 0.1], got " + std::to_string(double_pair_probability));
  }
  if (!(alpha >= 0.0 && std::isfinite(alpha))) throw ConfigError("alpha must be a finite non-negative amplitude");
  if (cutoff < 2) throw ConfigError("cutoff must be >= 2, got " + std::to_string(cutoff));
  if (phases.size() < 4) throw ConfigError("phases needs at least 4 entries");
  for (const double p : phases) {
    if (!std::isfinite(p)) throw ConfigError("phases must be finite");
  }
  if (!(amplitude_jitter >= 0.0)) throw ConfigError("amplitude_jitter must be >= 0");
  if (!(pair_rate >= 0.0)) throw ConfigError("pair_rate must be >= 0");
  for (const double s : {sigma_tau, sigma_t, sigma_eta_d, sigma_overlap}) {
    if (!(s >= 0.0)) throw ConfigError("parameter sigmas must be >= 0");
  }
  if (threads == 0) throw ConfigError("threads must be >= 1");
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.coupling_alice = kDefaultCalibration.coupling_alice;
  c.coupling_bob = kDefaultCalibration.coupling_bob;
  c.double_pair_probability = kDefaultCalibration.double_pair_probability;
  c.bsm_coupling = kDefaultCalibration.bsm_coupling;
  return c;
}

std::string to_json(const ExperimentConfig& config) {
  json j = json::object();
  for_each_field(config, [&](const char* name, const auto& value) { j[name] = value; });
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig c = default_config();
  std::size_t known = 0;
  for_each_field(c, [&](const char* name, auto& value) {
    const auto it = j.find(name);
    if (it == j.end()) return;
    ++known;
    try {
      it->get_to(value);
    } catch (const json::exception&) {
      throw ConfigError(std::string("config field '") + name + "' has the wrong type");
    }
  });
  if (known != j.size()) {
    std::string unknown;
    for (const auto& [key, _] : j.items()) {
      bool found = false;
      for_each_field(c, [&](const char* name, const auto&) { found = found || key == name; });
      if (!found) unknown += (unknown.empty() ? "" : ", ") + key;
    }
    throw ConfigError("unknown config field(s): " + unknown);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

}  // namespace hpa
