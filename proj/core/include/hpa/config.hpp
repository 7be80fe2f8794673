#pragma once

// Scenario configuration: every protocol and imperfection parameter of a run,
// with a canonical JSON serialization.

#include <cstdint>
#include <string>
#include <vector>

namespace hpa {

/// N equally spaced phases on [0, 2 pi).
std::vector<double> equally_spaced_phases(int n);

struct ExperimentConfig {
  double tau = 0.6;
  double t = 0.93;
  double eta_L = 0.09;
  double alpha = 0.7;
  /// Relative displacement phases of the coherence scan (Alice's phase, with
  /// Bob at zero).
  std::vector<double> phases = equally_spaced_phases(8);

  double detector_efficiency_alice = 0.25;
  double detector_efficiency_bob = 0.25;
  double detector_efficiency_bsm = 0.25;
  double dark_click_alice = 0.0;
  double dark_click_bob = 0.0;
  double dark_click_bsm = 0.0;
  /// Transmission between the state and each measurement station.
  double coupling_alice = 1.0;
  double coupling_bob = 1.0;
  /// Transmission from Bob's link output to the BSM detectors.
  double bsm_coupling = 1.0;
  double overlap_displacement = 0.90;
  double overlap_bsm = 0.90;
  double double_pair_probability = 0.0;

  int cutoff = 4;
  std::uint64_t events_scan = 2600;  // total over the phase scan
  std::uint64_t events_zero = 38000;
  std::uint64_t seed = 1;
  std::uint64_t bootstrap_resamples = 1000;
  unsigned threads = 1;
  /// Standard deviation of a per-run Gaussian drift of |alpha| in sampled mode.
  double amplitude_jitter = 0.0;

  /// Coincident path-entangled state and auxiliary photon rate (Hz).
  double pair_rate = 30.0;

  /// Parameter uncertainties for the finite-difference bands.
  double sigma_tau = 0.02;
  double sigma_t = 0.02;
  double sigma_eta_d = 0.02;
  double sigma_overlap = 0.02;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parameters obtained by calibrating against the measured tables at the
/// published operating point.
struct DefaultCalibration {
  double coupling_alice;
  double coupling_bob;
  double double_pair_probability;
  double bsm_coupling;
};

inline constexpr DefaultCalibration kDefaultCalibration{0.5571843478, 0.4557442, 0.05834131082, 0.3713125426};

/// Published operating point with the bundled calibration.
ExperimentConfig default_config();

std::string to_json(const ExperimentConfig& config);
/// Missing keys keep the values of default_config(); unknown keys and type errors throw
/// ConfigError.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace hpa
