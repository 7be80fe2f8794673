#pragma once

// End-to-end scenario: source, path entanglement, lossy link, optional HPA,
// arm coupling, displacement-based detection and the fidelity estimators,
// evaluated either exactly or from sampled event counts.

#include <optional>
#include <string>
#include <vector>

#include "hpa/config.hpp"
#include "hpa/estimators.hpp"
#include "hpa/montecarlo.hpp"

namespace hpa {

enum class EvaluationMode { exact, sampled };

/// The shared two-mode state reaching Alice's and Bob's stations (after the
/// arm couplings, before the detectors).
struct PreparedState {
  DensityOperator state;
  double p_herald = 1.0;  // 1 without the amplifier
};

/// Throws DegenerateHeralding when the herald probability is below 1e-12.
PreparedState prepare_state(const ExperimentConfig& config, bool with_hpa);

/// Exact detection statistics of a prepared state under the config's
/// detectors, displacement amplitude and phase scan.
ProbabilitySet measure_probabilities(const DensityOperator& state, const ExperimentConfig& config);

CoherenceModel coherence_model(const ExperimentConfig& config);

struct StageResult {
  ProbabilitySet probabilities;
  FidelityReport report;

  friend bool operator==(const StageResult&, const StageResult&) = default;
};

struct ScenarioResult {
  ExperimentConfig config;
  bool with_hpa = false;
  EvaluationMode mode = EvaluationMode::exact;
  StageResult initial;
  std::optional<StageResult> amplified;
  double p_herald = 1.0;
  double herald_rate = 0.0;              // Hz, single BSM detector
  std::optional<double> distance_km;     // empty for eta_L = 0
  std::vector<std::string> warnings;

  /// The amplified stage when present, the initial one otherwise.
  const StageResult& headline() const { return amplified ? *amplified : initial; }

  friend bool operator==(const ScenarioResult&, const ScenarioResult&) = default;
};

/// The initial state is always evaluated; the amplified stage only with
/// `with_hpa`. Sampled mode draws events_zero counts at alpha = 0 and
/// events_scan counts split evenly over the phase scan, then bootstraps.
ScenarioResult run_scenario(const ExperimentConfig& config, bool with_hpa, EvaluationMode mode);

/// Exact re-evaluation with unit detection efficiency for Alice and Bob, all
/// other parameters unchanged.
FidelityReport rescale_unit_efficiency(const ExperimentConfig& config, bool with_hpa);

std::string to_json(const ScenarioResult& result);
ScenarioResult scenario_from_json(const std::string& text);

}  // namespace hpa
