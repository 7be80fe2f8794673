#pragma once

// Least-squares calibration of the unmeasured lab parameters (arm couplings,
// double-pair probability, BSM coupling) against measured click statistics.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpa/config.hpp"
#include "hpa/optics.hpp"

namespace hpa {

struct CalibrationTarget {
  /// Measured alpha = 0 table without the amplifier; the fit uses this row.
  JointClickTable no_hpa_zero;
  /// Measured alpha = 0 table with the amplifier; predicted, never fitted.
  std::optional<JointClickTable> hpa_zero;
};

struct CalibrationResult {
  ExperimentConfig config;  // base config with the fitted values substituted
  double coupling_alice = 0.0;
  double coupling_bob = 0.0;
  double double_pair_probability = 0.0;
  /// Sum of squared relative residuals at the optimum.
  double residual = 0.0;
  int evaluations = 0;
  JointClickTable fitted_no_hpa;
  std::optional<JointClickTable> predicted_hpa;
};

class CalibrationFailure : public std::runtime_error {
 public:
  CalibrationFailure(const std::string& what, CalibrationResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const CalibrationResult& best() const { return best_; }

 private:
  CalibrationResult best_;
};

struct CalibrationOptions {
  int max_evaluations = 400;
};

/// Alpha = 0 click table of the simulated pipeline.
JointClickTable simulate_zero_table(const ExperimentConfig& config, bool with_hpa);

/// Fits coupling_alice, coupling_bob and double_pair_probability to the
/// no-HPA row by minimizing squared relative residuals over the four
/// entries. Throws CalibrationFailure carrying the best point when the
/// optimizer does not converge within the evaluation budget.
CalibrationResult calibrate(const ExperimentConfig& base, const CalibrationTarget& target,
                            const CalibrationOptions& options = {});

struct RateMeasurement {
  double eta_L = 0.0;
  double rate = 0.0;  // Hz
};

struct BsmCouplingFit {
  double bsm_coupling = 0.0;
  double residual = 0.0;  // sum of squared relative residuals
  std::vector<double> model_rates;
};

/// Fits bsm_coupling so that herald_rate_model reproduces the measured rates
/// at the base config's tau, t, pair rate and BSM detector efficiency.
BsmCouplingFit fit_bsm_coupling(const ExperimentConfig& base, const std::vector<RateMeasurement>& rates,
                                const CalibrationOptions& options = {});

}  // namespace hpa
