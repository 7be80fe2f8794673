#pragma once

// Parameter sweeps with finite-difference uncertainty bands, and the (tau, t)
// optimizer for the fidelity / herald-rate trade-off.

#include <string>
#include <vector>

#include "hpa/scenario.hpp"

namespace hpa {

/// Config fields accepted by sweep().
std::vector<std::string> sweepable_parameters();

/// Sets a named field. Throws InvalidArgument listing the valid names.
void set_parameter(ExperimentConfig& config, const std::string& name, double value);

struct SweepOptions {
  bool with_hpa = true;
  EvaluationMode mode = EvaluationMode::exact;
  /// Propagate config sigma_tau, sigma_t, sigma_eta_d and sigma_overlap
  /// into a band on F.
  bool bands = true;
};

struct SweepPoint {
  double value = 0.0;
  ScenarioResult result;
  double f = 0.0;       // headline fidelity
  double f_band = 0.0;  // one-sigma parameter band
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepPoint> points;
};

/// One result per value, in input order. Points are evaluated on
/// config.threads workers; outputs do not depend on the thread count.
SweepResult sweep(const ExperimentConfig& base, const std::string& parameter, const std::vector<double>& values,
                  const SweepOptions& options = {});

/// Quadrature sum of |dF/dx| sigma_x over tau, t, the Alice/Bob detector
/// efficiency and both overlaps, using central differences.
double fidelity_band(const ExperimentConfig& config, bool with_hpa);

/// "parameter,f,f_lo,f_hi,f_sep,herald_rate" rows.
std::string sweep_csv(const SweepResult& result);

struct OptimizeOptions {
  int tau_points = 100;
  int t_points = 100;
  double t_max = 0.999;
};

struct OptimizeResult {
  double tau = 0.0;
  double t = 0.0;
  double f_f = 0.0;
  double herald_rate = 0.0;  // Hz
};

/// Maximizes the closed-form F_f over (tau, t) subject to
/// herald_rate_model >= min_rate, by grid search followed by a bounded
/// compass refinement. Throws InfeasibleConstraint carrying the largest
/// achievable rate when no grid point satisfies the constraint.
OptimizeResult optimize(double eta_L, double min_rate, const ExperimentConfig& base,
                        const OptimizeOptions& options = {});

}  // namespace hpa
