#pragma once

// Read-only published values (click tables, separability margins, herald
// rates) that the reproduction recipes compare against.

#include <cstdint>
#include <string>
#include <vector>

#include "hpa/calibration.hpp"
#include "hpa/estimators.hpp"

namespace hpa {

struct Measured {
  double value = 0.0;
  double sigma = 0.0;
};

struct ReferenceRow {
  bool amplifier = false;
  double alpha = 0.0;
  Measured p00, p0c, pc0, pcc;

  JointClickTable table() const;
};

struct ReferenceMargin {
  double eta_L = 0.0;
  Measured margin;
};

struct ReferenceData {
  double tau = 0.0;
  double t = 0.0;
  double alpha = 0.0;
  double detector_efficiency = 0.0;

  double table_eta_L = 0.0;
  std::vector<ReferenceRow> rows;
  double two_photon_upper_bound = 0.0;
  Measured coherence_d;
  std::vector<ReferenceMargin> margins;
  std::vector<double> margin_significance;
  double combined_separable_probability = 0.0;
  double pair_rate = 0.0;
  std::vector<RateMeasurement> rates;
  std::vector<double> rounded_distances_km;
  Measured overlap;
  std::uint64_t events_scan = 0;
  std::uint64_t events_zero = 0;

  /// Throws InvalidArgument when the row is absent.
  const ReferenceRow& row(bool amplifier, bool displaced) const;
  /// No-amplifier alpha = 0 row to fit, amplified alpha = 0 row to predict.
  CalibrationTarget calibration_target() const;
};

/// $HPA_DATA_DIR when set, otherwise the data directory of the source tree.
std::string default_data_dir();

/// Throws ConfigError for a missing or malformed file.
ReferenceData load_reference(const std::string& path = default_data_dir() + "/reference_values.json");

}  // namespace hpa
