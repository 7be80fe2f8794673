#pragma once

// Measurement-side functionals: fidelity from joint click probabilities,
// coherence extraction from a displacement phase scan, the separable bound,
// subspace density reconstruction and combined separability confidence.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hpa/optics.hpp"

namespace hpa {

struct PhasePoint {
  double relative_phase = 0.0;  // phase_alice - phase_bob
  JointClickTable table{};

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

struct ProbabilitySet {
  JointClickTable at_zero{};
  std::vector<PhasePoint> phase_scan;
  double p2a = 0.0;
  double p2b = 0.0;  // P_2d when the amplifier is active

  friend bool operator==(const ProbabilitySet&, const ProbabilitySet&) = default;
};

/// Parameters of the displacement model the phase scan is inverted against.
struct CoherenceModel {
  double amplitude = 0.7;
  double overlap = 1.0;
  double dark_alice = 0.0;
  double dark_bob = 0.0;
  /// RMS residual of the first-harmonic fit above which the fit is flagged.
  double residual_threshold = 0.02;
};

struct CoherenceFit {
  double d = 0.0;               // |<01|rho|10>| of the detected-referred state
  double phase = 0.0;           // argument of the fitted oscillation
  double parity_offset = 0.0;   // phase-independent part of the parity signal
  double residual_rms = 0.0;
  bool poor_visibility = false;
};

/// Fits the parity signal P00 - P0C - PC0 + PCC to c0 + c1 cos(x) + c2 sin(x)
/// over the relative phase x. For a vacuum + single-photon state measured with
/// detector-referred amplitude alpha and overlap M, the oscillation amplitude
/// is 8 M alpha^2 exp(-2 alpha^2) |d| (times dark-count survival factors).
/// Throws InvalidArgument for fewer than four distinct phases or a singular
/// design.
CoherenceFit extract_coherence(const ProbabilitySet& ps, const CoherenceModel& model);

/// |d| + (P0C + PC0) / 2 at zero displacement. Throws InconsistentInputs when
/// the result exceeds one.
double fidelity_from_probs(const ProbabilitySet& ps, double d);

/// (PC0 + P2a)/2 + (P0C + P2b)/2 + sqrt(P00 (PCC + P2a + P2b)) at zero
/// displacement.
double separable_bound(const ProbabilitySet& ps);

struct FidelityReport {
  double f = 0.0;
  double f_sep = 0.0;
  double d = 0.0;
  double sigma_f = 0.0;
  double sigma_fsep = 0.0;
  double sigma_d = 0.0;
  double margin = 0.0;  // (f - f_sep) / f_sep
  double sigma_margin = 0.0;
  bool poor_visibility = false;

  friend bool operator==(const FidelityReport&, const FidelityReport&) = default;
};

/// Report with central values only (sigmas zero).
FidelityReport make_report(const ProbabilitySet& ps, const CoherenceModel& model);

struct DensityReconstruction {
  /// Over {|00>, |01>, |10>}; |01> means Alice empty, Bob one photon.
  Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();
  double residual = 0.0;  // weight outside the subspace
  double min_eigenvalue = 0.0;
  bool unphysical = false;
};

inline constexpr double kUnphysicalEigenvalue = -0.02;

/// Populations from the zero-displacement table, coherence d. Populations
/// (and d) are divided by the per-arm detection efficiencies; when the
/// corrected populations exceed unit trace they are scaled back to it.
DensityReconstruction reconstruct_density(const ProbabilitySet& ps, double d, double efficiency_alice = 1.0,
                                          double efficiency_bob = 1.0);

struct MarginMeasurement {
  double margin = 0.0;
  double sigma = 0.0;
};

/// Product over measurements of P(margin <= 0) for independent Gaussians.
double separability_confidence(std::span<const MarginMeasurement> margins);

/// Heralded g2(0) of the (1 - p2)|1> + p2|2> source: 2 p2 / (1 + p2)^2.
double g2_from_source(const SourceModel& src);

}  // namespace hpa
