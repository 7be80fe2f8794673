#pragma once

// Physical building blocks assembled from fock-core primitives: heralded
// single-photon sources, path-entanglement preparation, the lossy link, the
// heralded photon amplifier (HPA) and displacement-based joint detection.

#include "hpa/fock.hpp"

namespace hpa {

inline const ModeLabel kModeA{"a"};
inline const ModeLabel kModeB{"b"};
inline const ModeLabel kModeC{"c"};
inline const ModeLabel kModeD{"d"};

struct SourceModel {
  /// Weight of the |2> component in the heralded output.
  double double_pair_probability = 0.0;
  /// Transmission applied to the heralded photon as loss.
  double herald_efficiency = 1.0;
  /// Heralded photons per second.
  double heralded_rate = 50e3;

  void validate() const;
};

/// Which of the two BSM output ports must click alone. `plus` heralds the
/// state with a positive relative sign, `minus` its phase-flipped partner.
enum class HeraldDetector { plus, minus };

struct HpaSettings {
  double t = 0.93;
  DetectorModel bsm_detector{};
  /// Mode overlap between Bob's signal and the auxiliary photon at the BSM.
  double bsm_overlap = 1.0;
  HeraldDetector detector = HeraldDetector::plus;

  void validate() const;
};

/// Displacement amplitudes are referred to the detector: a coherent state of
/// amplitude alpha alone gives a no-click probability exp(-|alpha|^2).
struct DisplacementSetting {
  double amplitude = 0.0;
  double phase_alice = 0.0;
  double phase_bob = 0.0;
  /// Mode overlap between the coherent state and the signal.
  double overlap = 1.0;

  double relative_phase() const { return phase_alice - phase_bob; }
  void validate() const;

  friend bool operator==(const DisplacementSetting&, const DisplacementSetting&) = default;
};

/// Joint click statistics: first index Alice, second Bob; 0 = no click.
struct JointClickTable {
  double p00 = 1.0;
  double p0c = 0.0;
  double pc0 = 0.0;
  double pcc = 0.0;
  DisplacementSetting setting{};

  double sum() const { return p00 + p0c + pc0 + pcc; }

  friend bool operator==(const JointClickTable&, const JointClickTable&) = default;
};

DensityOperator heralded_photon(const SourceModel& src, int cutoff, const ModeLabel& mode = kModeA);

/// Splits a single-mode photon into modes (a, b) with ratio tau : 1 - tau.
DensityOperator prepare_path_entangled(const DensityOperator& photon, double tau);

/// Link loss on mode b.
DensityOperator transmit(const DensityOperator& state, double eta_L);

struct HeraldedState {
  DensityOperator state;  // modes (a, d)
  double p_herald = 0.0;
};

/// Auxiliary photon split t : 1 - t into (d, c), modes b and c interfered on a
/// balanced beamsplitter, exactly one BSM detector clicks. Partial overlap is
/// an incoherent mixture of an interfering and a distinguishable auxiliary
/// photon. Throws EmptyBranch when the herald probability is below 1e-15.
HeraldedState apply_hpa(const DensityOperator& state_ab, const DensityOperator& aux, const HpaSettings& settings);

/// Coupling (transmission) losses on both arms of a two-mode state.
DensityOperator apply_arm_losses(const DensityOperator& state, double eta_alice, double eta_bob);

/// Joint click table for a two-mode state (first mode Alice, second Bob).
/// The detector efficiency acts as loss ahead of the displacement; the
/// orthogonal part of the coherent state contributes an independent
/// no-click factor exp(-(1 - overlap) |alpha|^2).
JointClickTable displacement_measurement(const DensityOperator& state, const DisplacementSetting& setting,
                                         const DetectorModel& det_alice, const DetectorModel& det_bob);

/// Probability of two or more photons on `mode` after a detector of the given
/// efficiency (the detected-referred two-photon probability).
double two_photon_probability(const DensityOperator& state, const ModeLabel& mode, double efficiency);

/// Working cutoff used to represent displaced states without truncation loss.
int displacement_working_cutoff(int cutoff, double amplitude);

}  // namespace hpa
