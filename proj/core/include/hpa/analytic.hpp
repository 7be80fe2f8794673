#pragma once

// Closed-form model of the lossy path-entangled state and of the heralded
// state after amplification. Used as the exact oracle for the Fock simulator
// and as the fast kernel for the (tau, t) optimizer.

#include <Eigen/Dense>

#include "hpa/fock.hpp"

namespace hpa {

struct ProtocolParams {
  double tau = 0.6;    // Alice's splitting ratio into mode a
  double t = 0.93;     // auxiliary photon transmission towards Bob's output
  double eta_L = 0.09; // link transmission

  void validate() const;
};

enum class StateLabel { initial, final };

/// lambda |00><00| + (1 - lambda) |psi><psi| with
/// |psi> = amp10 |10> + sign * amp01 |01>.
struct AnalyticState {
  double vacuum_weight = 0.0;
  double amp10 = 1.0;
  double amp01 = 0.0;
  StateLabel label = StateLabel::initial;
  /// The other BSM detector heralds the state with a minus sign on amp01.
  bool phase_flipped = false;

  /// 3x3 matrix over {|00>, |01>, |10>}.
  Eigen::Matrix3cd density() const;
  double coherence() const;  // <01|rho|10>, real
};

/// Embed the closed form into a two-mode Fock space at the given cutoff.
DensityOperator to_density_operator(const AnalyticState& s, const ModeLabel& first, const ModeLabel& second,
                                    int cutoff);

AnalyticState initial_state_closed_form(const ProtocolParams& p);

struct HeraldedClosedForm {
  AnalyticState state;
  double p_bsm = 0.0;   // N / 2, per BSM detector
  double lambda = 0.0;  // (1 - tau)(1 - t)
  double norm = 0.0;    // N = (1 - tau) eta_L t + (1 - t)
};

/// Throws DegenerateHeralding when N = 0.
HeraldedClosedForm final_state_closed_form(const ProtocolParams& p);

/// The splitting ratio eta_L t / (1 + eta_L (1 - t)) quoted for the F_f -> 1
/// limit. It does not balance the heralded amplitudes of the closed form;
/// balanced_tau does.
double optimal_tau(double eta_L, double t);
/// Splitting ratio with tau (1 - t) = t eta_L (1 - tau), i.e. amp10 = amp01:
/// eta_L t / (1 - t + eta_L t). Throws InvalidArgument when both terms vanish.
double balanced_tau(double eta_L, double t);

/// <psi+|rho|psi+> with psi+ the maximally entangled single-photon state.
double fidelity_closed_form(const AnalyticState& s);

/// Equivalent fibre length in km. Throws InfiniteDistance for eta_L = 0.
double distance_from_transmission(double eta_L, double attenuation_db_per_km = 0.2);

/// Probability that one given BSM detector clicks alone, for ideal single
/// photons and binary BSM detectors of overall efficiency `click_efficiency`.
/// Equals N / 2 for unit efficiency.
double bsm_success_probability(const ProtocolParams& p, double click_efficiency);

/// pair_rate * bsm_success_probability(p, bsm_efficiency * bsm_coupling).
double herald_rate_model(double pair_rate, const ProtocolParams& p, double bsm_efficiency, double bsm_coupling);

}  // namespace hpa
