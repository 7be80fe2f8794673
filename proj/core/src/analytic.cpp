#include "hpa/analytic.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hpa {

namespace {

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

void ProtocolParams::validate() const {
  check_unit(tau, "tau");
  check_unit(t, "t");
  check_unit(eta_L, "eta_L");
}

Eigen::Matrix3cd AnalyticState::density() const {
  const double w = 1.0 - vacuum_weight;
  const double c = coherence();
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(0, 0) = vacuum_weight;
  m(1, 1) = w * amp01 * amp01;
  m(2, 2) = w * amp10 * amp10;
  m(1, 2) = c;
  m(2, 1) = c;
  return m;
}

double AnalyticState::coherence() const {
  const double sign = phase_flipped ? -1.0 : 1.0;
  return sign * (1.0 - vacuum_weight) * amp10 * amp01;
}

DensityOperator to_density_operator(const AnalyticState& s, const ModeLabel& first, const ModeLabel& second,
                                    int cutoff) {
  const int l = cutoff + 1;
  const Eigen::Index i00 = 0;
  const Eigen::Index i01 = 1;
  const Eigen::Index i10 = l;
  const Eigen::Index idx[3] = {i00, i01, i10};
  const Eigen::Matrix3cd small = s.density();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(l) * l, static_cast<Eigen::Index>(l) * l);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(idx[r], idx[c]) = small(r, c);
  return DensityOperator({first, second}, cutoff, std::move(m));
}

AnalyticState initial_state_closed_form(const ProtocolParams& p) {
  p.validate();
  AnalyticState s;
  s.label = StateLabel::initial;
  s.vacuum_weight = (1.0 - p.eta_L) * (1.0 - p.tau);
  const double weight = p.tau + p.eta_L * (1.0 - p.tau);
  if (weight <= 0.0) {
    s.vacuum_weight = 1.0;
    s.amp10 = 1.0;
    s.amp01 = 0.0;
    return s;
  }
  s.amp10 = std::sqrt(p.tau / weight);
  s.amp01 = std::sqrt(p.eta_L * (1.0 - p.tau) / weight);
  return s;
}

HeraldedClosedForm final_state_closed_form(const ProtocolParams& p) {
  p.validate();
  HeraldedClosedForm out;
  out.lambda = (1.0 - p.tau) * (1.0 - p.t);
  out.norm = (1.0 - p.tau) * p.eta_L * p.t + (1.0 - p.t);
  if (!(out.norm > 0.0)) {
    throw DegenerateHeralding("heralding normalisation N vanishes (tau = " + std::to_string(p.tau) +
                              ", t = " + std::to_string(p.t) + ", eta_L = " + std::to_string(p.eta_L) + ")");
  }
  out.p_bsm = out.norm / 2.0;
  AnalyticState& s = out.state;
  s.label = StateLabel::final;
  s.vacuum_weight = out.lambda / out.norm;
  const double w10 = p.tau * (1.0 - p.t);
  const double w01 = p.t * p.eta_L * (1.0 - p.tau);
  const double weight = w10 + w01;
  if (weight <= 0.0) {
    s.amp10 = 1.0;
    s.amp01 = 0.0;
    s.vacuum_weight = 1.0;
    return out;
  }
  s.amp10 = std::sqrt(w10 / weight);
  s.amp01 = std::sqrt(w01 / weight);
  return out;
}

double optimal_tau(double eta_L, double t) {
  check_unit(eta_L, "eta_L");
  check_unit(t, "t");
  return eta_L * t / (1.0 + eta_L * (1.0 - t));
}

double balanced_tau(double eta_L, double t) {
  check_unit(eta_L, "eta_L");
  check_unit(t, "t");
  const double denom = 1.0 - t + eta_L * t;
  if (!(denom > 0.0)) throw InvalidArgument("no balancing splitting ratio for t = 1 and eta_L = 0");
  return eta_L * t / denom;
}

double fidelity_closed_form(const AnalyticState& s) {
  const double sign = s.phase_flipped ? -1.0 : 1.0;
  const double overlap = s.amp10 + sign * s.amp01;
  return (1.0 - s.vacuum_weight) * overlap * overlap / 2.0;
}

double distance_from_transmission(double eta_L, double attenuation_db_per_km) {
  if (!(eta_L > 0.0)) throw InfiniteDistance("zero transmission corresponds to infinite distance");
  if (eta_L > 1.0) throw InvalidArgument("eta_L must lie in (0, 1]");
  if (!(attenuation_db_per_km > 0.0)) throw InvalidArgument("attenuation must be positive");
  return 10.0 * std::log10(1.0 / eta_L) / attenuation_db_per_km;
}

double bsm_success_probability(const ProtocolParams& p, double click_efficiency) {
  p.validate();
  check_unit(click_efficiency, "BSM click efficiency");
  const double eta = click_efficiency;
  // one photon reaching the BSM: clicks the chosen detector with eta / 2
  const double single = p.tau * (1.0 - p.t) + p.eta_L * (1.0 - p.tau) * p.t +
                        (1.0 - p.eta_L) * (1.0 - p.tau) * (1.0 - p.t);
  // two indistinguishable photons bunch; half the time on the chosen detector
  const double pair = p.eta_L * (1.0 - p.tau) * (1.0 - p.t);
  return single * eta / 2.0 + pair * (1.0 - (1.0 - eta) * (1.0 - eta)) / 2.0;
}

double herald_rate_model(double pair_rate, const ProtocolParams& p, double bsm_efficiency, double bsm_coupling) {
  if (pair_rate < 0.0) throw InvalidArgument("pair rate must be non-negative");
  return pair_rate * bsm_success_probability(p, bsm_efficiency * bsm_coupling);
}

}  // namespace hpa
