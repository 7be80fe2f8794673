#include "hpa/optics.hpp"

#include <cmath>
#include <string>

namespace hpa {

namespace {

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument(std::string(what) + " must lie in [0, 1], got " + std::to_string(x));
}

const ModeLabel& only_mode(const DensityOperator& s, const char* what) {
  if (s.num_modes() != 1) throw InvalidArgument(std::string(what) + " must be a single-mode state");
  return s.modes().front();
}

}  // namespace

void SourceModel::validate() const {
  if (!(double_pair_probability >= 0.0 && double_pair_probability <= 0.1)) {
    throw InvalidArgument("double_pair_probability must lie in [0, 0.1], got " + std::to_string(double_pair_probability));
  }
  check_unit(herald_efficiency, "herald_efficiency");
  if (heralded_rate < 0.0) throw InvalidArgument("heralded_rate must be non-negative");
}

void HpaSettings::validate() const {
  check_unit(t, "t");
  check_unit(bsm_overlap, "bsm_overlap");
  bsm_detector.validate();
}

void DisplacementSetting::validate() const {
  if (!(amplitude >= 0.0)) throw InvalidArgument("displacement amplitude must be >= 0");
  check_unit(overlap, "displacement overlap");
}

DensityOperator heralded_photon(const SourceModel& src, int cutoff, const ModeLabel& mode) {
  src.validate();
  if (src.double_pair_probability > 0.0 && cutoff < 2) {
    throw InvalidArgument("a double-pair component needs cutoff >= 2");
  }
  const int l = cutoff + 1;
  Matrix m = Matrix::Zero(l, l);
  m(1, 1) = 1.0 - src.double_pair_probability;
  if (src.double_pair_probability > 0.0) m(2, 2) = src.double_pair_probability;
  DensityOperator photon({mode}, cutoff, std::move(m));
  if (src.herald_efficiency < 1.0) photon = apply_loss(photon, mode, src.herald_efficiency);
  return photon;
}

DensityOperator prepare_path_entangled(const DensityOperator& photon, double tau) {
  check_unit(tau, "tau");
  const ModeLabel& in = only_mode(photon, "input photon");
  DensityOperator a = in == kModeA ? photon : relabel(photon, in, kModeA);
  const DensityOperator ab = tensor(a, make_vacuum({kModeB}, photon.cutoff()));
  return apply_beamsplitter(ab, kModeA, kModeB, tau);
}

DensityOperator transmit(const DensityOperator& state, double eta_L) { return apply_loss(state, kModeB, eta_L); }

HeraldedState apply_hpa(const DensityOperator& state_ab, const DensityOperator& aux, const HpaSettings& settings) {
  settings.validate();
  if (state_ab.modes() != std::vector<ModeLabel>{kModeA, kModeB}) {
    throw InvalidArgument("apply_hpa expects a state over modes (a, b)");
  }
  const ModeLabel& aux_mode = only_mode(aux, "auxiliary photon");
  if (aux.cutoff() != state_ab.cutoff()) throw InvalidArgument("auxiliary photon cutoff differs from the signal cutoff");
  const int cutoff = state_ab.cutoff();

  // auxiliary photon: transmission t towards d, reflection 1 - t into c
  const DensityOperator d = aux_mode == kModeD ? aux : relabel(aux, aux_mode, kModeD);
  const DensityOperator cd = apply_beamsplitter(tensor(make_vacuum({kModeC}, cutoff), d), kModeD, kModeC, settings.t);
  const DensityOperator abcd = tensor(state_ab, cd);

  const DetectorModel& det = settings.bsm_detector;
  const bool plus = settings.detector == HeraldDetector::plus;
  // after the balanced beamsplitter the c port heralds the positive-sign state
  const ModeLabel& clicking = plus ? kModeC : kModeB;
  const ModeLabel& silent = plus ? kModeB : kModeC;

  double p_matched = 0.0;
  Matrix rho_matched = Matrix::Zero(static_cast<Eigen::Index>(cutoff + 1) * (cutoff + 1),
                                    static_cast<Eigen::Index>(cutoff + 1) * (cutoff + 1));
  if (settings.bsm_overlap > 0.0) {
    const DensityOperator mixed = apply_beamsplitter(abcd, kModeB, kModeC, 0.5);
    const BinaryMeasurement first = measure_binary(mixed, clicking, det);
    if (first.click.state) {
      const BinaryMeasurement second = measure_binary(*first.click.state, silent, det);
      p_matched = first.p_click * second.p_noclick;
      if (second.noclick.state) rho_matched = p_matched * second.noclick.state->matrix();
    }
  }

  double p_dist = 0.0;
  Matrix rho_dist = Matrix::Zero(rho_matched.rows(), rho_matched.cols());
  if (settings.bsm_overlap < 1.0) {
    // distinguishable photons split independently; only the total count matters
    const int l = cutoff + 1;
    std::vector<double> weights(static_cast<std::size_t>(l * l));
    for (int nb = 0; nb < l; ++nb) {
      for (int nc = 0; nc < l; ++nc) {
        const int n = nb + nc;
        const double q = 1.0 - det.dark_click_probability;
        const double other_silent = q * std::pow(1.0 - det.efficiency / 2.0, n);
        const double both_silent = q * q * std::pow(1.0 - det.efficiency, n);
        weights[static_cast<std::size_t>(nb * l + nc)] = other_silent - both_silent;
      }
    }
    const ModeLabel bc[] = {kModeB, kModeC};
    const ConditionalState cond = measure_diagonal_effect(abcd, bc, weights);
    p_dist = cond.probability;
    if (cond.state) rho_dist = p_dist * cond.state->matrix();
  }

  const double m = settings.bsm_overlap;
  const double p_herald = m * p_matched + (1.0 - m) * p_dist;
  if (p_herald < kEmptyBranchThreshold) {
    throw EmptyBranch("heralding probability " + std::to_string(p_herald) + " is below the empty-branch threshold");
  }
  Matrix rho = (m * rho_matched + (1.0 - m) * rho_dist) / p_herald;
  return {DensityOperator({kModeA, kModeD}, cutoff, 0.5 * (rho + rho.adjoint())), p_herald};
}

DensityOperator apply_arm_losses(const DensityOperator& state, double eta_alice, double eta_bob) {
  if (state.num_modes() != 2) throw InvalidArgument("arm losses expect a two-mode state");
  DensityOperator s = apply_loss(state, state.modes()[0], eta_alice);
  return apply_loss(s, state.modes()[1], eta_bob);
}

int displacement_working_cutoff(int cutoff, double amplitude) {
  if (amplitude <= 0.0) return cutoff;
  return cutoff + 10 + static_cast<int>(std::ceil(6.0 * amplitude * amplitude));
}

JointClickTable displacement_measurement(const DensityOperator& state, const DisplacementSetting& setting,
                                         const DetectorModel& det_alice, const DetectorModel& det_bob) {
  setting.validate();
  det_alice.validate();
  det_bob.validate();
  if (state.num_modes() != 2) throw InvalidArgument("displacement measurement expects a two-mode state");
  const ModeLabel alice = state.modes()[0];
  const ModeLabel bob = state.modes()[1];

  DensityOperator s = apply_arm_losses(state, det_alice.efficiency, det_bob.efficiency);
  const double alpha = setting.amplitude;
  const double m = setting.overlap;
  if (alpha > 0.0) {
    s = with_cutoff(s, displacement_working_cutoff(state.cutoff(), alpha));
    const double matched = std::sqrt(m) * alpha;
    s = apply_displacement(s, alice, std::polar(matched, setting.phase_alice));
    s = apply_displacement(s, bob, std::polar(matched, setting.phase_bob));
  }
  const double background = std::exp(-(1.0 - m) * alpha * alpha);
  const DetectorModel ideal_a{1.0, 1.0 - (1.0 - det_alice.dark_click_probability) * background};
  const DetectorModel ideal_b{1.0, 1.0 - (1.0 - det_bob.dark_click_probability) * background};

  const BinaryMeasurement ma = measure_binary(s, alice, ideal_a);
  JointClickTable table;
  table.setting = setting;
  auto split = [&](const ConditionalState& branch, double p_branch, double& p_no, double& p_yes) {
    if (!branch.state) {
      p_no = p_yes = 0.0;
      return;
    }
    const BinaryMeasurement mb = measure_binary(*branch.state, bob, ideal_b);
    p_no = p_branch * mb.p_noclick;
    p_yes = p_branch * mb.p_click;
  };
  split(ma.noclick, ma.p_noclick, table.p00, table.p0c);
  split(ma.click, ma.p_click, table.pc0, table.pcc);
  const double total = table.sum();
  table.p00 /= total;
  table.p0c /= total;
  table.pc0 /= total;
  table.pcc /= total;
  return table;
}

double two_photon_probability(const DensityOperator& state, const ModeLabel& mode, double efficiency) {
  const ModeLabel keep[] = {mode};
  DensityOperator reduced = partial_trace(state, keep);
  reduced = apply_loss(reduced, mode, efficiency);
  const auto dist = reduced.photon_distribution(mode);
  double p = 0.0;
  for (std::size_t n = 2; n < dist.size(); ++n) p += dist[n];
  return p;
}

}  // namespace hpa
