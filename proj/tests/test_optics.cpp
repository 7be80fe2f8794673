#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hpa/analytic.hpp"
#include "hpa/optics.hpp"
#include "support.hpp"

using namespace hpa;
using hpa::testing::Gen;
using hpa::testing::max_abs_diff;

namespace {

const int k00[] = {0, 0};
const int k01[] = {0, 1};
const int k10[] = {1, 0};
const int k11[] = {1, 1};

DensityOperator ideal_link_state(double tau, double eta, int cutoff) {
  return transmit(prepare_path_entangled(heralded_photon({}, cutoff), tau), eta);
}

HeraldedState ideal_hpa(double tau, double t, double eta, int cutoff, HeraldDetector det = HeraldDetector::plus) {
  HpaSettings s;
  s.t = t;
  s.detector = det;
  return apply_hpa(ideal_link_state(tau, eta, cutoff), heralded_photon({}, cutoff, kModeD), s);
}

JointClickTable measure(const DensityOperator& rho, double amplitude, double phase, double overlap = 1.0,
                        double eff = 1.0) {
  DisplacementSetting s;
  s.amplitude = amplitude;
  s.phase_alice = phase;
  s.overlap = overlap;
  return displacement_measurement(rho, s, {eff, 0.0}, {eff, 0.0});
}

}  // namespace

TEST(Source, IdealPhoton) {
  const DensityOperator p = heralded_photon({}, 3);
  const int one[] = {1};
  EXPECT_DOUBLE_EQ(p.population(one), 1.0);
  EXPECT_NEAR(p.trace(), 1.0, 1e-15);
}

TEST(Source, DoublePairMean) {
  SourceModel src;
  src.double_pair_probability = 0.001;
  EXPECT_NEAR(heralded_photon(src, 3).mean_photon_number(kModeA), 1.001, 1e-14);
  EXPECT_THROW(heralded_photon(src, 1), InvalidArgument);
}

TEST(Source, HeraldEfficiencyIsLoss) {
  SourceModel src;
  src.herald_efficiency = 0.8;
  const int zero[] = {0};
  EXPECT_NEAR(heralded_photon(src, 3).population(zero), 0.2, 1e-14);
}

TEST(PathEntangled, Balanced) {
  const DensityOperator rho = prepare_path_entangled(heralded_photon({}, 2), 0.5);
  Vector psi = (fock_ket(2, 2, k10) + fock_ket(2, 2, k01)) / std::sqrt(2.0);
  EXPECT_NEAR(fidelity_with_pure(rho, psi), 1.0, 1e-12);
}

TEST(PathEntangled, FullyToAlice) {
  const DensityOperator rho = prepare_path_entangled(heralded_photon({}, 2), 1.0);
  EXPECT_NEAR(rho.population(k10), 1.0, 1e-14);
  EXPECT_NEAR(rho.element(k10, k10).real(), 1.0, 1e-14);
}

TEST(PathEntangled, BornRule) {
  const DensityOperator rho = prepare_path_entangled(heralded_photon({}, 2), 0.6);
  EXPECT_NEAR(rho.population(k10), 0.6, 1e-14);
  EXPECT_THROW(prepare_path_entangled(heralded_photon({}, 2), 1.2), InvalidArgument);
}

TEST(Transmit, OperatingPointMatchesClosedForm) {
  for (const double eta : {1.0, 0.28, 0.17, 0.09, 0.0}) {
    const DensityOperator rho = ideal_link_state(0.6, eta, 3);
    const AnalyticState s = initial_state_closed_form({0.6, 0.93, eta});
    EXPECT_LT(max_abs_diff(rho.matrix(), to_density_operator(s, kModeA, kModeB, 3).matrix()), 1e-12) << eta;
  }
  EXPECT_NEAR(ideal_link_state(0.6, 0.09, 3).population(k00), 0.364, 1e-12);
  EXPECT_NEAR(ideal_link_state(0.6, 0.0, 3).population(k00), 0.4, 1e-14);
}

TEST(Hpa, OperatingPoint) {
  const HeraldedState h = ideal_hpa(0.6, 0.93, 0.09, 3);
  EXPECT_NEAR(h.p_herald, 0.05174, 1e-10);
  EXPECT_NEAR(h.state.population(k01) / h.state.population(k10), 0.03348 / 0.042, 1e-10);
  EXPECT_EQ(h.state.modes(), (std::vector<ModeLabel>{kModeA, kModeD}));
}

// Oracle equivalence on a 9^3 grid at a small cutoff; the acceptance test
// repeats this at the production cutoff.
TEST(Hpa, MatchesClosedFormOnGrid) {
  for (int i = 1; i <= 9; ++i) {
    for (int j = 1; j <= 9; ++j) {
      for (int k = 1; k <= 9; ++k) {
        const double tau = 0.1 * i;
        const double t = 0.1 * j;
        const double eta = 0.1 * k;
        const HeraldedState h = ideal_hpa(tau, t, eta, 2);
        const HeraldedClosedForm cf = final_state_closed_form({tau, t, eta});
        ASSERT_LT(max_abs_diff(h.state.matrix(), to_density_operator(cf.state, kModeA, kModeD, 2).matrix()), 1e-10)
            << tau << " " << t << " " << eta;
        ASSERT_NEAR(h.p_herald, cf.norm / 2.0, 1e-10);
      }
    }
  }
}

TEST(Hpa, LossyBsmMatchesRateModel) {
  for (const double eff : {0.25, 0.6}) {
    HpaSettings s;
    s.t = 0.93;
    s.bsm_detector = {eff, 0.0};
    const HeraldedState h = apply_hpa(ideal_link_state(0.6, 0.17, 3), heralded_photon({}, 3, kModeD), s);
    EXPECT_NEAR(h.p_herald, bsm_success_probability({0.6, 0.93, 0.17}, eff), 1e-10);
  }
}

TEST(Hpa, HeraldProbabilityFallsWithTransmission) {
  for (const double tau : {0.2, 0.6}) {
    double previous = 1.0;
    for (double t = 0.1; t < 0.95; t += 0.1) {
      const double p = ideal_hpa(tau, t, 0.3, 2).p_herald;
      EXPECT_LT(p, previous);
      previous = p;
    }
  }
}

TEST(Hpa, FullTransmissionLeavesNoVacuum) {
  const HeraldedState h = ideal_hpa(0.6, 1.0, 0.3, 2);
  EXPECT_NEAR(h.state.population(k00), 0.0, 1e-12);
  EXPECT_NEAR(h.state.population(k01), 1.0, 1e-12);
}

TEST(Hpa, MinusDetectorHeraldsPhaseFlippedState) {
  const HeraldedState plus = ideal_hpa(0.4, 0.8, 0.3, 2, HeraldDetector::plus);
  const HeraldedState minus = ideal_hpa(0.4, 0.8, 0.3, 2, HeraldDetector::minus);
  EXPECT_NEAR(plus.p_herald, minus.p_herald, 1e-12);
  EXPECT_GT(plus.state.element(k01, k10).real(), 0.0);
  EXPECT_NEAR(minus.state.element(k01, k10).real(), -plus.state.element(k01, k10).real(), 1e-12);
  const Vector psi_plus = (fock_ket(2, 2, k10) + fock_ket(2, 2, k01)) / std::sqrt(2.0);
  const Vector psi_minus = (fock_ket(2, 2, k10) - fock_ket(2, 2, k01)) / std::sqrt(2.0);
  EXPECT_NEAR(fidelity_with_pure(plus.state, psi_plus), fidelity_with_pure(minus.state, psi_minus), 1e-12);
}

TEST(Hpa, DistinguishableAuxiliaryKillsCoherence) {
  HpaSettings s;
  s.t = 0.93;
  s.bsm_overlap = 0.0;
  const HeraldedState h = apply_hpa(ideal_link_state(0.6, 0.3, 2), heralded_photon({}, 2, kModeD), s);
  EXPECT_NEAR(std::abs(h.state.element(k01, k10)), 0.0, 1e-12);
  s.bsm_overlap = 0.5;
  const HeraldedState half = apply_hpa(ideal_link_state(0.6, 0.3, 2), heralded_photon({}, 2, kModeD), s);
  const HeraldedState full = ideal_hpa(0.6, 0.93, 0.3, 2);
  EXPECT_NEAR(half.state.trace(), 1.0, 1e-10);
  EXPECT_LT(std::abs(half.state.element(k01, k10)), std::abs(full.state.element(k01, k10)));
}

TEST(Hpa, EmptyBranch) {
  HpaSettings s;
  s.t = 0.5;
  s.bsm_detector = {0.0, 0.0};
  EXPECT_THROW(apply_hpa(ideal_link_state(0.6, 0.3, 2), heralded_photon({}, 2, kModeD), s), EmptyBranch);
}

TEST(Hpa, RejectsWrongModes) {
  const DensityOperator wrong = make_vacuum({"x", "y"}, 2);
  EXPECT_THROW(apply_hpa(wrong, heralded_photon({}, 2, kModeD), HpaSettings{}), InvalidArgument);
  EXPECT_THROW(apply_hpa(ideal_link_state(0.5, 0.5, 2), heralded_photon({}, 3, kModeD), HpaSettings{}),
               InvalidArgument);
}

TEST(ArmLosses, ScalesPopulations) {
  const DensityOperator rho = apply_arm_losses(ideal_link_state(0.5, 1.0, 2), 0.5, 0.25);
  EXPECT_NEAR(rho.population(k10), 0.25, 1e-14);
  EXPECT_NEAR(rho.population(k01), 0.125, 1e-14);
}

TEST(Displacement, ZeroAmplitudeReadsPhotonNumbers) {
  const double tau = 0.6;
  const double eta = 0.09;
  const JointClickTable t = measure(ideal_link_state(tau, eta, 3), 0.0, 0.0);
  EXPECT_NEAR(t.pc0, tau, 1e-12);
  EXPECT_NEAR(t.p0c, eta * (1.0 - tau), 1e-12);
  EXPECT_NEAR(t.p00, 1.0 - tau - eta * (1.0 - tau), 1e-12);
  EXPECT_NEAR(t.pcc, 0.0, 1e-14);
}

TEST(Displacement, MaximallyEntangledZeroAmplitude) {
  const JointClickTable t = measure(prepare_path_entangled(heralded_photon({}, 2), 0.5), 0.0, 0.0);
  EXPECT_NEAR(t.p0c, 0.5, 1e-12);
  EXPECT_NEAR(t.pc0, 0.5, 1e-12);
}

TEST(Displacement, NoClickIsCoherentStateOverlap) {
  Gen g(71);
  const std::vector<ModeLabel> modes{kModeA, kModeB};
  for (int trial = 0; trial < 5; ++trial) {
    const DensityOperator rho = g.low_photon_state(modes, 3, 1);
    const double amplitude = g.uniform(0.2, 1.0);
    const double phase = g.uniform(0.0, 2.0 * std::numbers::pi);
    const JointClickTable t = measure(rho, amplitude, phase);
    // D(alpha) then vacuum projection: p00 = <-alpha_a, -alpha_b|rho|-alpha_a, -alpha_b>
    const int big = 30;
    const Complex aa = std::polar(amplitude, phase);
    const Complex ab = amplitude;
    auto coh = [&](Complex alpha) {
      Vector v(big + 1);
      for (int n = 0; n <= big; ++n) v(n) = std::exp(-std::norm(alpha) / 2.0) * std::pow(alpha, n) / std::sqrt(std::tgamma(n + 1.0));
      return v;
    };
    const Vector ka = coh(-aa);
    const Vector kb = coh(-ab);
    Complex p00 = 0.0;
    const int l = 4;
    for (int i = 0; i < l * l; ++i) {
      for (int j = 0; j < l * l; ++j) {
        p00 += std::conj(ka(i / l) * kb(i % l)) * rho.matrix()(i, j) * ka(j / l) * kb(j % l);
      }
    }
    EXPECT_NEAR(t.p00, p00.real(), 1e-8);
  }
}

TEST(Displacement, TablesSumToOne) {
  Gen g(72);
  for (int trial = 0; trial < 8; ++trial) {
    const DensityOperator rho = g.low_photon_state({kModeA, kModeB}, 3, 2);
    const double amplitude = trial == 0 ? 0.0 : g.uniform(0.0, 1.0);
    const JointClickTable t = measure(rho, amplitude, g.uniform(0.0, 6.0), g.uniform(), g.uniform());
    EXPECT_NEAR(t.sum(), 1.0, 1e-9);
    EXPECT_GE(std::min({t.p00, t.p0c, t.pc0, t.pcc}), -1e-12);
  }
}

TEST(Displacement, OrthogonalOverlapFactor) {
  // vacuum input: the no-click probability is exp(-alpha^2) per arm whatever the overlap
  const DensityOperator vac = make_vacuum({kModeA, kModeB}, 3);
  for (const double m : {1.0, 0.9, 0.0}) {
    EXPECT_NEAR(measure(vac, 0.7, 0.3, m, 0.25).p00, std::exp(-2.0 * 0.49), 1e-10) << m;
  }
}

TEST(Displacement, ParitySignalIsFirstHarmonic) {
  const DensityOperator rho = ideal_hpa(0.6, 0.93, 0.09, 3).state;
  const int n = 12;
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  for (int k = 0; k < n; ++k) {
    const double x = 2.0 * std::numbers::pi * k / n;
    const JointClickTable t = measure(rho, 0.7, x, 0.9, 0.25);
    design(k, 0) = 1.0;
    design(k, 1) = std::cos(x);
    design(k, 2) = std::sin(x);
    y(k) = t.p00 - t.p0c - t.pc0 + t.pcc;
  }
  const Eigen::VectorXd c = design.colPivHouseholderQr().solve(y);
  EXPECT_LT((design * c - y).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_GT(std::hypot(c(1), c(2)), 1e-3);
}

TEST(Displacement, Validation) {
  const DensityOperator rho = make_vacuum({kModeA, kModeB}, 2);
  DisplacementSetting s;
  s.overlap = 1.5;
  EXPECT_THROW(displacement_measurement(rho, s, {}, {}), InvalidArgument);
  EXPECT_THROW(displacement_measurement(make_vacuum({kModeA}, 2), DisplacementSetting{}, {}, {}), InvalidArgument);
}

TEST(TwoPhoton, SourceContamination) {
  SourceModel src;
  src.double_pair_probability = 0.01;
  const DensityOperator rho = prepare_path_entangled(heralded_photon(src, 3), 1.0);
  EXPECT_NEAR(two_photon_probability(rho, kModeA, 1.0), 0.01, 1e-14);
  EXPECT_NEAR(two_photon_probability(rho, kModeA, 0.25), 0.01 * 0.0625, 1e-14);
}

TEST(WorkingCutoff, PadsForDisplacement) {
  EXPECT_EQ(displacement_working_cutoff(4, 0.0), 4);
  EXPECT_GT(displacement_working_cutoff(4, 0.7), 4 + 6);
}
