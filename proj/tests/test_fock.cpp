#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hpa/fock.hpp"
#include "support.hpp"

using namespace hpa;
using hpa::testing::Gen;
using hpa::testing::max_abs_diff;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// Two photons entering one port each of a beamsplitter with single-particle
// matrix S (a_j^dag -> sum_k S_kj a_k^dag), expanded by hand.
struct TwoPhotonOutput {
  Complex a20, a11, a02;
};

TwoPhotonOutput hom_oracle(double T, double phase) {
  const Complex e = std::polar(1.0, phase);
  const Complex s11 = std::sqrt(T);
  const Complex s21 = e * std::sqrt(1.0 - T);
  const Complex s12 = -std::conj(e) * std::sqrt(1.0 - T);
  const Complex s22 = std::sqrt(T);
  return {std::sqrt(2.0) * s11 * s12, s11 * s22 + s21 * s12, std::sqrt(2.0) * s21 * s22};
}

// Single-mode loss from its Kraus operators
// E_k = sum_n sqrt(C(n,k) (1-eta)^k eta^(n-k)) |n-k><n|.
Matrix kraus_loss(const Matrix& rho, double eta) {
  const auto l = rho.rows();
  Matrix out = Matrix::Zero(l, l);
  for (int k = 0; k < l; ++k) {
    Matrix e = Matrix::Zero(l, l);
    for (int n = k; n < l; ++n) e(n - k, n) = std::sqrt(binomial(n, k) * std::pow(1.0 - eta, k) * std::pow(eta, n - k));
    out += e * rho * e.adjoint();
  }
  return out;
}

const int kOneZero[] = {1, 0};
const int kZeroOne[] = {0, 1};
const int kOneOne[] = {1, 1};

}  // namespace

TEST(Vacuum, SingleMode) {
  const DensityOperator v = make_vacuum({"a"}, 3);
  ASSERT_EQ(v.dimension(), 4);
  EXPECT_EQ(v.matrix()(0, 0), Complex(1.0));
  EXPECT_DOUBLE_EQ(v.matrix().cwiseAbs().sum(), 1.0);
}

TEST(Vacuum, Dimensions) {
  EXPECT_EQ(make_vacuum({"a", "b"}, 2).dimension(), 9);
  EXPECT_DOUBLE_EQ(make_vacuum({"a", "b"}, 2).trace(), 1.0);
  EXPECT_EQ(make_vacuum({"a", "b", "c", "d"}, 4).dimension(), 625);
}

TEST(Vacuum, RejectsBadInput) {
  EXPECT_THROW(make_vacuum({"a"}, 0), InvalidArgument);
  EXPECT_THROW(make_vacuum({}, 2), InvalidArgument);
  EXPECT_THROW(make_vacuum({"a", "a"}, 2), InvalidArgument);
}

TEST(Beamsplitter, IdentityAtUnitTransmission) {
  const DensityOperator s = make_fock({"a", "b"}, 3, kOneZero);
  const DensityOperator out = apply_beamsplitter(s, "a", "b", 1.0);
  EXPECT_LT(max_abs_diff(out.matrix(), s.matrix()), 1e-14);
}

TEST(Beamsplitter, BalancedSplitsSinglePhoton) {
  const DensityOperator out = apply_beamsplitter(make_fock({"a", "b"}, 3, kOneZero), "a", "b", 0.5);
  EXPECT_NEAR(out.population(kOneZero), 0.5, 1e-12);
  EXPECT_NEAR(out.population(kZeroOne), 0.5, 1e-12);
}

TEST(Beamsplitter, HongOuMandelDip) {
  const DensityOperator out = apply_beamsplitter(make_fock({"a", "b"}, 3, kOneOne), "a", "b", 0.5);
  EXPECT_LT(out.population(kOneOne), 1e-14);
  const int two_zero[] = {2, 0};
  const int zero_two[] = {0, 2};
  EXPECT_NEAR(out.population(two_zero), 0.5, 1e-12);
  EXPECT_NEAR(out.population(zero_two), 0.5, 1e-12);
}

TEST(Beamsplitter, MatchesTwoPhotonOracle) {
  Gen g(11);
  for (int trial = 0; trial < 25; ++trial) {
    const double T = g.uniform();
    const double phase = g.uniform(0.0, 2.0 * std::numbers::pi);
    const int cutoff = g.integer(2, 4);
    const DensityOperator out = apply_beamsplitter(make_fock({"a", "b"}, cutoff, kOneOne), "a", "b", T, phase);
    const TwoPhotonOutput o = hom_oracle(T, phase);
    Vector ket = Vector::Zero(out.dimension());
    const int s20[] = {2, 0};
    const int s02[] = {0, 2};
    ket += o.a20 * fock_ket(2, cutoff, s20);
    ket += o.a11 * fock_ket(2, cutoff, kOneOne);
    ket += o.a02 * fock_ket(2, cutoff, s02);
    EXPECT_LT(max_abs_diff(out.matrix(), ket * ket.adjoint()), 1e-12) << "T=" << T << " phase=" << phase;
  }
}

TEST(Beamsplitter, InverseRestoresState) {
  Gen g(12);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityOperator s = g.low_photon_state({"a", "b"}, 4, 2);
    const double T = g.uniform();
    const double phase = g.uniform(0.0, 2.0 * std::numbers::pi);
    // the inverse of BS(T, phase) on (a, b) is BS(T, phase + pi) on the same ports
    const DensityOperator back =
        apply_beamsplitter(apply_beamsplitter(s, "a", "b", T, phase), "a", "b", T, phase + std::numbers::pi);
    EXPECT_LT(max_abs_diff(back.matrix(), s.matrix()), 1e-10);
  }
}

TEST(Beamsplitter, ConservesPhotonNumberDistribution) {
  Gen g(13);
  const DensityOperator s = g.low_photon_state({"a", "b"}, 4, 2);
  const DensityOperator out = apply_beamsplitter(s, "a", "b", 0.3, 0.7);
  for (int n = 0; n <= 4; ++n) {
    double before = 0.0;
    double after = 0.0;
    for (int k = 0; k <= n; ++k) {
      const int occ[] = {k, n - k};
      before += s.population(occ);
      after += out.population(occ);
    }
    EXPECT_NEAR(before, after, 1e-12) << "N=" << n;
  }
  EXPECT_NEAR(out.trace(), 1.0, 1e-10);
}

TEST(Beamsplitter, Errors) {
  const DensityOperator s = make_vacuum({"a", "b"}, 2);
  EXPECT_THROW(apply_beamsplitter(s, "a", "z", 0.5), InvalidArgument);
  EXPECT_THROW(apply_beamsplitter(s, "a", "a", 0.5), InvalidArgument);
  EXPECT_THROW(apply_beamsplitter(s, "a", "b", 1.5), InvalidArgument);
}

TEST(Displacement, ZeroIsIdentity) {
  const DensityOperator v = make_vacuum({"a"}, 6);
  EXPECT_LT(max_abs_diff(apply_displacement(v, "a", 0.0).matrix(), v.matrix()), 1e-15);
}

TEST(Displacement, PoissonStatistics) {
  const double alpha = 0.7;
  const DensityOperator d = apply_displacement(make_vacuum({"a"}, 6), "a", alpha);
  EXPECT_NEAR(d.photon_distribution("a")[0], std::exp(-0.49), 1e-4);

  const DensityOperator wide = apply_displacement(make_vacuum({"a"}, 25), "a", std::polar(alpha, 0.4));
  const auto p = wide.photon_distribution("a");
  for (int n = 0; n <= 8; ++n) {
    const double poisson = std::exp(-alpha * alpha) * std::pow(alpha * alpha, n) / factorial(n);
    EXPECT_NEAR(p[static_cast<std::size_t>(n)], poisson, 1e-12) << "n=" << n;
  }
}

TEST(Displacement, InverseReturnsVacuum) {
  const DensityOperator v = make_vacuum({"a"}, 6);
  const DensityOperator back = apply_displacement(apply_displacement(v, "a", 0.7), "a", -0.7);
  EXPECT_LT(max_abs_diff(back.matrix(), v.matrix()), 1e-6);
  EXPECT_NEAR(back.trace(), 1.0, 1e-10);
}

TEST(Displacement, UnknownMode) {
  EXPECT_THROW(apply_displacement(make_vacuum({"a"}, 3), "b", 0.1), InvalidArgument);
}

TEST(Loss, UnitTransmissionIsIdentity) {
  Gen g(21);
  const DensityOperator s = g.low_photon_state({"a", "b"}, 3, 3);
  EXPECT_LT(max_abs_diff(apply_loss(s, "b", 1.0).matrix(), s.matrix()), 1e-12);
}

TEST(Loss, SinglePhoton) {
  const int one[] = {1};
  const DensityOperator out = apply_loss(make_fock({"a"}, 3, one), "a", 0.09);
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = 0.91;
  expected(1, 1) = 0.09;
  EXPECT_LT(max_abs_diff(out.matrix(), expected), 1e-12);
}

TEST(Loss, MatchesKrausOracle) {
  Gen g(22);
  for (int trial = 0; trial < 20; ++trial) {
    const int cutoff = g.integer(1, 5);
    const DensityOperator s({"a"}, cutoff, g.density(cutoff + 1));
    const double eta = g.uniform();
    EXPECT_LT(max_abs_diff(apply_loss(s, "a", eta).matrix(), kraus_loss(s.matrix(), eta)), 1e-12);
  }
}

TEST(Loss, Composition) {
  Gen g(23);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityOperator s = g.low_photon_state({"a", "b"}, 4, 4);
    const double e1 = g.uniform();
    const double e2 = g.uniform();
    const DensityOperator twice = apply_loss(apply_loss(s, "a", e1), "a", e2);
    EXPECT_LT(max_abs_diff(twice.matrix(), apply_loss(s, "a", e1 * e2).matrix()), 1e-10);
  }
}

TEST(Loss, ScalesMeanPhotonNumber) {
  Gen g(24);
  const DensityOperator s = g.low_photon_state({"a"}, 4, 4);
  EXPECT_NEAR(apply_loss(s, "a", 0.37).mean_photon_number("a"), 0.37 * s.mean_photon_number("a"), 1e-12);
}

TEST(Loss, PathEntangledArmMatchesMixture) {
  const double tau = 0.6;
  const double eta = 0.09;
  Vector ket = std::sqrt(tau) * fock_ket(2, 3, kOneZero) + std::sqrt(1.0 - tau) * fock_ket(2, 3, kZeroOne);
  const DensityOperator out = apply_loss(make_pure({"a", "b"}, 3, ket), "b", eta);
  Vector kept = std::sqrt(tau) * fock_ket(2, 3, kOneZero) + std::sqrt(eta * (1.0 - tau)) * fock_ket(2, 3, kZeroOne);
  Matrix expected = kept * kept.adjoint();
  expected(0, 0) += (1.0 - eta) * (1.0 - tau);
  EXPECT_LT(max_abs_diff(out.matrix(), expected), 1e-12);
}

TEST(Loss, RejectsBadTransmission) {
  EXPECT_THROW(apply_loss(make_vacuum({"a"}, 2), "a", -0.1), InvalidArgument);
  EXPECT_THROW(apply_loss(make_vacuum({"a"}, 2), "a", 1.1), InvalidArgument);
}

TEST(Loss, AncillaNameDoesNotClash) {
  Gen g(25);
  const DensityOperator s = g.low_photon_state({"a", "__loss_ancilla"}, 3, 2);
  const DensityOperator out = apply_loss(s, "a", 0.5);
  EXPECT_EQ(out.modes(), s.modes());
  EXPECT_NEAR(out.trace(), 1.0, 1e-12);
}

TEST(PartialTrace, ProductFactor) {
  Gen g(31);
  const DensityOperator a({"a"}, 3, g.density(4));
  const DensityOperator b({"b"}, 3, g.density(4));
  const ModeLabel keep[] = {"a"};
  EXPECT_LT(max_abs_diff(partial_trace(tensor(a, b), keep).matrix(), a.matrix()), 1e-12);
}

TEST(PartialTrace, MaximallyEntangledReduction) {
  const Vector ket = (fock_ket(2, 2, kOneZero) + fock_ket(2, 2, kZeroOne)) / std::sqrt(2.0);
  const ModeLabel keep[] = {"a"};
  const DensityOperator r = partial_trace(make_pure({"a", "b"}, 2, ket), keep);
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = 0.5;
  expected(1, 1) = 0.5;
  EXPECT_LT(max_abs_diff(r.matrix(), expected), 1e-12);
}

TEST(PartialTrace, AncillaConstructionEqualsLoss) {
  Gen g(32);
  const DensityOperator s = g.low_photon_state({"a", "b"}, 3, 3);
  const double eta = 0.42;
  const DensityOperator with_env = apply_beamsplitter(tensor(s, make_vacuum({"env"}, 3)), "b", "env", eta);
  const ModeLabel keep[] = {"a", "b"};
  EXPECT_LT(max_abs_diff(partial_trace(with_env, keep).matrix(), apply_loss(s, "b", eta).matrix()), 1e-12);
}

TEST(PartialTrace, Errors) {
  const DensityOperator s = make_vacuum({"a", "b"}, 2);
  const ModeLabel bad[] = {"c"};
  EXPECT_THROW(partial_trace(s, bad), InvalidArgument);
  EXPECT_THROW(partial_trace(s, std::span<const ModeLabel>{}), InvalidArgument);
}

TEST(Binary, VacuumNeverClicks) {
  const DensityOperator v = make_vacuum({"a", "b"}, 3);
  for (const double eff : {0.0, 0.25, 1.0}) {
    const BinaryMeasurement m = measure_binary(v, "a", {eff, 0.0});
    EXPECT_DOUBLE_EQ(m.p_noclick, 1.0);
    EXPECT_FALSE(m.click.state.has_value());
    EXPECT_THROW(m.click.require_state(), EmptyBranch);
  }
}

TEST(Binary, FockStateClickProbabilities) {
  const int one[] = {1};
  const int two[] = {2};
  EXPECT_NEAR(measure_binary(make_fock({"a"}, 3, one), "a", {0.25, 0.0}).p_click, 0.25, 1e-14);
  EXPECT_NEAR(measure_binary(make_fock({"a"}, 3, two), "a", {0.25, 0.0}).p_click, 0.4375, 1e-14);
}

TEST(Binary, DarkClicks) {
  const DetectorModel det{0.5, 0.1};
  EXPECT_NEAR(det.no_click_weight(0), 0.9, 1e-15);
  EXPECT_NEAR(det.no_click_weight(2), 0.9 * 0.25, 1e-15);
}

TEST(Binary, ConditionalStatesAreNormalized) {
  Gen g(41);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityOperator s = g.low_photon_state({"a", "b"}, 3, 3);
    const BinaryMeasurement m = measure_binary(s, "a", {g.uniform(), 0.0});
    EXPECT_NEAR(m.p_noclick + m.p_click, 1.0, 1e-10);
    EXPECT_NEAR(m.noclick.require_state().trace(), 1.0, 1e-10);
    EXPECT_NEAR(m.click.require_state().trace(), 1.0, 1e-10);
    EXPECT_EQ(m.click.require_state().modes(), std::vector<ModeLabel>{"b"});
  }
}

TEST(Binary, UnitEfficiencyDisplacedNoClickIsCoherentOverlap) {
  Gen g(42);
  const DensityOperator s = g.low_photon_state({"a"}, 20, 2);
  const Complex alpha = std::polar(0.7, 1.1);
  const BinaryMeasurement m = measure_binary(apply_displacement(s, "a", -alpha), "a", {});
  // <alpha|rho|alpha> from the coherent-state ket
  Vector coh(21);
  for (int n = 0; n <= 20; ++n) coh(n) = std::exp(-0.245) * std::pow(alpha, n) / std::sqrt(factorial(n));
  const double overlap = (coh.adjoint() * s.matrix() * coh)(0, 0).real();
  EXPECT_NEAR(m.p_noclick, overlap, 1e-10);
}

TEST(Fidelity, Basics) {
  const Vector psi = (fock_ket(2, 2, kOneZero) + fock_ket(2, 2, kZeroOne)) / std::sqrt(2.0);
  EXPECT_NEAR(fidelity_with_pure(make_pure({"a", "b"}, 2, psi), psi), 1.0, 1e-14);
  EXPECT_NEAR(fidelity_with_pure(make_vacuum({"a", "b"}, 2), psi), 0.0, 1e-14);
  EXPECT_THROW(fidelity_with_pure(make_vacuum({"a"}, 2), psi), InvalidArgument);
}

TEST(Cutoff, PaddingIsExactAndTruncationDropsWeight) {
  Gen g(51);
  const DensityOperator s = g.low_photon_state({"a", "b"}, 2, 2);
  const DensityOperator padded = with_cutoff(s, 5);
  EXPECT_NEAR(padded.trace(), 1.0, 1e-14);
  EXPECT_LT(max_abs_diff(with_cutoff(padded, 2).matrix(), s.matrix()), 1e-15);
}

// Random pipelines of at most 20 operations at cutoff 4 keep the density
// operator a valid state.
TEST(Property, RandomOperationSequencesStayPhysical) {
  Gen g(61);
  const std::vector<ModeLabel> modes{"a", "b", "c"};
  for (int trial = 0; trial < 30; ++trial) {
    DensityOperator s = g.low_photon_state(modes, 4, 1);
    const int ops = g.integer(1, 20);
    for (int k = 0; k < ops; ++k) {
      const auto& m1 = modes[static_cast<std::size_t>(g.integer(0, 2))];
      const auto& m2 = modes[static_cast<std::size_t>((g.integer(1, 2) + (&m1 - modes.data())) % 3)];
      switch (g.integer(0, 2)) {
        case 0:
          s = apply_beamsplitter(s, m1, m2, g.uniform(), g.uniform(0.0, 6.3));
          break;
        case 1:
          s = apply_displacement(s, m1, std::polar(g.uniform(0.0, 0.3), g.uniform(0.0, 6.3)));
          break;
        default:
          s = apply_loss(s, m1, g.uniform());
          break;
      }
      ASSERT_NEAR(s.trace(), 1.0, 1e-9);
      ASSERT_LT(s.hermiticity_error(), 1e-12);
    }
    EXPECT_GT(s.min_eigenvalue(), -1e-9);
  }
}
