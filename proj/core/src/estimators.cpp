#include "hpa/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace hpa {

namespace {

inline double parity(const JointClickTable& t) { return t.p00 - t.p0c - t.pc0 + t.pcc; }

}  // namespace

CoherenceFit extract_coherence(const ProbabilitySet& ps, const CoherenceModel& model) {
  if (!(model.amplitude > 0.0)) throw InvalidArgument("coherence extraction needs a non-zero displacement amplitude");
  if (!(model.overlap > 0.0 && model.overlap <= 1.0)) throw InvalidArgument("overlap must lie in (0, 1]");

  std::set<double> distinct;
  for (const auto& p : ps.phase_scan) {
    double x = std::fmod(p.relative_phase, 2.0 * std::numbers::pi);
    if (x < 0.0) x += 2.0 * std::numbers::pi;
    distinct.insert(std::round(x * 1e9) / 1e9);
  }
  if (distinct.size() < 4) {
    throw InvalidArgument("phase scan needs at least 4 distinct phases, got " + std::to_string(distinct.size()));
  }

  const auto n = static_cast<Eigen::Index>(ps.phase_scan.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd signal(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = ps.phase_scan[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = std::cos(p.relative_phase);
    design(i, 2) = std::sin(p.relative_phase);
    signal(i) = parity(p.table);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) throw InvalidArgument("phase scan does not determine a first-harmonic fit");
  const Eigen::Vector3d c = qr.solve(signal);

  CoherenceFit fit;
  const double amp = std::hypot(c(1), c(2));
  const double a2 = model.amplitude * model.amplitude;
  const double scale = 8.0 * model.overlap * a2 * std::exp(-2.0 * a2) * (1.0 - model.dark_alice) * (1.0 - model.dark_bob);
  fit.d = amp / scale;
  fit.phase = amp > 0.0 ? std::atan2(c(2), c(1)) : 0.0;
  fit.parity_offset = c(0);
  fit.residual_rms = std::sqrt((design * c - signal).squaredNorm() / static_cast<double>(n));
  fit.poor_visibility = fit.residual_rms > model.residual_threshold;
  return fit;
}

double fidelity_from_probs(const ProbabilitySet& ps, double d) {
  const double f = std::abs(d) + 0.5 * (ps.at_zero.p0c + ps.at_zero.pc0);
  if (f > 1.0 + 1e-9) {
    throw InconsistentInputs("fidelity estimate " + std::to_string(f) + " exceeds one; coherence and populations disagree");
  }
  return f;
}

double separable_bound(const ProbabilitySet& ps) {
  const auto& z = ps.at_zero;
  const double two = std::max(0.0, z.pcc + ps.p2a + ps.p2b);
  return (z.pc0 + ps.p2a) / 2.0 + (z.p0c + ps.p2b) / 2.0 + std::sqrt(std::max(0.0, z.p00) * two);
}

FidelityReport make_report(const ProbabilitySet& ps, const CoherenceModel& model) {
  const CoherenceFit fit = extract_coherence(ps, model);
  FidelityReport r;
  r.d = fit.d;
  r.f = fidelity_from_probs(ps, fit.d);
  r.f_sep = separable_bound(ps);
  r.margin = r.f_sep > 0.0 ? (r.f - r.f_sep) / r.f_sep : 0.0;
  r.poor_visibility = fit.poor_visibility;
  return r;
}

DensityReconstruction reconstruct_density(const ProbabilitySet& ps, double d, double efficiency_alice,
                                          double efficiency_bob) {
  if (!(efficiency_alice > 0.0 && efficiency_alice <= 1.0 && efficiency_bob > 0.0 && efficiency_bob <= 1.0)) {
    throw InvalidArgument("reconstruction efficiencies must lie in (0, 1]");
  }
  const auto& z = ps.at_zero;
  double p01 = z.p0c / efficiency_bob;
  double p10 = z.pc0 / efficiency_alice;
  double coh = std::abs(d) / std::sqrt(efficiency_alice * efficiency_bob);
  double residual = z.pcc / (efficiency_alice * efficiency_bob) + ps.p2a / (efficiency_alice * efficiency_alice) +
                    ps.p2b / (efficiency_bob * efficiency_bob);
  const double occupied = p01 + p10 + residual;
  if (occupied > 1.0) {
    p01 /= occupied;
    p10 /= occupied;
    residual /= occupied;
    coh /= occupied;
  }
  DensityReconstruction out;
  out.rho(0, 0) = std::max(0.0, 1.0 - p01 - p10 - residual);
  out.rho(1, 1) = p01;
  out.rho(2, 2) = p10;
  out.rho(1, 2) = coh;
  out.rho(2, 1) = coh;
  out.residual = residual;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(out.rho, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = solver.eigenvalues().minCoeff();
  out.unphysical = out.min_eigenvalue < kUnphysicalEigenvalue;
  return out;
}

double separability_confidence(std::span<const MarginMeasurement> margins) {
  if (margins.empty()) throw InvalidArgument("separability confidence needs at least one measurement");
  double p = 1.0;
  for (const auto& m : margins) {
    if (!(m.sigma > 0.0)) throw InvalidArgument("margin uncertainties must be positive");
    p *= 0.5 * std::erfc(m.margin / (m.sigma * std::sqrt(2.0)));
  }
  return p;
}

double g2_from_source(const SourceModel& src) {
  src.validate();
  const double p2 = src.double_pair_probability;
  return 2.0 * p2 / ((1.0 + p2) * (1.0 + p2));
}

}  // namespace hpa
