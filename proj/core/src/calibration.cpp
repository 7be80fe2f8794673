#include "hpa/calibration.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "hpa/analytic.hpp"
#include "hpa/scenario.hpp"

namespace hpa {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

constexpr double kMaxDoublePair = 0.1;

// Residual functor in the layout Eigen's LevenbergMarquardt expects. Keeps the
// best point seen, which is what a failed fit reports.
struct Residuals {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  int n_inputs;
  int n_values;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f;
  struct Best {
    double cost = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x;
    int evaluations = 0;
  }* best;

  int inputs() const { return n_inputs; }
  int values() const { return n_values; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    out = f(x);
    ++best->evaluations;
    const double cost = out.squaredNorm();
    if (std::isfinite(cost) && cost < best->cost) {
      best->cost = cost;
      best->x = x;
    }
    return std::isfinite(cost) ? 0 : -1;
  }
};

using Status = Eigen::LevenbergMarquardtSpace::Status;

bool converged(Status s) {
  return s != Status::ImproperInputParameters && s != Status::TooManyFunctionEvaluation && s != Status::UserAsked &&
         s != Status::NotStarted && s != Status::Running;
}

// Runs the optimizer from x; returns the best point seen and whether it
// converged.
std::pair<Residuals::Best, bool> minimize(Residuals functor, Eigen::VectorXd x, int max_evaluations) {
  Residuals::Best best;
  functor.best = &best;
  Eigen::NumericalDiff<Residuals> diff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residuals>, double> lm(diff);
  lm.parameters.maxfev = max_evaluations;
  lm.parameters.xtol = 1e-12;
  lm.parameters.ftol = 1e-14;
  const Status status = lm.minimize(x);
  if (best.x.size() == 0) best.x = x;
  return {best, converged(status)};
}

ExperimentConfig substitute(const ExperimentConfig& base, const Eigen::VectorXd& x) {
  ExperimentConfig c = base;
  c.coupling_alice = logistic(x(0));
  c.coupling_bob = logistic(x(1));
  c.double_pair_probability = kMaxDoublePair * logistic(x(2));
  return c;
}

Eigen::Vector4d entries(const JointClickTable& t) { return {t.p00, t.p0c, t.pc0, t.pcc}; }

}  // namespace

JointClickTable simulate_zero_table(const ExperimentConfig& config, bool with_hpa) {
  const PreparedState s = prepare_state(config, with_hpa);
  const DetectorModel da{config.detector_efficiency_alice, config.dark_click_alice};
  const DetectorModel db{config.detector_efficiency_bob, config.dark_click_bob};
  return displacement_measurement(s.state, DisplacementSetting{0.0, 0.0, 0.0, config.overlap_displacement}, da, db);
}

CalibrationResult calibrate(const ExperimentConfig& base, const CalibrationTarget& target,
                            const CalibrationOptions& options) {
  base.validate();
  const Eigen::Vector4d measured = entries(target.no_hpa_zero);
  for (int k = 0; k < 4; ++k) {
    if (!(measured(k) > 0.0)) throw InvalidArgument("calibration needs strictly positive measured probabilities");
  }

  Residuals functor;
  functor.n_inputs = 3;
  functor.n_values = 4;
  functor.f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::Vector4d sim = entries(simulate_zero_table(substitute(base, x), false));
    return ((sim - measured).array() / measured.array()).matrix();
  };
  const Eigen::VectorXd start = Eigen::Vector3d(logit(0.5), logit(0.5), logit(0.2));
  const auto [best, ok] = minimize(functor, start, options.max_evaluations);

  CalibrationResult out;
  out.config = substitute(base, best.x);
  out.coupling_alice = out.config.coupling_alice;
  out.coupling_bob = out.config.coupling_bob;
  out.double_pair_probability = out.config.double_pair_probability;
  out.residual = best.cost;
  out.evaluations = best.evaluations;
  out.fitted_no_hpa = simulate_zero_table(out.config, false);
  if (!ok) {
    throw CalibrationFailure("calibration did not converge within " + std::to_string(options.max_evaluations) +
                                 " evaluations (best residual " + std::to_string(best.cost) + ")",
                             out);
  }
  if (target.hpa_zero) out.predicted_hpa = simulate_zero_table(out.config, true);
  return out;
}

BsmCouplingFit fit_bsm_coupling(const ExperimentConfig& base, const std::vector<RateMeasurement>& rates,
                                const CalibrationOptions& options) {
  if (rates.empty()) throw InvalidArgument("bsm coupling fit needs at least one rate");
  for (const auto& r : rates) {
    if (!(r.rate > 0.0)) throw InvalidArgument("measured rates must be positive");
  }
  auto model = [&](double coupling, const RateMeasurement& r) {
    return herald_rate_model(base.pair_rate, ProtocolParams{base.tau, base.t, r.eta_L}, base.detector_efficiency_bsm,
                             coupling);
  };

  Residuals functor;
  functor.n_inputs = 1;
  functor.n_values = static_cast<int>(rates.size());
  functor.f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd res(functor.n_values);
    for (std::size_t k = 0; k < rates.size(); ++k) {
      res(static_cast<Eigen::Index>(k)) = (model(logistic(x(0)), rates[k]) - rates[k].rate) / rates[k].rate;
    }
    return res;
  };
  const auto [best, ok] = minimize(functor, Eigen::VectorXd::Constant(1, 0.0), options.max_evaluations);

  BsmCouplingFit out;
  out.bsm_coupling = logistic(best.x(0));
  out.residual = best.cost;
  for (const auto& r : rates) out.model_rates.push_back(model(out.bsm_coupling, r));
  if (!ok) {
    CalibrationResult partial;
    partial.config = base;
    partial.config.bsm_coupling = out.bsm_coupling;
    partial.residual = best.cost;
    partial.evaluations = best.evaluations;
    throw CalibrationFailure("bsm coupling fit did not converge", partial);
  }
  return out;
}

}  // namespace hpa
