#include "hpa/study.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "hpa/analytic.hpp"

namespace hpa {

namespace {

using Setter = std::function<void(ExperimentConfig&, double)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"tau", [](ExperimentConfig& c, double v) { c.tau = v; }},
      {"t", [](ExperimentConfig& c, double v) { c.t = v; }},
      {"eta_L", [](ExperimentConfig& c, double v) { c.eta_L = v; }},
      {"alpha", [](ExperimentConfig& c, double v) { c.alpha = v; }},
      {"detector_efficiency_alice", [](ExperimentConfig& c, double v) { c.detector_efficiency_alice = v; }},
      {"detector_efficiency_bob", [](ExperimentConfig& c, double v) { c.detector_efficiency_bob = v; }},
      {"detector_efficiency_bsm", [](ExperimentConfig& c, double v) { c.detector_efficiency_bsm = v; }},
      {"dark_click_alice", [](ExperimentConfig& c, double v) { c.dark_click_alice = v; }},
      {"dark_click_bob", [](ExperimentConfig& c, double v) { c.dark_click_bob = v; }},
      {"dark_click_bsm", [](ExperimentConfig& c, double v) { c.dark_click_bsm = v; }},
      {"coupling_alice", [](ExperimentConfig& c, double v) { c.coupling_alice = v; }},
      {"coupling_bob", [](ExperimentConfig& c, double v) { c.coupling_bob = v; }},
      {"bsm_coupling", [](ExperimentConfig& c, double v) { c.bsm_coupling = v; }},
      {"overlap_displacement", [](ExperimentConfig& c, double v) { c.overlap_displacement = v; }},
      {"overlap_bsm", [](ExperimentConfig& c, double v) { c.overlap_bsm = v; }},
      {"double_pair_probability", [](ExperimentConfig& c, double v) { c.double_pair_probability = v; }},
      {"cutoff",
       [](ExperimentConfig& c, double v) {
         if (v != std::round(v)) throw InvalidArgument("cutoff must be an integer, got " + std::to_string(v));
         c.cutoff = static_cast<int>(v);
       }},
  };
  return table;
}

double headline_f(const ExperimentConfig& c, bool with_hpa) {
  const PreparedState s = prepare_state(c, with_hpa);
  return make_report(measure_probabilities(s.state, c), coherence_model(c)).f;
}

// Central difference of F along one direction, one-sided at the [0, 1]
// boundary.
double sensitivity(const ExperimentConfig& c, bool with_hpa, const std::function<double&(ExperimentConfig&)>& field,
                   const std::function<void(ExperimentConfig&)>& sync = {}) {
  constexpr double h = 1e-3;
  ExperimentConfig up = c;
  ExperimentConfig down = c;
  double& xu = field(up);
  double& xd = field(down);
  xu = std::min(1.0, xu + h);
  xd = std::max(0.0, xd - h);
  if (sync) {
    sync(up);
    sync(down);
  }
  const double span = field(up) - field(down);
  if (span <= 0.0) return 0.0;
  return (headline_f(up, with_hpa) - headline_f(down, with_hpa)) / span;
}

double closed_form_f(const ProtocolParams& p) {
  try {
    return fidelity_closed_form(final_state_closed_form(p).state);
  } catch (const DegenerateHeralding&) {
    return 0.0;
  }
}

}  // namespace

std::vector<std::string> sweepable_parameters() {
  std::vector<std::string> names;
  for (const auto& [name, _] : setters()) names.push_back(name);
  return names;
}

void set_parameter(ExperimentConfig& config, const std::string& name, double value) {
  const auto it = setters().find(name);
  if (it == setters().end()) {
    std::string valid;
    for (const auto& n : sweepable_parameters()) valid += (valid.empty() ? "" : ", ") + n;
    throw InvalidArgument("unknown parameter '" + name + "'; valid names: " + valid);
  }
  it->second(config, value);
}

double fidelity_band(const ExperimentConfig& c, bool with_hpa) {
  double var = 0.0;
  auto add = [&](double slope, double sigma) { var += slope * slope * sigma * sigma; };
  add(sensitivity(c, with_hpa, [](ExperimentConfig& x) -> double& { return x.tau; }), c.sigma_tau);
  if (with_hpa) {
    add(sensitivity(c, with_hpa, [](ExperimentConfig& x) -> double& { return x.t; }), c.sigma_t);
    add(sensitivity(c, with_hpa, [](ExperimentConfig& x) -> double& { return x.overlap_bsm; }), c.sigma_overlap);
  }
  add(sensitivity(
          c, with_hpa, [](ExperimentConfig& x) -> double& { return x.detector_efficiency_alice; },
          [](ExperimentConfig& x) { x.detector_efficiency_bob = x.detector_efficiency_alice; }),
      c.sigma_eta_d);
  add(sensitivity(c, with_hpa, [](ExperimentConfig& x) -> double& { return x.overlap_displacement; }),
      c.sigma_overlap);
  return std::sqrt(var);
}

SweepResult sweep(const ExperimentConfig& base, const std::string& parameter, const std::vector<double>& values,
                  const SweepOptions& options) {
  ExperimentConfig probe = base;
  set_parameter(probe, parameter, base.tau);  // validates the name before any work

  SweepResult out;
  out.parameter = parameter;
  out.points.resize(values.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      ExperimentConfig c = base;
      set_parameter(c, parameter, values[k]);
      c.threads = 1;
      SweepPoint& p = out.points[k];
      p.value = values[k];
      p.result = run_scenario(c, options.with_hpa, options.mode);
      p.f = p.result.headline().report.f;
      if (options.bands) p.f_band = fidelity_band(c, options.with_hpa);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(base.threads, static_cast<unsigned>(values.size())));
  if (threads <= 1) {
    work(0, values.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (values.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(values.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream os;
  os.precision(10);
  os << result.parameter << ",f,f_lo,f_hi,f_sep,herald_rate\n";
  for (const auto& p : result.points) {
    const FidelityReport& r = p.result.headline().report;
    os << p.value << ',' << p.f << ',' << p.f - p.f_band << ',' << p.f + p.f_band << ',' << r.f_sep << ','
       << p.result.herald_rate << '\n';
  }
  return os.str();
}

OptimizeResult optimize(double eta_L, double min_rate, const ExperimentConfig& base, const OptimizeOptions& options) {
  if (!(eta_L >= 0.0 && eta_L <= 1.0)) throw InvalidArgument("eta_L must lie in [0, 1]");
  if (options.tau_points < 2 || options.t_points < 2) throw InvalidArgument("optimizer grid needs >= 2 points per axis");
  if (!(options.t_max > 0.0 && options.t_max <= 1.0)) throw InvalidArgument("t_max must lie in (0, 1]");

  auto rate = [&](double tau, double t) {
    return herald_rate_model(base.pair_rate, ProtocolParams{tau, t, eta_L}, base.detector_efficiency_bsm,
                             base.bsm_coupling);
  };
  auto objective = [&](double tau, double t) { return closed_form_f(ProtocolParams{tau, t, eta_L}); };

  OptimizeResult best;
  best.f_f = -1.0;
  double max_rate = 0.0;
  for (int i = 0; i < options.tau_points; ++i) {
    const double tau = (i + 0.5) / options.tau_points;
    for (int j = 0; j < options.t_points; ++j) {
      const double t = options.t_max * (j + 1) / options.t_points;
      const double r = rate(tau, t);
      max_rate = std::max(max_rate, r);
      if (r < min_rate) continue;
      const double f = objective(tau, t);
      if (f > best.f_f) best = {tau, t, f, r};
    }
  }
  if (best.f_f < 0.0) {
    throw InfeasibleConstraint("no (tau, t) reaches a herald rate of " + std::to_string(min_rate) +
                                   " Hz; the largest achievable is " + std::to_string(max_rate) + " Hz",
                               max_rate);
  }

  double step_tau = 1.0 / options.tau_points;
  double step_t = options.t_max / options.t_points;
  while (step_tau > 1e-10 || step_t > 1e-10) {
    bool moved = false;
    const double moves[4][2] = {{step_tau, 0.0}, {-step_tau, 0.0}, {0.0, step_t}, {0.0, -step_t}};
    for (const auto& m : moves) {
      const double tau = best.tau + m[0];
      const double t = best.t + m[1];
      if (!(tau > 0.0 && tau < 1.0 && t > 0.0 && t <= options.t_max)) continue;
      const double r = rate(tau, t);
      if (r < min_rate) continue;
      const double f = objective(tau, t);
      if (f > best.f_f) {
        best = {tau, t, f, r};
        moved = true;
      }
    }
    if (!moved) {
      step_tau /= 2.0;
      step_t /= 2.0;
    }
  }
  return best;
}

}  // namespace hpa
