#include "hpa/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "hpa/analytic.hpp"

namespace hpa {

namespace {

using nlohmann::json;

std::string describe(const ExperimentConfig& c) {
  return "tau=" + std::to_string(c.tau) + ", t=" + std::to_string(c.t) + ", eta_L=" + std::to_string(c.eta_L) +
         ", bsm efficiency=" + std::to_string(c.detector_efficiency_bsm * c.bsm_coupling);
}

DetectorModel alice_detector(const ExperimentConfig& c) { return {c.detector_efficiency_alice, c.dark_click_alice}; }
DetectorModel bob_detector(const ExperimentConfig& c) { return {c.detector_efficiency_bob, c.dark_click_bob}; }

// Stream identifiers for derive_seed; the scan uses kScanStream + k.
constexpr std::uint64_t kZeroStream = 0;
constexpr std::uint64_t kBootstrapStream = 1;
constexpr std::uint64_t kJitterStream = 2;
constexpr std::uint64_t kScanStream = 16;

StageResult sampled_stage(const DensityOperator& state, const ExperimentConfig& config, std::uint64_t stage_seed) {
  const JointClickTable zero_table =
      displacement_measurement(state, DisplacementSetting{0.0, 0.0, 0.0, config.overlap_displacement},
                               alice_detector(config), bob_detector(config));
  const EventCounts zero = sample_events(zero_table, config.events_zero, derive_seed(stage_seed, kZeroStream));

  double alpha = config.alpha;
  if (config.amplitude_jitter > 0.0) {
    std::mt19937_64 rng(derive_seed(stage_seed, kJitterStream));
    std::normal_distribution<double> jitter(0.0, config.amplitude_jitter);
    alpha = std::max(0.0, alpha + jitter(rng));
  }

  const std::size_t n_phases = config.phases.size();
  std::vector<ScanCounts> scan;
  for (std::size_t k = 0; k < n_phases; ++k) {
    const std::uint64_t share = config.events_scan / n_phases + (k < config.events_scan % n_phases ? 1 : 0);
    const DisplacementSetting s{alpha, config.phases[k], 0.0, config.overlap_displacement};
    const JointClickTable table = displacement_measurement(state, s, alice_detector(config), bob_detector(config));
    scan.push_back({config.phases[k], sample_events(table, share, derive_seed(stage_seed, kScanStream + k))});
  }

  CoherenceModel model = coherence_model(config);
  // allow for the shot noise of the parity signal at each phase
  const double per_phase = std::max<double>(1.0, static_cast<double>(config.events_scan) / static_cast<double>(n_phases));
  model.residual_threshold = std::max(model.residual_threshold, 3.0 / std::sqrt(per_phase));

  const double p2a = two_photon_probability(state, state.modes()[0], config.detector_efficiency_alice);
  const double p2b = two_photon_probability(state, state.modes()[1], config.detector_efficiency_bob);
  BootstrapOptions options;
  options.resamples = config.bootstrap_resamples;
  options.seed = derive_seed(stage_seed, kBootstrapStream);
  options.threads = config.threads;
  const BootstrapResult boot = bootstrap_fidelity(scan, zero, model, p2a, p2b, options);

  StageResult out;
  out.probabilities.at_zero = empirical_table(zero, zero_table.setting);
  out.probabilities.p2a = p2a;
  out.probabilities.p2b = p2b;
  for (const auto& s : scan) {
    const DisplacementSetting setting{alpha, s.relative_phase, 0.0, config.overlap_displacement};
    out.probabilities.phase_scan.push_back({s.relative_phase, empirical_table(s.counts, setting)});
  }
  out.report = boot.report;
  return out;
}

StageResult evaluate(const DensityOperator& state, const ExperimentConfig& config, EvaluationMode mode,
                     std::uint64_t stage_seed) {
  if (mode == EvaluationMode::sampled) return sampled_stage(state, config, stage_seed);
  StageResult out;
  out.probabilities = measure_probabilities(state, config);
  out.report = make_report(out.probabilities, coherence_model(config));
  return out;
}

void check_separable_corner(const ExperimentConfig& c, bool with_hpa, std::vector<std::string>& warnings) {
  if (c.tau == 1.0) warnings.emplace_back("tau = 1: the shared state is separable");
  if (with_hpa && c.t == 1.0) warnings.emplace_back("t = 1: the amplified state is separable");
  if (c.tau == 0.0) warnings.emplace_back("tau = 0: the shared state is separable");
}

json table_json(const JointClickTable& t) {
  return {{"p00", t.p00},
          {"p0c", t.p0c},
          {"pc0", t.pc0},
          {"pcc", t.pcc},
          {"amplitude", t.setting.amplitude},
          {"phase_alice", t.setting.phase_alice},
          {"phase_bob", t.setting.phase_bob},
          {"overlap", t.setting.overlap}};
}

JointClickTable table_from(const json& j) {
  JointClickTable t;
  j.at("p00").get_to(t.p00);
  j.at("p0c").get_to(t.p0c);
  j.at("pc0").get_to(t.pc0);
  j.at("pcc").get_to(t.pcc);
  j.at("amplitude").get_to(t.setting.amplitude);
  j.at("phase_alice").get_to(t.setting.phase_alice);
  j.at("phase_bob").get_to(t.setting.phase_bob);
  j.at("overlap").get_to(t.setting.overlap);
  return t;
}

json report_json(const FidelityReport& r) {
  return {{"f", r.f},
          {"f_sep", r.f_sep},
          {"d", r.d},
          {"sigma_f", r.sigma_f},
          {"sigma_fsep", r.sigma_fsep},
          {"sigma_d", r.sigma_d},
          {"margin", r.margin},
          {"sigma_margin", r.sigma_margin},
          {"poor_visibility", r.poor_visibility}};
}

FidelityReport report_from(const json& j) {
  FidelityReport r;
  j.at("f").get_to(r.f);
  j.at("f_sep").get_to(r.f_sep);
  j.at("d").get_to(r.d);
  j.at("sigma_f").get_to(r.sigma_f);
  j.at("sigma_fsep").get_to(r.sigma_fsep);
  j.at("sigma_d").get_to(r.sigma_d);
  j.at("margin").get_to(r.margin);
  j.at("sigma_margin").get_to(r.sigma_margin);
  j.at("poor_visibility").get_to(r.poor_visibility);
  return r;
}

json stage_json(const StageResult& s) {
  json scan = json::array();
  for (const auto& p : s.probabilities.phase_scan) {
    scan.push_back({{"relative_phase", p.relative_phase}, {"table", table_json(p.table)}});
  }
  return {{"at_zero", table_json(s.probabilities.at_zero)},
          {"phase_scan", scan},
          {"p2a", s.probabilities.p2a},
          {"p2b", s.probabilities.p2b},
          {"report", report_json(s.report)}};
}

StageResult stage_from(const json& j) {
  StageResult s;
  s.probabilities.at_zero = table_from(j.at("at_zero"));
  for (const auto& p : j.at("phase_scan")) {
    s.probabilities.phase_scan.push_back({p.at("relative_phase").get<double>(), table_from(p.at("table"))});
  }
  j.at("p2a").get_to(s.probabilities.p2a);
  j.at("p2b").get_to(s.probabilities.p2b);
  s.report = report_from(j.at("report"));
  return s;
}

}  // namespace

PreparedState prepare_state(const ExperimentConfig& config, bool with_hpa) {
  config.validate();
  const SourceModel src{config.double_pair_probability, 1.0, 50e3};
  const DensityOperator photon = heralded_photon(src, config.cutoff, kModeA);
  DensityOperator ab = transmit(prepare_path_entangled(photon, config.tau), config.eta_L);
  if (!with_hpa) return {apply_arm_losses(ab, config.coupling_alice, config.coupling_bob), 1.0};

  HpaSettings settings;
  settings.t = config.t;
  settings.bsm_detector = {config.detector_efficiency_bsm * config.bsm_coupling, config.dark_click_bsm};
  settings.bsm_overlap = config.overlap_bsm;
  HeraldedState heralded{make_vacuum({kModeA, kModeD}, config.cutoff), 0.0};
  try {
    heralded = apply_hpa(ab, heralded_photon(src, config.cutoff, kModeD), settings);
  } catch (const EmptyBranch&) {
    throw DegenerateHeralding("heralding probability vanishes for " + describe(config));
  }
  if (heralded.p_herald < 1e-12) {
    throw DegenerateHeralding("heralding probability " + std::to_string(heralded.p_herald) + " below 1e-12 for " +
                              describe(config));
  }
  return {apply_arm_losses(heralded.state, config.coupling_alice, config.coupling_bob), heralded.p_herald};
}

CoherenceModel coherence_model(const ExperimentConfig& config) {
  CoherenceModel m;
  m.amplitude = config.alpha;
  m.overlap = config.overlap_displacement;
  m.dark_alice = config.dark_click_alice;
  m.dark_bob = config.dark_click_bob;
  return m;
}

ProbabilitySet measure_probabilities(const DensityOperator& state, const ExperimentConfig& config) {
  const DetectorModel da = alice_detector(config);
  const DetectorModel db = bob_detector(config);
  ProbabilitySet ps;
  ps.at_zero = displacement_measurement(state, DisplacementSetting{0.0, 0.0, 0.0, config.overlap_displacement}, da, db);
  for (const double phase : config.phases) {
    const DisplacementSetting s{config.alpha, phase, 0.0, config.overlap_displacement};
    ps.phase_scan.push_back({phase, displacement_measurement(state, s, da, db)});
  }
  ps.p2a = two_photon_probability(state, state.modes()[0], config.detector_efficiency_alice);
  ps.p2b = two_photon_probability(state, state.modes()[1], config.detector_efficiency_bob);
  return ps;
}

ScenarioResult run_scenario(const ExperimentConfig& config, bool with_hpa, EvaluationMode mode) {
  config.validate();
  ScenarioResult out;
  out.config = config;
  out.with_hpa = with_hpa;
  out.mode = mode;
  check_separable_corner(config, with_hpa, out.warnings);

  out.initial = evaluate(prepare_state(config, false).state, config, mode, derive_seed(config.seed, 0));
  if (with_hpa) {
    const PreparedState amplified = prepare_state(config, true);
    out.amplified = evaluate(amplified.state, config, mode, derive_seed(config.seed, 1));
    out.p_herald = amplified.p_herald;
    out.herald_rate = config.pair_rate * amplified.p_herald;
  }
  if (config.eta_L > 0.0) out.distance_km = distance_from_transmission(config.eta_L);

  const FidelityReport& r = out.headline().report;
  if (r.f <= r.f_sep) out.warnings.emplace_back("entanglement not certified: F <= F_sep");
  if (r.poor_visibility) out.warnings.emplace_back("poor visibility in the coherence fit");
  return out;
}

FidelityReport rescale_unit_efficiency(const ExperimentConfig& config, bool with_hpa) {
  ExperimentConfig unit = config;
  unit.detector_efficiency_alice = 1.0;
  unit.detector_efficiency_bob = 1.0;
  const PreparedState s = prepare_state(unit, with_hpa);
  return make_report(measure_probabilities(s.state, unit), coherence_model(unit));
}

std::string to_json(const ScenarioResult& r) {
  json j;
  j["config"] = json::parse(to_json(r.config));
  j["with_hpa"] = r.with_hpa;
  j["mode"] = r.mode == EvaluationMode::exact ? "exact" : "sampled";
  j["initial"] = stage_json(r.initial);
  j["amplified"] = r.amplified ? stage_json(*r.amplified) : json(nullptr);
  j["p_herald"] = r.p_herald;
  j["herald_rate"] = r.herald_rate;
  j["distance_km"] = r.distance_km ? json(*r.distance_km) : json(nullptr);
  j["warnings"] = r.warnings;
  return j.dump(2);
}

ScenarioResult scenario_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ScenarioResult r;
    r.config = config_from_json(j.at("config").dump());
    j.at("with_hpa").get_to(r.with_hpa);
    const auto mode = j.at("mode").get<std::string>();
    if (mode != "exact" && mode != "sampled") throw ConfigError("unknown evaluation mode '" + mode + "'");
    r.mode = mode == "exact" ? EvaluationMode::exact : EvaluationMode::sampled;
    r.initial = stage_from(j.at("initial"));
    if (!j.at("amplified").is_null()) r.amplified = stage_from(j.at("amplified"));
    j.at("p_herald").get_to(r.p_herald);
    j.at("herald_rate").get_to(r.herald_rate);
    if (!j.at("distance_km").is_null()) r.distance_km = j.at("distance_km").get<double>();
    j.at("warnings").get_to(r.warnings);
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario result: ") + e.what());
  }
}

}  // namespace hpa
