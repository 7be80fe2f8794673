// hpa_sim: command-line front end for scenario runs, sweeps, the (tau, t)
// optimizer, calibration and the reproduction recipes.
//
// Exit codes: 0 success, 2 invalid config or usage, 3 infeasible or
// degenerate scenario, 4 calibration failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hpa/calibration.hpp"
#include "hpa/config.hpp"
#include "hpa/errors.hpp"
#include "hpa/reference.hpp"
#include "hpa/reproduce.hpp"
#include "hpa/scenario.hpp"
#include "hpa/study.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitCalibration = 4;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> cutoff;
  bool with_hpa = true;
  bool sampled = false;
  std::string out_dir;
  std::string format = "json";
};

hpa::ExperimentConfig load(const Common& o) {
  hpa::ExperimentConfig c = o.config_path.empty() ? hpa::default_config() : hpa::load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.cutoff) c.cutoff = *o.cutoff;
  c.validate();
  return c;
}

// Writes to <out>/<name> when --out is set, stdout otherwise.
void emit(const Common& o, const std::string& name, const std::string& content) {
  if (o.out_dir.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::filesystem::create_directories(o.out_dir);
  const auto path = std::filesystem::path(o.out_dir) / name;
  std::ofstream f(path);
  if (!f) throw hpa::ConfigError("cannot write " + path.string());
  f << content;
  std::cerr << "wrote " << path.string() << '\n';
}

std::string scenario_csv(const hpa::ScenarioResult& r) {
  std::ostringstream os;
  os.precision(10);
  os << "stage,relative_phase,alpha,p00,p0c,pc0,pcc\n";
  auto rows = [&](const char* name, const hpa::StageResult& s) {
    const auto& z = s.probabilities.at_zero;
    os << name << ",0,0," << z.p00 << ',' << z.p0c << ',' << z.pc0 << ',' << z.pcc << '\n';
    for (const auto& p : s.probabilities.phase_scan) {
      os << name << ',' << p.relative_phase << ',' << p.table.setting.amplitude << ',' << p.table.p00 << ','
         << p.table.p0c << ',' << p.table.pc0 << ',' << p.table.pcc << '\n';
    }
  };
  rows("initial", r.initial);
  if (r.amplified) rows("amplified", *r.amplified);
  os << "\nstage,f,f_sep,d,sigma_f,sigma_fsep,sigma_d,margin,sigma_margin\n";
  auto report = [&](const char* name, const hpa::FidelityReport& f) {
    os << name << ',' << f.f << ',' << f.f_sep << ',' << f.d << ',' << f.sigma_f << ',' << f.sigma_fsep << ','
       << f.sigma_d << ',' << f.margin << ',' << f.sigma_margin << '\n';
  };
  report("initial", r.initial.report);
  if (r.amplified) report("amplified", r.amplified->report);
  return os.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw hpa::ConfigError("not a number: '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fock-space simulator of heralded photon amplification of path-entangled states"};
  app.require_subcommand(1);
  app.fallthrough();

  Common o;
  app.add_option("--config", o.config_path, "JSON config file (defaults from print-default-config)");
  app.add_option("--seed", o.seed, "RNG seed for sampled mode");
  app.add_option("--cutoff", o.cutoff, "Photon-number cutoff per mode");
  app.add_flag("--with-hpa,!--no-hpa", o.with_hpa, "Evaluate the amplified state (default on)");
  app.add_flag("--sampled,!--exact", o.sampled, "Finite-statistics evaluation instead of exact probabilities");
  app.add_option("--out", o.out_dir, "Output directory (stdout when omitted)");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  auto* run = app.add_subcommand("run", "Run one scenario");

  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one config parameter");
  std::string sweep_param;
  std::string sweep_values;
  bool sweep_bands = true;
  sweep_cmd->add_option("--param", sweep_param, "Parameter name")->required();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")->required();
  sweep_cmd->add_flag("--bands,!--no-bands", sweep_bands, "Finite-difference uncertainty bands");

  auto* optimize_cmd = app.add_subcommand("optimize", "Maximize F_f over (tau, t) subject to a herald-rate floor");
  std::optional<double> opt_eta;
  double opt_rate = 0.0;
  int opt_points = 100;
  optimize_cmd->add_option("--eta-L", opt_eta, "Link transmission (config value when omitted)");
  optimize_cmd->add_option("--min-rate", opt_rate, "Minimum herald rate in Hz");
  optimize_cmd->add_option("--grid", opt_points, "Grid points per axis")->check(CLI::Range(2, 5000));

  auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit arm couplings, double-pair probability and BSM coupling");
  std::string cal_table;
  calibrate_cmd->add_option("--table", cal_table, "Measured alpha=0 row p00,p0c,pc0,pcc (reference data when omitted)");
  hpa::CalibrationOptions cal_options;
  calibrate_cmd->add_option("--max-evaluations", cal_options.max_evaluations, "Model evaluation budget per fit")
      ->check(CLI::PositiveNumber);

  auto* reproduce_cmd = app.add_subcommand("reproduce", "Write simulated-vs-published comparison files");
  std::string recipe = "all";
  reproduce_cmd->add_option("recipe", recipe, "Recipe name or 'all'");

  auto* print_cmd = app.add_subcommand("print-default-config", "Print the default config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*print_cmd) {
      std::cout << hpa::to_json(hpa::default_config()) << '\n';
      return 0;
    }
    const hpa::ExperimentConfig config = load(o);
    const auto mode = o.sampled ? hpa::EvaluationMode::sampled : hpa::EvaluationMode::exact;

    if (*run) {
      const hpa::ScenarioResult r = hpa::run_scenario(config, o.with_hpa, mode);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      if (o.format == "csv") {
        emit(o, "scenario.csv", scenario_csv(r));
        if (!o.out_dir.empty()) emit(o, "scenario.json", hpa::to_json(r));
      } else {
        emit(o, "scenario.json", hpa::to_json(r));
      }
    } else if (*sweep_cmd) {
      hpa::SweepOptions so;
      so.with_hpa = o.with_hpa;
      so.mode = mode;
      so.bands = sweep_bands;
      const hpa::SweepResult s = hpa::sweep(config, sweep_param, parse_list(sweep_values), so);
      if (o.format == "csv") {
        emit(o, "sweep.csv", hpa::sweep_csv(s));
      } else {
        std::string body = "[\n";
        for (std::size_t k = 0; k < s.points.size(); ++k) {
          body += hpa::to_json(s.points[k].result) + (k + 1 < s.points.size() ? ",\n" : "\n");
        }
        emit(o, "sweep.json", body + "]\n");
      }
    } else if (*optimize_cmd) {
      hpa::OptimizeOptions oo;
      oo.tau_points = oo.t_points = opt_points;
      const double eta = opt_eta.value_or(config.eta_L);
      const hpa::OptimizeResult r = hpa::optimize(eta, opt_rate, config, oo);
      std::ostringstream os;
      os.precision(10);
      if (o.format == "csv") {
        os << "eta_L,min_rate,tau,t,f_f,herald_rate\n"
           << eta << ',' << opt_rate << ',' << r.tau << ',' << r.t << ',' << r.f_f << ',' << r.herald_rate << '\n';
      } else {
        os << "{\n  \"eta_L\": " << eta << ",\n  \"min_rate\": " << opt_rate << ",\n  \"tau\": " << r.tau
           << ",\n  \"t\": " << r.t << ",\n  \"f_f\": " << r.f_f << ",\n  \"herald_rate\": " << r.herald_rate
           << "\n}\n";
      }
      emit(o, std::string("optimize.") + o.format, os.str());
    } else if (*calibrate_cmd) {
      const hpa::ReferenceData ref = hpa::load_reference();
      hpa::CalibrationTarget target = ref.calibration_target();
      if (!cal_table.empty()) {
        const auto v = parse_list(cal_table);
        if (v.size() != 4) throw hpa::ConfigError("--table needs four comma-separated probabilities");
        target.no_hpa_zero = {v[0], v[1], v[2], v[3]};
        target.hpa_zero.reset();
      }
      hpa::ExperimentConfig base = config;
      base.eta_L = ref.table_eta_L;
      const hpa::CalibrationResult cal = hpa::calibrate(base, target, cal_options);
      const hpa::BsmCouplingFit bsm = hpa::fit_bsm_coupling(base, ref.rates, cal_options);
      hpa::ExperimentConfig fitted = cal.config;
      fitted.bsm_coupling = bsm.bsm_coupling;
      fitted.eta_L = config.eta_L;
      std::ostringstream os;
      os.precision(10);
      os << "coupling_alice,coupling_bob,double_pair_probability,bsm_coupling,residual,bsm_residual\n"
         << cal.coupling_alice << ',' << cal.coupling_bob << ',' << cal.double_pair_probability << ','
         << bsm.bsm_coupling << ',' << cal.residual << ',' << bsm.residual << '\n';
      if (cal.predicted_hpa) {
        const auto& p = *cal.predicted_hpa;
        os << "predicted_hpa_p00,predicted_hpa_p0c,predicted_hpa_pc0,predicted_hpa_pcc\n"
           << p.p00 << ',' << p.p0c << ',' << p.pc0 << ',' << p.pcc << '\n';
      }
      if (o.format == "csv") {
        emit(o, "calibration.csv", os.str());
      } else {
        std::cerr << os.str();
        emit(o, "calibrated_config.json", hpa::to_json(fitted));
      }
    } else if (*reproduce_cmd) {
      const std::string dir = o.out_dir.empty() ? std::string("reproduction") : o.out_dir;
      const hpa::ReferenceData ref = hpa::load_reference();
      std::vector<hpa::Recipe> recipes;
      if (recipe == "all") {
        for (const auto& n : hpa::recipe_names()) recipes.push_back(hpa::parse_recipe(n));
      } else {
        recipes.push_back(hpa::parse_recipe(recipe));
      }
      for (const auto r : recipes) {
        const hpa::ReproduceOutput out = hpa::reproduce(r, dir, config, ref);
        for (const auto& f : out.files) std::cerr << "wrote " << f << '\n';
      }
    }
    return 0;
  } catch (const hpa::CalibrationFailure& e) {
    std::cerr << "calibration failure: " << e.what() << '\n';
    return kExitCalibration;
  } catch (const hpa::InfeasibleConstraint& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const hpa::DegenerateHeralding& e) {
    std::cerr << "degenerate scenario: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const hpa::EmptyBranch& e) {
    std::cerr << "degenerate scenario: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const hpa::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const hpa::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitInvalid;
  }
}
