#include "hpa/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hpa/analytic.hpp"
#include "hpa/montecarlo.hpp"
#include "hpa/scenario.hpp"
#include "hpa/study.hpp"

namespace hpa {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string str() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << r[k];
      os << '\n';
    }
    return os.str();
  }
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(8);
  os << x;
  return os.str();
}

double rel(double sim, double ref) { return ref != 0.0 ? (sim - ref) / ref : 0.0; }

// simulated, published, published sigma, absolute and relative deviation
std::vector<std::string> comparison(std::vector<std::string> lead, double sim, const Measured& ref) {
  lead.push_back(num(sim));
  lead.push_back(num(ref.value));
  lead.push_back(num(ref.sigma));
  lead.push_back(num(sim - ref.value));
  lead.push_back(num(rel(sim, ref.value)));
  return lead;
}

class Writer {
 public:
  Writer(std::string dir, Recipe recipe) : dir_(std::move(dir)), recipe_(recipe) { fs::create_directories(dir_); }

  void csv(const std::string& stem, const Csv& table) { write(stem + ".csv", table.str()); }

  ReproduceOutput finish(json summary) {
    summary["recipe"] = recipe_name(recipe_);
    out_.summary_json = summary.dump(2);
    write(recipe_name(recipe_) + ".json", out_.summary_json);
    return out_;
  }

 private:
  void write(const std::string& name, const std::string& content) {
    const std::string path = (fs::path(dir_) / name).string();
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    f << content;
    out_.files.push_back(path);
  }

  std::string dir_;
  Recipe recipe_;
  ReproduceOutput out_;
};

json table_entries(const JointClickTable& t) { return {{"p00", t.p00}, {"p0c", t.p0c}, {"pc0", t.pc0}, {"pcc", t.pcc}}; }

ReproduceOutput table1(Writer w, ExperimentConfig c, const ReferenceData& ref) {
  c.eta_L = ref.table_eta_L;
  const ExperimentConfig phase_zero = [&] {
    ExperimentConfig x = c;
    x.phases = equally_spaced_phases(4);
    return x;
  }();
  Csv csv{{"amplifier", "alpha", "entry", "simulated", "published", "published_sigma", "abs_dev", "rel_dev", "binomial_sigma",
           "sigma_ratio"},
          {}};
  json summary;
  for (const bool amplifier : {false, true}) {
    const PreparedState s = prepare_state(c, amplifier);
    const ProbabilitySet ps = measure_probabilities(s.state, phase_zero);
    for (const bool displaced : {false, true}) {
      const ReferenceRow& row = ref.row(amplifier, displaced);
      const JointClickTable& sim = displaced ? ps.phase_scan.front().table : ps.at_zero;
      const double n = static_cast<double>(displaced ? c.events_scan : c.events_zero);
      const std::tuple<const char*, double, Measured> entries[] = {
          {"p00", sim.p00, row.p00},
          {"p0c", sim.p0c, row.p0c},
          {"pc0", sim.pc0, row.pc0},
          {"pcc", sim.pcc, row.pcc},
      };
      for (const auto& [name, value, published] : entries) {
        // binomial error of the published event count at the simulated value
        const double sigma = std::sqrt(value * (1.0 - value) / n);
        auto r = comparison({amplifier ? "yes" : "no", num(row.alpha), name}, value, published);
        r.push_back(num(sigma));
        r.push_back(num(published.sigma > 0.0 ? sigma / published.sigma : 0.0));
        csv.add(r);
      }
      summary[amplifier ? "amplified" : "initial"][displaced ? "displaced" : "zero"] = table_entries(sim);
    }
  }
  w.csv("table1", csv);
  summary["eta_L"] = c.eta_L;
  summary["note"] = "displaced rows are evaluated at zero relative phase";
  return w.finish(summary);
}

ReproduceOutput table2(Writer w, ExperimentConfig c, const ReferenceData& ref) {
  Csv csv{{"eta_L", "quantity", "simulated", "published", "published_sigma", "abs_dev", "rel_dev"}, {}};
  std::vector<MarginMeasurement> simulated;
  std::vector<MarginMeasurement> published;
  json summary;
  for (const auto& m : ref.margins) {
    c.eta_L = m.eta_L;
    const ScenarioResult exact = run_scenario(c, true, EvaluationMode::exact);
    const ScenarioResult sampled = run_scenario(c, true, EvaluationMode::sampled);
    const FidelityReport& re = exact.amplified->report;
    const FidelityReport& rs = sampled.amplified->report;
    csv.add(comparison({num(m.eta_L), "margin_exact"}, re.margin, m.margin));
    csv.add(comparison({num(m.eta_L), "margin_sampled"}, rs.margin, m.margin));
    csv.add(comparison({num(m.eta_L), "sigma_margin_sampled"}, rs.sigma_margin, {m.margin.sigma, 0.0}));
    simulated.push_back({re.margin, rs.sigma_margin});
    published.push_back({m.margin.value, m.margin.sigma});
    summary["points"].push_back({{"eta_L", m.eta_L},
                                 {"f_f", re.f},
                                 {"f_sep", re.f_sep},
                                 {"margin_exact", re.margin},
                                 {"margin_sampled", rs.margin},
                                 {"sigma_margin_sampled", rs.sigma_margin},
                                 {"published_margin", m.margin.value},
                                 {"published_sigma", m.margin.sigma}});
  }
  const double conf_published = separability_confidence(published);
  const double conf_sim = separability_confidence(simulated);
  csv.add({"combined", "separable_probability_from_published_margins", num(conf_published),
           num(ref.combined_separable_probability), "", num(conf_published - ref.combined_separable_probability),
           num(rel(conf_published, ref.combined_separable_probability))});
  csv.add({"combined", "separable_probability_simulated", num(conf_sim), num(ref.combined_separable_probability), "",
           num(conf_sim - ref.combined_separable_probability), num(rel(conf_sim, ref.combined_separable_probability))});
  w.csv("table2", csv);
  summary["separable_probability_from_published_margins"] = conf_published;
  summary["separable_probability_simulated"] = conf_sim;
  summary["published_separable_probability"] = ref.combined_separable_probability;
  return w.finish(summary);
}

ReproduceOutput fig3a(Writer w, ExperimentConfig c, const ReferenceData& ref) {
  std::vector<double> grid;
  for (int k = 0; k <= 8; ++k) grid.push_back(0.05 + 0.03 * k);
  for (const auto& m : ref.margins) grid.push_back(m.eta_L);
  std::sort(grid.begin(), grid.end());

  SweepOptions with;
  with.with_hpa = true;
  const SweepResult amplified = sweep(c, "eta_L", grid, with);
  Csv csv{{"eta_L", "distance_km", "f_i", "f_i_lo", "f_i_hi", "f_f", "f_f_lo", "f_f_hi", "f_sep", "f_i_unit",
           "f_f_unit", "herald_rate"},
          {}};
  json summary;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    ExperimentConfig at = c;
    at.eta_L = grid[k];
    const SweepPoint& p = amplified.points[k];
    const double f_i = p.result.initial.report.f;
    const double band_i = fidelity_band(at, false);
    const double unit_i = rescale_unit_efficiency(at, false).f;
    const double unit_f = rescale_unit_efficiency(at, true).f;
    csv.add({num(grid[k]), num(distance_from_transmission(grid[k])), num(f_i), num(f_i - band_i), num(f_i + band_i),
             num(p.f), num(p.f - p.f_band), num(p.f + p.f_band), num(p.result.amplified->report.f_sep), num(unit_i),
             num(unit_f), num(p.result.herald_rate)});
    summary["curve"].push_back({{"eta_L", grid[k]}, {"f_i", f_i}, {"f_f", p.f}, {"f_i_unit", unit_i}, {"f_f_unit", unit_f}});
  }
  w.csv("fig3a", csv);
  return w.finish(summary);
}

ReproduceOutput fig3b(Writer w, ExperimentConfig c, const ReferenceData& ref) {
  c.eta_L = ref.table_eta_L;
  json summary;
  for (const bool amplifier : {false, true}) {
    const PreparedState s = prepare_state(c, amplifier);
    const ProbabilitySet ps = measure_probabilities(s.state, c);
    const FidelityReport rep = make_report(ps, coherence_model(c));
    const DensityReconstruction rec = reconstruct_density(ps, rep.d, c.coupling_alice * c.detector_efficiency_alice,
                                                          c.coupling_bob * c.detector_efficiency_bob);
    Csv csv{{"row", "00", "01", "10"}, {}};
    const char* labels[] = {"00", "01", "10"};
    json m = json::array();
    for (int i = 0; i < 3; ++i) {
      std::vector<std::string> row{labels[i]};
      json jr = json::array();
      for (int j = 0; j < 3; ++j) {
        row.push_back(num(rec.rho(i, j).real()));
        jr.push_back(rec.rho(i, j).real());
      }
      csv.add(row);
      m.push_back(jr);
    }
    const std::string stem = amplifier ? "fig3b_after" : "fig3b_before";
    w.csv(stem, csv);
    summary[stem] = {{"rho", m},
                     {"residual", rec.residual},
                     {"min_eigenvalue", rec.min_eigenvalue},
                     {"unphysical", rec.unphysical}};
  }
  summary["eta_L"] = c.eta_L;
  summary["basis"] = {"00", "01", "10"};
  return w.finish(summary);
}

ReproduceOutput distances(Writer w, const ReferenceData& ref) {
  Csv csv{{"eta_L", "distance_km", "published_rounded_km", "abs_dev", "rel_dev"}, {}};
  json summary;
  for (std::size_t k = 0; k < ref.margins.size(); ++k) {
    const double eta = ref.margins[k].eta_L;
    const double km = distance_from_transmission(eta);
    const double rounded = k < ref.rounded_distances_km.size() ? ref.rounded_distances_km[k] : 0.0;
    csv.add({num(eta), num(km), num(rounded), num(km - rounded), num(rel(km, rounded))});
    summary["distances"].push_back({{"eta_L", eta}, {"km", km}, {"published_rounded_km", rounded}});
  }
  w.csv("distances", csv);
  return w.finish(summary);
}

ReproduceOutput rates(Writer w, ExperimentConfig c, const ReferenceData& ref) {
  Csv csv{{"eta_L", "quantity", "simulated", "published", "published_sigma", "abs_dev", "rel_dev"}, {}};
  json summary;
  for (const auto& r : ref.rates) {
    c.eta_L = r.eta_L;
    const PreparedState s = prepare_state(c, true);
    const double simulated = c.pair_rate * s.p_herald;
    const double model = herald_rate_model(c.pair_rate, ProtocolParams{c.tau, c.t, r.eta_L}, c.detector_efficiency_bsm,
                                           c.bsm_coupling);
    csv.add(comparison({num(r.eta_L), "rate_simulated_hz"}, simulated, {r.rate, 0.0}));
    csv.add(comparison({num(r.eta_L), "rate_model_hz"}, model, {r.rate, 0.0}));
    summary["rates"].push_back({{"eta_L", r.eta_L}, {"simulated", simulated}, {"model", model}, {"published", r.rate}});
  }
  w.csv("rates", csv);
  summary["bsm_coupling"] = c.bsm_coupling;
  summary["pair_rate"] = c.pair_rate;
  return w.finish(summary);
}

constexpr std::pair<Recipe, const char*> kRecipes[] = {
    {Recipe::table1, "table1"}, {Recipe::table2, "table2"},       {Recipe::fig3a, "fig3a"},
    {Recipe::fig3b, "fig3b"},   {Recipe::distances, "distances"}, {Recipe::rates, "rates"},
};

}  // namespace

std::vector<std::string> recipe_names() {
  std::vector<std::string> out;
  for (const auto& [_, name] : kRecipes) out.emplace_back(name);
  return out;
}

std::string recipe_name(Recipe r) {
  for (const auto& [recipe, name] : kRecipes) {
    if (recipe == r) return name;
  }
  return "unknown";
}

Recipe parse_recipe(const std::string& name) {
  for (const auto& [recipe, n] : kRecipes) {
    if (name == n) return recipe;
  }
  std::string valid;
  for (const auto& n : recipe_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown recipe '" + name + "'; valid recipes: " + valid);
}

ReproduceOutput reproduce(Recipe recipe, const std::string& out_dir, const ExperimentConfig& config,
                          const ReferenceData& reference) {
  config.validate();
  Writer w(out_dir, recipe);
  switch (recipe) {
    case Recipe::table1:
      return table1(std::move(w), config, reference);
    case Recipe::table2:
      return table2(std::move(w), config, reference);
    case Recipe::fig3a:
      return fig3a(std::move(w), config, reference);
    case Recipe::fig3b:
      return fig3b(std::move(w), config, reference);
    case Recipe::distances:
      return distances(std::move(w), reference);
    case Recipe::rates:
      return rates(std::move(w), config, reference);
  }
  throw InvalidArgument("unknown recipe");
}

}  // namespace hpa
