#include "hpa/reference.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "hpa/errors.hpp"

#ifndef HPA_DEFAULT_DATA_DIR
#define HPA_DEFAULT_DATA_DIR "data"
#endif

namespace hpa {

namespace {

using nlohmann::json;

Measured measured(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("reference entries must be [value, uncertainty] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

JointClickTable ReferenceRow::table() const {
  JointClickTable t;
  t.p00 = p00.value;
  t.p0c = p0c.value;
  t.pc0 = pc0.value;
  t.pcc = pcc.value;
  t.setting.amplitude = alpha;
  return t;
}

const ReferenceRow& ReferenceData::row(bool amplifier, bool displaced) const {
  for (const auto& r : rows) {
    if (r.amplifier == amplifier && (r.alpha > 0.0) == displaced) return r;
  }
  throw InvalidArgument("reference data has no such click-table row");
}

CalibrationTarget ReferenceData::calibration_target() const {
  CalibrationTarget target;
  target.no_hpa_zero = row(false, false).table();
  target.hpa_zero = row(true, false).table();
  return target;
}

std::string default_data_dir() {
  if (const char* env = std::getenv("HPA_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return HPA_DEFAULT_DATA_DIR;
}

ReferenceData load_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read reference data " + path);
  try {
    const json j = json::parse(in);
    ReferenceData d;
    const json& op = j.at("operating_point");
    op.at("tau").get_to(d.tau);
    op.at("t").get_to(d.t);
    op.at("alpha").get_to(d.alpha);
    op.at("detector_efficiency").get_to(d.detector_efficiency);

    const json& tables = j.at("click_tables");
    tables.at("eta_L").get_to(d.table_eta_L);
    for (const auto& r : tables.at("rows")) {
      ReferenceRow row;
      r.at("amplifier").get_to(row.amplifier);
      r.at("alpha").get_to(row.alpha);
      row.p00 = measured(r.at("p00"));
      row.p0c = measured(r.at("p0c"));
      row.pc0 = measured(r.at("pc0"));
      row.pcc = measured(r.at("pcc"));
      d.rows.push_back(row);
    }
    j.at("two_photon_upper_bound").get_to(d.two_photon_upper_bound);
    d.coherence_d = measured(j.at("coherence_d"));
    for (const auto& m : j.at("separability_margins")) {
      d.margins.push_back({m.at("eta_L").get<double>(), measured(m.at("margin"))});
    }
    j.at("margin_significance_sigmas").get_to(d.margin_significance);
    j.at("combined_separable_probability").get_to(d.combined_separable_probability);
    j.at("pair_rate").get_to(d.pair_rate);
    for (const auto& r : j.at("herald_rates")) d.rates.push_back({r.at("eta_L").get<double>(), r.at("rate").get<double>()});
    j.at("rounded_distances_km").get_to(d.rounded_distances_km);
    d.overlap = measured(j.at("overlap"));
    j.at("events").at("scan").get_to(d.events_scan);
    j.at("events").at("zero").get_to(d.events_zero);
    return d;
  } catch (const json::exception& e) {
    throw ConfigError("malformed reference data " + path + ": " + e.what());
  }
}

}  // namespace hpa
