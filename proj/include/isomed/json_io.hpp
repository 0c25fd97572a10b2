#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "isomed/calibration.hpp"
#include "isomed/errors.hpp"
#include "isomed/med.hpp"
#include "isomed/simulate.hpp"

namespace isomed {

using json = nlohmann::json;

namespace detail {

template <class T>
T require_field(const json& j, const std::string& key, const std::string& context) {
  if (!j.contains(key)) throw DataError(context + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(context + ": field '" + key + "': " + e.what());
  }
}

}  // namespace detail

inline json to_json(const CriticalValues& cv) {
  return json{{"alpha", cv.config.alpha},
              {"delta", cv.config.delta},
              {"sizes", cv.config.sizes},
              {"nu", cv.config.nu},
              {"replicates", cv.config.replicates},
              {"seed", cv.config.seed},
              {"c", cv.c},
              {"se", cv.standard_errors}};
}

inline CriticalValues critical_values_from_json(const json& j) {
  const std::string ctx = "critical values";
  CriticalValues cv;
  cv.config.alpha = detail::require_field<double>(j, "alpha", ctx);
  cv.config.delta = detail::require_field<double>(j, "delta", ctx);
  cv.config.sizes = detail::require_field<std::vector<long>>(j, "sizes", ctx);
  cv.config.nu = detail::require_field<long>(j, "nu", ctx);
  cv.config.replicates = detail::require_field<std::size_t>(j, "replicates", ctx);
  cv.config.seed = detail::require_field<std::uint64_t>(j, "seed", ctx);
  cv.c = detail::require_field<std::vector<double>>(j, "c", ctx);
  cv.standard_errors = detail::require_field<std::vector<double>>(j, "se", ctx);
  if (cv.c.size() != cv.standard_errors.size() ||
      cv.c.size() + 1 != cv.config.sizes.size())
    throw DataError(ctx + ": inconsistent lengths of sizes, c and se");
  return cv;
}

inline void save_critical_values(const CriticalValues& cv, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << to_json(cv).dump(2) << "\n";
}

inline CriticalValues load_critical_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open critical-values file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("critical-values file '" + path + "': " + e.what());
  }
  return critical_values_from_json(j);
}

inline json to_json(const MedDecision& d) {
  json j{{"method", d.method},
         {"statistics", d.statistics},
         {"cutoffs", d.cutoffs},
         {"rejected", d.rejected}};
  if (d.med)
    j["med"] = *d.med;
  else
    j["med"] = nullptr;
  return j;
}

inline json to_json(const MethodStudyResult& r) {
  return json{{"error_rate", r.error_rate.estimate},
              {"error_rate_se", r.error_rate.standard_error},
              {"correct_med_rate", r.correct_med_rate.estimate},
              {"correct_med_rate_se", r.correct_med_rate.standard_error},
              {"med_mass", r.med_mass},
              {"assert_at_most", r.assert_at_most}};
}

inline json to_json(const StudyResult& r) {
  json j{{"replicates", r.replicates}, {"step_up", to_json(r.step_up)}};
  if (r.true_med > 0)
    j["true_med"] = r.true_med;
  else
    j["true_med"] = nullptr;
  if (r.hsu_berger) j["hsu_berger"] = to_json(*r.hsu_berger);
  return j;
}

inline json to_json(const OrderingReport& r) {
  return json{{"bump_index", r.bump_index},
              {"bumps", r.bumps},
              {"replicates", r.replicates},
              {"grid", r.grid},
              {"exceed_prob", r.exceed_prob},
              {"pathwise_violations", r.pathwise_violations},
              {"dominance_ok", r.dominance_ok}};
}

inline ScenarioConfig scenario_from_json(const json& j) {
  const std::string ctx = "scenario";
  ScenarioConfig sc;
  sc.mu = detail::require_field<std::vector<double>>(j, "mu", ctx);
  sc.sigma = detail::require_field<double>(j, "sigma", ctx);
  sc.sizes = detail::require_field<std::vector<long>>(j, "sizes", ctx);
  sc.delta = detail::require_field<double>(j, "delta", ctx);
  sc.alpha = detail::require_field<double>(j, "alpha", ctx);
  sc.replicates = detail::require_field<std::size_t>(j, "replicates", ctx);
  sc.seed = detail::require_field<std::uint64_t>(j, "seed", ctx);
  try {
    sc.validate();
  } catch (const ArgumentError& e) {
    throw DataError(ctx + ": " + e.what());
  }
  return sc;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scenario file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("scenario file '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace isomed
