#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isomed/calibration.hpp"
#include "isomed/errors.hpp"
#include "isomed/isotonic.hpp"
#include "isomed/student_t.hpp"
#include "isomed/summary.hpp"

namespace isomed {

/// Step trajectory of studentized statistics and the asserted MED.
struct MedDecision {
  std::string method;
  std::vector<double> statistics;
  std::vector<double> cutoffs;
  std::optional<int> med;     // 1-based dose index, absent when nothing rejects
  std::vector<int> rejected;  // {med..k}, empty when med absent
};

namespace detail {

/// Scan upward; the first strict exceedance fixes the MED and rejects every
/// larger dose. Ties with the cutoff do not reject.
inline MedDecision first_exceedance(std::string method, std::vector<double> statistics,
                                    std::vector<double> cutoffs) {
  MedDecision d{std::move(method), std::move(statistics), std::move(cutoffs), std::nullopt, {}};
  const int k = static_cast<int>(d.statistics.size());
  for (int i = 1; i <= k; ++i) {
    if (d.statistics[i - 1] > d.cutoffs[i - 1]) {
      d.med = i;
      for (int j = i; j <= k; ++j) d.rejected.push_back(j);
      break;
    }
  }
  return d;
}

}  // namespace detail

/// Step-up test on the isotonic estimates: statistic_i = (mu_hat_i - Y0 -
/// delta)/S against the calibrated cutoffs. Because both sequences are
/// nested, asserting at the first exceedance is the same as asserting every
/// H_Ai whose union region occurs.
inline MedDecision step_up_identify_med(const DoseResponseData& data, const CriticalValues& cv,
                                        double delta) {
  data.validate();
  const int k = data.k();
  if (static_cast<int>(cv.c.size()) != k)
    throw ArgumentError("step_up_identify_med: data has " + std::to_string(k) +
                        " treatments but the critical values cover " +
                        std::to_string(cv.c.size()));
  const IsotonicFit fit = sdmmsa_fit(data.treatment_means());
  std::vector<double> stats(k);
  for (int i = 0; i < k; ++i) stats[i] = (fit.fitted[i] - data.control.mean - delta) / data.s;
  return detail::first_exceedance("step_up", std::move(stats), cv.c);
}

/// Step-down comparator: T_j indicates whether every dose from j upward
/// clears the control by delta in studentized units. The reported statistic
/// for step j is the running minimum over doses j..k.
inline MedDecision hsu_berger_med(const DoseResponseData& data, double delta, double alpha) {
  data.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("hsu_berger_med: alpha must be in (0, 1)");
  const int k = data.k();
  const double cut = t_quantile(alpha, data.nu);
  std::vector<double> stats(k);
  double running = std::numeric_limits<double>::infinity();
  for (int j = k; j >= 1; --j) {
    const GroupSummary& g = data.treatments[j - 1];
    const double z = (g.mean - data.control.mean - delta) /
                     (data.s * std::sqrt(1.0 / static_cast<double>(g.n) +
                                         1.0 / static_cast<double>(data.control.n)));
    running = std::min(running, z);
    stats[j - 1] = running;
  }
  return detail::first_exceedance("hsu_berger", std::move(stats),
                                  std::vector<double>(k, cut));
}

/// Region containment behind the MED=1 power comparison: whenever the
/// step-down comparator asserts MED = 1 on a balanced design, the step-up
/// statistic must clear c_1 as well.
inline bool dominance_check_med1(const DoseResponseData& data, const CriticalValues& cv,
                                 double delta, double alpha) {
  data.validate();
  for (const auto& g : data.treatments)
    if (g.n != data.treatments.front().n)
      throw ArgumentError("dominance_check_med1: treatment sample sizes must be equal");
  const MedDecision hb = hsu_berger_med(data, delta, alpha);
  if (!(hb.med && *hb.med == 1)) return true;
  const MedDecision su = step_up_identify_med(data, cv, delta);
  return su.statistics[0] > cv.c[0];
}

/// Throws DesignMismatchError unless the critical values were calibrated
/// for exactly this data layout and test parameters.
inline void check_design_match(const DoseResponseData& data, const CriticalValues& cv,
                               double delta, double alpha) {
  std::string diff;
  if (cv.config.k() != data.k())
    diff += " k (data " + std::to_string(data.k()) + ", cutoffs " +
            std::to_string(cv.config.k()) + ");";
  else {
    const auto sizes = data.sizes();
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (sizes[i] != cv.config.sizes[i]) {
        diff += " group sizes;";
        break;
      }
    }
  }
  if (data.nu != cv.config.nu)
    diff += " nu (data " + std::to_string(data.nu) + ", cutoffs " +
            std::to_string(cv.config.nu) + ");";
  if (alpha != cv.config.alpha) diff += " alpha;";
  if (delta != cv.config.delta) diff += " delta;";
  if (!diff.empty())
    throw DesignMismatchError("critical values do not match the data design:" + diff);
}

}  // namespace isomed
