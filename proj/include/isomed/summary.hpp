#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isomed/errors.hpp"
#include "isomed/isotonic.hpp"

namespace isomed {

/// One dose group reduced to its sufficient summary.
struct GroupSummary {
  std::string label;
  long n = 0;
  double mean = 0.0;
  std::optional<double> sd;  // needs n >= 2

  void validate() const {
    if (n < 1) throw DataError("group '" + label + "': sample size must be >= 1");
    if (sd) {
      if (n < 2) throw DataError("group '" + label + "': an sd requires n >= 2");
      if (!(*sd >= 0.0)) throw DataError("group '" + label + "': sd must be nonnegative");
    }
  }
};

/// Control plus ordered treatment groups with the pooled error estimate.
struct DoseResponseData {
  GroupSummary control;
  std::vector<GroupSummary> treatments;
  double s = 0.0;  // pooled standard deviation
  long nu = 0;     // error degrees of freedom

  int k() const { return static_cast<int>(treatments.size()); }

  WeightedMeans treatment_means() const {
    WeightedMeans wm;
    wm.means.reserve(treatments.size());
    wm.weights.reserve(treatments.size());
    for (const auto& g : treatments) {
      wm.means.push_back(g.mean);
      wm.weights.push_back(static_cast<double>(g.n));
    }
    return wm;
  }

  std::vector<long> sizes() const {
    std::vector<long> out;
    out.reserve(treatments.size() + 1);
    out.push_back(control.n);
    for (const auto& g : treatments) out.push_back(g.n);
    return out;
  }

  void validate() const {
    control.validate();
    if (treatments.empty()) throw DataError("need at least one treatment group");
    for (const auto& g : treatments) g.validate();
    if (!(s > 0.0)) throw DataError("pooled standard deviation must be positive");
    if (nu < 1) throw DataError("error degrees of freedom must be >= 1");
  }
};

/// Pooled (s, nu) from per-group summaries: nu = sum(n_i - 1),
/// s^2 = sum((n_i - 1) sd_i^2) / nu.
inline std::pair<double, long> pool_from_summaries(const std::vector<GroupSummary>& groups) {
  if (groups.empty()) throw DataError("pool_from_summaries: no groups");
  long nu = 0;
  detail::CompensatedSum ss;
  for (const auto& g : groups) {
    if (g.n < 2 || !g.sd)
      throw DataError("pool_from_summaries: group '" + g.label + "' needs n >= 2 and an sd");
    nu += g.n - 1;
    ss.add(static_cast<double>(g.n - 1) * (*g.sd) * (*g.sd));
  }
  return {std::sqrt(ss.value() / static_cast<double>(nu)), nu};
}

/// Assemble a DoseResponseData from summaries, pooling s over all groups.
inline DoseResponseData make_dose_response(GroupSummary control,
                                           std::vector<GroupSummary> treatments) {
  std::vector<GroupSummary> all;
  all.reserve(treatments.size() + 1);
  all.push_back(control);
  for (const auto& g : treatments) all.push_back(g);
  const auto [s, nu] = pool_from_summaries(all);
  DoseResponseData data{std::move(control), std::move(treatments), s, nu};
  data.validate();
  return data;
}

/// Reduce raw observations (group index, value) to sufficient statistics.
/// Group 0 is the control; nu = total n - (k + 1).
inline DoseResponseData summarize_raw(const std::vector<std::pair<int, double>>& observations) {
  if (observations.empty()) throw DataError("summarize_raw: no observations");
  int k = 0;
  for (const auto& [g, v] : observations) {
    if (g < 0) throw DataError("summarize_raw: negative group index " + std::to_string(g));
    if (g > k) k = g;
  }
  if (k < 1) throw DataError("summarize_raw: need at least one treatment group besides group 0");

  std::vector<long> n(k + 1, 0);
  std::vector<detail::CompensatedSum> sums(k + 1);
  for (const auto& [g, v] : observations) {
    ++n[g];
    sums[g].add(v);
  }
  std::vector<double> means(k + 1);
  long total = 0;
  for (int g = 0; g <= k; ++g) {
    if (n[g] == 0)
      throw DataError("summarize_raw: group " + std::to_string(g) + " has no observations");
    means[g] = sums[g].value() / static_cast<double>(n[g]);
    total += n[g];
  }
  const long nu = total - (k + 1);
  if (nu < 1)
    throw DataError("summarize_raw: no residual degrees of freedom (every group has one value)");

  detail::CompensatedSum pooled_ss;
  std::vector<detail::CompensatedSum> group_ss(k + 1);
  for (const auto& [g, v] : observations) {
    const double d = v - means[g];
    pooled_ss.add(d * d);
    group_ss[g].add(d * d);
  }
  const double s2 = pooled_ss.value() / static_cast<double>(nu);
  if (!(s2 > 0.0)) throw DataError("summarize_raw: zero residual variance");

  auto make_group = [&](int g) {
    GroupSummary gs{std::to_string(g), n[g], means[g], std::nullopt};
    if (n[g] >= 2) gs.sd = std::sqrt(group_ss[g].value() / static_cast<double>(n[g] - 1));
    return gs;
  };
  DoseResponseData data;
  data.control = make_group(0);
  for (int g = 1; g <= k; ++g) data.treatments.push_back(make_group(g));
  data.s = std::sqrt(s2);
  data.nu = nu;
  data.validate();
  return data;
}

}  // namespace isomed
