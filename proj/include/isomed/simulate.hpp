#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isomed/calibration.hpp"
#include "isomed/errors.hpp"
#include "isomed/med.hpp"
#include "isomed/parallel.hpp"
#include "isomed/rng.hpp"
#include "isomed/summary.hpp"

namespace isomed {

/// True-parameter scenario for Monte Carlo studies.
struct ScenarioConfig {
  std::vector<double> mu;  // mu_0..mu_k; mu_1..mu_k nondecreasing
  double sigma = 1.0;
  std::vector<long> sizes;  // n_0..n_k
  double delta = 0.0;
  double alpha = 0.05;
  std::size_t replicates = 100000;
  std::uint64_t seed = 0;

  int k() const { return static_cast<int>(mu.size()) - 1; }

  long nu() const {
    long total = 0;
    for (long n : sizes) total += n;
    return total - static_cast<long>(sizes.size());
  }

  /// Smallest dose with mu_i > mu_0 + delta; 0 when none qualifies.
  int true_med() const {
    for (int i = 1; i <= k(); ++i)
      if (mu[i] > mu[0] + delta) return i;
    return 0;
  }

  void validate() const {
    if (mu.size() < 2) throw ArgumentError("ScenarioConfig: need mu_0 plus at least one dose");
    if (mu.size() != sizes.size())
      throw ArgumentError("ScenarioConfig: mu and sizes must have equal length");
    for (int i = 2; i <= k(); ++i)
      if (mu[i] < mu[i - 1])
        throw ArgumentError("ScenarioConfig: treatment means must be nondecreasing (mu_" +
                            std::to_string(i - 1) + " > mu_" + std::to_string(i) + ")");
    if (!(sigma > 0.0)) throw ArgumentError("ScenarioConfig: sigma must be positive");
    for (long n : sizes)
      if (n < 1) throw ArgumentError("ScenarioConfig: sizes must be positive");
    if (nu() < 1) throw ArgumentError("ScenarioConfig: design leaves no error degrees of freedom");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("ScenarioConfig: alpha must be in (0, 1)");
    if (!(delta >= 0.0)) throw ArgumentError("ScenarioConfig: delta must be nonnegative");
    if (replicates == 0) throw ArgumentError("ScenarioConfig: replicates must be positive");
  }
};

struct RateEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

struct MethodStudyResult {
  RateEstimate error_rate;        // any assertion below the true MED
  RateEstimate correct_med_rate;  // asserted exactly the true MED (or nothing when none exists)
  std::vector<double> med_mass;   // index 0 = no assertion, 1..k = asserted dose; sums to 1
  std::vector<double> assert_at_most;  // P(asserted MED <= j) for j = 1..k
};

struct StudyResult {
  std::size_t replicates = 0;
  int true_med = 0;  // 0 = none
  MethodStudyResult step_up;
  std::optional<MethodStudyResult> hsu_berger;
};

namespace detail {

/// Sufficient statistics drawn from the one-way layout: group means plus an
/// independent pooled S with nu degrees of freedom.
inline DoseResponseData draw_dataset(const ScenarioConfig& sc, Rng& rng) {
  DoseResponseData data;
  data.control.n = sc.sizes[0];
  data.control.mean =
      sc.mu[0] + sc.sigma * rng.next_normal() / std::sqrt(static_cast<double>(sc.sizes[0]));
  const int k = sc.k();
  data.treatments.resize(k);
  for (int i = 1; i <= k; ++i) {
    data.treatments[i - 1].n = sc.sizes[i];
    data.treatments[i - 1].mean =
        sc.mu[i] + sc.sigma * rng.next_normal() / std::sqrt(static_cast<double>(sc.sizes[i]));
  }
  data.nu = sc.nu();
  data.s = sc.sigma * std::sqrt(rng.next_chi_square(data.nu) / static_cast<double>(data.nu));
  return data;
}

inline MethodStudyResult summarize_meds(const std::vector<std::int16_t>& meds, int k, int true_med) {
  const std::size_t n_rep = meds.size();
  std::vector<std::size_t> counts(k + 1, 0);
  for (std::int16_t m : meds) ++counts[m];
  std::size_t n_err = 0;
  for (int m = 1; m <= k; ++m)
    if (true_med == 0 || m < true_med) n_err += counts[m];
  const std::size_t n_correct = counts[true_med];  // true_med == 0 counts "no assertion"

  auto rate = [n_rep](std::size_t count) {
    RateEstimate r;
    r.estimate = static_cast<double>(count) / static_cast<double>(n_rep);
    r.standard_error =
        std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(n_rep));
    return r;
  };
  MethodStudyResult out;
  out.error_rate = rate(n_err);
  out.correct_med_rate = rate(n_correct);
  out.med_mass.resize(k + 1);
  for (int m = 0; m <= k; ++m)
    out.med_mass[m] = static_cast<double>(counts[m]) / static_cast<double>(n_rep);
  out.assert_at_most.resize(k);
  std::size_t cum = 0;
  for (int j = 1; j <= k; ++j) {
    cum += counts[j];
    out.assert_at_most[j - 1] = static_cast<double>(cum) / static_cast<double>(n_rep);
  }
  return out;
}

inline StudyResult run_study(const ScenarioConfig& sc, const CriticalValues& cv,
                             bool with_comparator, int threads) {
  sc.validate();
  if (cv.config.k() != sc.k() || cv.config.sizes != sc.sizes || cv.config.nu != sc.nu() ||
      cv.config.alpha != sc.alpha || cv.config.delta != sc.delta)
    throw DesignMismatchError("study scenario and critical values disagree on the design");
  const int k = sc.k();
  const std::size_t n_rep = sc.replicates;
  std::vector<std::int16_t> med_su(n_rep), med_hb(with_comparator ? n_rep : 0);
  parallel_for(n_rep, threads, [&](std::size_t r) {
    Rng rng(derive_seed(sc.seed, 0, r));
    const DoseResponseData data = draw_dataset(sc, rng);
    med_su[r] =
        static_cast<std::int16_t>(step_up_identify_med(data, cv, sc.delta).med.value_or(0));
    if (with_comparator)
      med_hb[r] =
          static_cast<std::int16_t>(hsu_berger_med(data, sc.delta, sc.alpha).med.value_or(0));
  });
  StudyResult result;
  result.replicates = n_rep;
  result.true_med = sc.true_med();
  result.step_up = summarize_meds(med_su, k, result.true_med);
  if (with_comparator) result.hsu_berger = summarize_meds(med_hb, k, result.true_med);
  return result;
}

}  // namespace detail

/// Experimentwise error study of the step-up procedure: per replicate, an
/// error is any assertion strictly below the true MED (every assertion is an
/// error when no dose is effective).
inline StudyResult run_error_study(const ScenarioConfig& sc, const CriticalValues& cv,
                                   int threads = 1) {
  return detail::run_study(sc, cv, false, threads);
}

/// Same draws fed to both the step-up test and the step-down comparator.
inline StudyResult run_power_study(const ScenarioConfig& sc, const CriticalValues& cv,
                                   int threads = 1) {
  return detail::run_study(sc, cv, true, threads);
}

struct OrderingReport {
  int bump_index = 0;
  std::vector<double> bumps;
  std::size_t replicates = 0;
  std::vector<std::vector<double>> grid;  // per estimator index: x values (base-fit deciles)
  std::vector<std::vector<std::vector<double>>> exceed_prob;  // [bump][estimator][x]
  std::size_t pathwise_violations = 0;  // raising mu_j lowered some fitted value
  bool dominance_ok = true;             // exceedance curves nondecreasing within 3 SE
};

/// Shifts mu_{bump_index} by each bump with common random numbers and
/// tracks the distribution of every fitted value. The deterministic half of
/// the ordering claim is checked pathwise; the stochastic half on a decile
/// grid.
inline OrderingReport run_ordering_study(const ScenarioConfig& base, int bump_index,
                                         const std::vector<double>& bumps, int threads = 1) {
  base.validate();
  const int k = base.k();
  if (bump_index < 1 || bump_index > k)
    throw ArgumentError("run_ordering_study: bump index outside 1..k");
  if (bumps.empty()) throw ArgumentError("run_ordering_study: need at least one bump");
  for (std::size_t b = 1; b < bumps.size(); ++b)
    if (bumps[b] < bumps[b - 1]) throw ArgumentError("run_ordering_study: bumps must be nondecreasing");

  const std::size_t n_rep = base.replicates;
  const std::size_t n_bumps = bumps.size();
  std::vector<std::vector<double>> fits(n_bumps, std::vector<double>(n_rep * k));
  std::atomic<std::size_t> violations{0};

  parallel_for(n_rep, threads, [&](std::size_t r) {
    Rng rng(derive_seed(base.seed, static_cast<std::uint64_t>(bump_index), r));
    WeightedMeans groups;
    groups.means.resize(k);
    groups.weights.resize(k);
    std::vector<double> noise(k);
    for (int i = 1; i <= k; ++i) {
      noise[i - 1] = base.sigma * rng.next_normal() / std::sqrt(static_cast<double>(base.sizes[i]));
      groups.weights[i - 1] = static_cast<double>(base.sizes[i]);
    }
    std::size_t local_violations = 0;
    for (std::size_t b = 0; b < n_bumps; ++b) {
      for (int i = 1; i <= k; ++i) groups.means[i - 1] = base.mu[i] + noise[i - 1];
      groups.means[bump_index - 1] += bumps[b];
      const IsotonicFit fit = sdmmsa_fit(groups);
      for (int i = 0; i < k; ++i) {
        fits[b][r * k + i] = fit.fitted[i];
        if (b > 0 && fit.fitted[i] < fits[b - 1][r * k + i] - 1e-12) ++local_violations;
      }
    }
    if (local_violations) violations += local_violations;
  });

  OrderingReport report;
  report.bump_index = bump_index;
  report.bumps = bumps;
  report.replicates = n_rep;
  report.pathwise_violations = violations.load();

  // decile grid of the base fits, one row per estimator
  report.grid.assign(k, {});
  std::vector<double> column(n_rep);
  for (int i = 0; i < k; ++i) {
    for (std::size_t r = 0; r < n_rep; ++r) column[r] = fits[0][r * k + i];
    std::sort(column.begin(), column.end());
    for (int q = 1; q <= 9; ++q)
      report.grid[i].push_back(column[std::min(n_rep - 1, n_rep * q / 10)]);
  }

  report.exceed_prob.assign(n_bumps, std::vector<std::vector<double>>(k));
  for (std::size_t b = 0; b < n_bumps; ++b) {
    for (int i = 0; i < k; ++i) {
      report.exceed_prob[b][i].resize(report.grid[i].size());
      for (std::size_t g = 0; g < report.grid[i].size(); ++g) {
        std::size_t count = 0;
        for (std::size_t r = 0; r < n_rep; ++r)
          if (fits[b][r * k + i] > report.grid[i][g]) ++count;
        report.exceed_prob[b][i][g] =
            static_cast<double>(count) / static_cast<double>(n_rep);
      }
    }
  }

  for (std::size_t b = 1; b < n_bumps && report.dominance_ok; ++b) {
    for (int i = 0; i < k && report.dominance_ok; ++i) {
      for (std::size_t g = 0; g < report.grid[i].size(); ++g) {
        const double p0 = report.exceed_prob[b - 1][i][g];
        const double p1 = report.exceed_prob[b][i][g];
        const double se = std::sqrt((p0 * (1.0 - p0) + p1 * (1.0 - p1)) /
                                    static_cast<double>(n_rep));
        if (p1 < p0 - 3.0 * se) {
          report.dominance_ok = false;
          break;
        }
      }
    }
  }
  return report;
}

}  // namespace isomed
