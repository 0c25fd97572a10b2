#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "isomed/errors.hpp"
#include "isomed/isotonic.hpp"
#include "isomed/parallel.hpp"
#include "isomed/rng.hpp"
#include "isomed/student_t.hpp"

namespace isomed {

/// Design and Monte Carlo parameters for critical-value calibration.
struct CalibrationConfig {
  double alpha = 0.05;
  double delta = 0.0;
  std::vector<long> sizes;  // n_0..n_k
  long nu = 0;
  std::size_t replicates = 100000;
  std::uint64_t seed = 0;

  int k() const { return static_cast<int>(sizes.size()) - 1; }

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 0.5))
      throw ArgumentError("CalibrationConfig: alpha must be in (0, 0.5]");
    if (!(delta >= 0.0)) throw ArgumentError("CalibrationConfig: delta must be nonnegative");
    if (sizes.size() < 2)
      throw ArgumentError("CalibrationConfig: need control plus at least one treatment size");
    for (long n : sizes)
      if (n < 1) throw ArgumentError("CalibrationConfig: sizes must be positive");
    if (nu < 1) throw ArgumentError("CalibrationConfig: nu must be >= 1");
    if (replicates < 1000) throw ArgumentError("CalibrationConfig: replicates must be >= 1000");
  }
};

/// Nested step-up cutoffs c_1..c_k with their Monte Carlo uncertainty.
struct CriticalValues {
  std::vector<double> c;
  std::vector<double> standard_errors;
  CalibrationConfig config;
};

struct LevelEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// One replicate at the stage-i least favorable configuration: the first i
/// treatment means sit exactly delta above the control and the rest are at
/// +infinity. Groups above i can never pool downward, so fitting groups
/// 1..i alone is exact, not an approximation. Returns the studentized
/// statistics (mu_hat_j - Y0 - delta)/S for j = 1..i; sigma = 1 costs no
/// generality because the statistics are scale-free.
inline std::vector<double> simulate_lfc_replicate(int i, const CalibrationConfig& cfg,
                                                  std::uint64_t replicate_seed,
                                                  double sigma = 1.0) {
  if (i < 1 || i > cfg.k())
    throw ArgumentError("simulate_lfc_replicate: stage " + std::to_string(i) +
                        " outside 1..k=" + std::to_string(cfg.k()));
  Rng rng(replicate_seed);
  const double y0 = sigma * rng.next_normal() / std::sqrt(static_cast<double>(cfg.sizes[0]));
  WeightedMeans groups;
  groups.means.resize(i);
  groups.weights.resize(i);
  for (int j = 1; j <= i; ++j) {
    groups.means[j - 1] =
        cfg.delta + sigma * rng.next_normal() / std::sqrt(static_cast<double>(cfg.sizes[j]));
    groups.weights[j - 1] = static_cast<double>(cfg.sizes[j]);
  }
  const double s =
      sigma * std::sqrt(rng.next_chi_square(cfg.nu) / static_cast<double>(cfg.nu));
  const IsotonicFit fit = sdmmsa_fit(groups);
  std::vector<double> stats(i);
  for (int j = 0; j < i; ++j) stats[j] = (fit.fitted[j] - y0 - cfg.delta) / s;
  return stats;
}

/// Calibrates the nested cutoffs. c_1 is analytic; each later c_i is the
/// conditional empirical quantile of statistic_i among replicates not
/// already captured by the earlier regions, chosen so the estimated union
/// probability under the stage-i least favorable configuration equals
/// alpha. Deterministic for a fixed (config, seed) at any thread count.
inline CriticalValues calibrate(const CalibrationConfig& cfg, int threads = 1) {
  cfg.validate();
  const int k = cfg.k();
  const std::size_t n_rep = cfg.replicates;

  CriticalValues cv;
  cv.config = cfg;
  cv.c.assign(k, 0.0);
  cv.standard_errors.assign(k, 0.0);
  cv.c[0] = t_quantile(cfg.alpha, cfg.nu) *
            std::sqrt(1.0 / static_cast<double>(cfg.sizes[1]) +
                      1.0 / static_cast<double>(cfg.sizes[0]));

  std::vector<std::uint8_t> captured(n_rep);
  std::vector<double> stat(n_rep);
  for (int i = 2; i <= k; ++i) {
    parallel_for(n_rep, threads, [&](std::size_t r) {
      const auto stats = simulate_lfc_replicate(i, cfg, derive_seed(cfg.seed, i, r));
      bool cap = false;
      for (int j = 0; j + 1 < i; ++j) cap = cap || stats[j] > cv.c[j];
      captured[r] = cap ? 1 : 0;
      stat[r] = stats[i - 1];
    });
    std::size_t n_captured = 0;
    for (std::uint8_t f : captured) n_captured += f;
    const double target_exceed =
        cfg.alpha * static_cast<double>(n_rep) - static_cast<double>(n_captured);
    if (target_exceed < 0.0)
      throw CalibrationError(
          "calibrate: at stage " + std::to_string(i) + " the union of the first " +
          std::to_string(i - 1) + " rejection regions already has estimated probability " +
          std::to_string(static_cast<double>(n_captured) / static_cast<double>(n_rep)) +
          " > alpha = " + std::to_string(cfg.alpha) + "; inputs are inconsistent");
    std::vector<double> survivors;
    survivors.reserve(n_rep - n_captured);
    for (std::size_t r = 0; r < n_rep; ++r)
      if (!captured[r]) survivors.push_back(stat[r]);
    if (survivors.empty())
      throw CalibrationError("calibrate: no replicates escaped the earlier regions at stage " +
                             std::to_string(i));
    std::sort(survivors.begin(), survivors.end());
    const std::size_t m = survivors.size();
    std::size_t idx =
        static_cast<std::size_t>(std::ceil(static_cast<double>(m) - target_exceed));
    idx = std::max<std::size_t>(1, std::min(m, idx));
    cv.c[i - 1] = survivors[idx - 1];

    // order-statistic bracket one binomial sd on each side of the quantile
    const double p = static_cast<double>(idx) / static_cast<double>(m);
    const std::size_t d = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m) * p * (1.0 - p)))));
    const std::size_t lo = idx > d ? idx - d : 1;
    const std::size_t hi = std::min(m, idx + d);
    cv.standard_errors[i - 1] = 0.5 * (survivors[hi - 1] - survivors[lo - 1]);
  }
  return cv;
}

/// Fresh-seed Monte Carlo estimate of the stage-i rejection probability
/// P(union of {statistic_j > c_j}, j <= i) at the stage-i least favorable
/// configuration.
inline LevelEstimate verify_level(int i, const CriticalValues& cv, std::size_t replicates,
                                  std::uint64_t seed, int threads = 1) {
  if (i < 1 || i > cv.config.k())
    throw ArgumentError("verify_level: stage " + std::to_string(i) + " outside 1..k=" +
                        std::to_string(cv.config.k()));
  if (replicates == 0) throw ArgumentError("verify_level: replicates must be positive");
  std::vector<std::uint8_t> hit(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    const auto stats = simulate_lfc_replicate(i, cv.config, derive_seed(seed, i, r));
    bool h = false;
    for (int j = 0; j < i; ++j) h = h || stats[j] > cv.c[j];
    hit[r] = h ? 1 : 0;
  });
  std::size_t count = 0;
  for (std::uint8_t f : hit) count += f;
  LevelEstimate est;
  est.estimate = static_cast<double>(count) / static_cast<double>(replicates);
  est.standard_error =
      std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(replicates));
  return est;
}

}  // namespace isomed
