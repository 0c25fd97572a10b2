#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "isomed/errors.hpp"

namespace isomed {

namespace detail {

/// Kahan-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace detail

/// Group means with positive weights (the group sample sizes).
struct WeightedMeans {
  std::vector<double> means;
  std::vector<double> weights;

  int size() const { return static_cast<int>(means.size()); }

  void validate() const {
    if (means.empty() || means.size() != weights.size())
      throw ArgumentError("WeightedMeans: means and weights must have equal nonzero length");
    for (double w : weights)
      if (!(w > 0.0)) throw ArgumentError("WeightedMeans: weights must be positive");
  }
};

/// Closed interval [lo, hi] of 1-based group indices.
struct Block {
  int lo = 0;
  int hi = 0;
  friend bool operator==(const Block& a, const Block& b) { return a.lo == b.lo && a.hi == b.hi; }
};

/// Nondecreasing fit plus the level-set partition that produced it.
/// Blocks are stored in discovery order (rightmost block first);
/// blocks_left_to_right() gives the natural reading order.
struct IsotonicFit {
  std::vector<double> fitted;
  std::vector<Block> blocks;
  std::vector<double> block_means;  // parallel to blocks

  std::vector<Block> blocks_left_to_right() const {
    return std::vector<Block>(blocks.rbegin(), blocks.rend());
  }

  /// 1-based ordinal, counting left to right, of the block containing group i.
  int block_ordinal(int i) const {
    const int h = static_cast<int>(blocks.size());
    for (int u = 0; u < h; ++u)
      if (blocks[u].lo <= i && i <= blocks[u].hi) return h - u;
    throw ArgumentError("IsotonicFit::block_ordinal: index " + std::to_string(i) +
                        " not covered by the partition");
  }
};

/// Weighted mean of groups i through j (1-based, inclusive). A range of
/// equal means returns that value exactly, so singleton and constant blocks
/// never pick up rounding.
inline double combined_mean(const WeightedMeans& data, int i, int j) {
  if (i < 1 || j > data.size() || i > j)
    throw ArgumentError("combined_mean: need 1 <= i <= j <= k, got i=" + std::to_string(i) +
                        ", j=" + std::to_string(j) + ", k=" + std::to_string(data.size()));
  bool constant = true;
  for (int h = i + 1; h <= j && constant; ++h)
    constant = data.means[h - 1] == data.means[i - 1];
  if (constant) return data.means[i - 1];
  detail::CompensatedSum num, den;
  for (int h = i; h <= j; ++h) {
    num.add(data.weights[h - 1] * data.means[h - 1]);
    den.add(data.weights[h - 1]);
  }
  return num.value() / den.value();
}

namespace detail {

/// Assemble an IsotonicFit from a vector already constant on its level sets.
/// Runs of exactly equal values become blocks; block means are recomputed
/// from the raw data so every stored value is the weighted mean of its block.
inline IsotonicFit fit_from_level_sets(const WeightedMeans& data, const std::vector<double>& values) {
  const int k = static_cast<int>(values.size());
  std::vector<Block> runs;
  int lo = 1;
  for (int i = 2; i <= k + 1; ++i) {
    if (i == k + 1 || values[i - 1] != values[lo - 1]) {
      runs.push_back({lo, i - 1});
      lo = i;
    }
  }
  IsotonicFit fit;
  fit.fitted.assign(k, 0.0);
  for (auto it = runs.rbegin(); it != runs.rend(); ++it) {
    const double m = combined_mean(data, it->lo, it->hi);
    for (int i = it->lo; i <= it->hi; ++i) fit.fitted[i - 1] = m;
    fit.blocks.push_back(*it);
    fit.block_means.push_back(m);
  }
  return fit;
}

}  // namespace detail

/// Isotonic (nondecreasing) weighted least-squares fit by repeated selection
/// of the maximal tail mean. Each pass scans the remaining prefix for the
/// largest combined mean ending at its top group; ties resolve to the
/// smallest index and the winning interval becomes the next block.
///
/// Maximal runs of exactly equal means are pooled into pseudo-groups up
/// front. Equal neighbors always share a block, and collapsing them first
/// keeps the tie comparisons exact instead of hostage to summation order.
inline IsotonicFit sdmmsa_fit(const WeightedMeans& data) {
  data.validate();
  const int k = data.size();

  std::vector<int> run_lo, run_hi;  // 1-based original indices per pseudo-group
  std::vector<double> run_mean, run_weight;
  int lo = 1;
  for (int i = 2; i <= k + 1; ++i) {
    if (i == k + 1 || data.means[i - 1] != data.means[lo - 1]) {
      run_lo.push_back(lo);
      run_hi.push_back(i - 1);
      run_mean.push_back(data.means[lo - 1]);
      detail::CompensatedSum w;
      for (int h = lo; h <= i - 1; ++h) w.add(data.weights[h - 1]);
      run_weight.push_back(w.value());
      lo = i;
    }
  }

  IsotonicFit fit;
  fit.fitted.assign(k, 0.0);
  int top = static_cast<int>(run_mean.size());
  while (top >= 1) {
    detail::CompensatedSum num, den;
    int best_g = top;
    double best_mean = 0.0;
    for (int g = top; g >= 1; --g) {
      num.add(run_weight[g - 1] * run_mean[g - 1]);
      den.add(run_weight[g - 1]);
      const double tail_mean = g == top ? run_mean[g - 1] : num.value() / den.value();
      // scanning right to left, >= lands on the smallest maximizing index
      if (g == top || tail_mean >= best_mean) {
        best_mean = tail_mean;
        best_g = g;
      }
    }
    const Block block{run_lo[best_g - 1], run_hi[top - 1]};
    const double block_mean = combined_mean(data, block.lo, block.hi);
    for (int i = block.lo; i <= block.hi; ++i) fit.fitted[i - 1] = block_mean;
    fit.blocks.push_back(block);
    fit.block_means.push_back(block_mean);
    top = best_g - 1;
  }
  return fit;
}

/// Pooled-adjacent-violators fit: scan left to right, pool the maximal
/// constant runs around the first decreasing pair, repeat until the vector
/// is nondecreasing.
inline IsotonicFit pava_fit(const WeightedMeans& data) {
  data.validate();
  const int k = data.size();
  std::vector<double> a = data.means;
  for (;;) {
    int viol = -1;
    for (int t = 0; t + 1 < k; ++t) {
      if (a[t] > a[t + 1]) {
        viol = t;
        break;
      }
    }
    if (viol < 0) break;
    int lo = viol;
    while (lo > 0 && a[lo - 1] == a[viol]) --lo;
    int up = viol + 1;
    while (up + 1 < k && a[up + 1] == a[viol + 1]) ++up;
    detail::CompensatedSum num, den;
    for (int t = lo; t <= up; ++t) {
      num.add(data.weights[t] * a[t]);
      den.add(data.weights[t]);
    }
    const double pooled = num.value() / den.value();
    for (int t = lo; t <= up; ++t) a[t] = pooled;
  }
  return detail::fit_from_level_sets(data, a);
}

/// Exact reference fit by exhaustive enumeration of all consecutive-block
/// partitions: keeps partitions with nondecreasing block means and returns
/// the one with the smallest weighted sum of squares. O(2^(k-1)).
inline IsotonicFit oracle_fit(const WeightedMeans& data) {
  data.validate();
  const int k = data.size();
  if (k > 20)
    throw CapacityError("oracle_fit: enumeration supports k <= 20 groups, got k=" +
                        std::to_string(k));
  const std::uint32_t n_masks = k == 1 ? 1u : (1u << (k - 1));
  std::vector<double> cand(k), best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
    // bit t-1 set: block boundary after position t
    bool feasible = true;
    double prev = -std::numeric_limits<double>::infinity();
    int lo = 1;
    for (int t = 1; t <= k; ++t) {
      if (t == k || ((mask >> (t - 1)) & 1u)) {
        const double m = combined_mean(data, lo, t);
        if (m < prev) {
          feasible = false;
          break;
        }
        for (int i = lo; i <= t; ++i) cand[i - 1] = m;
        prev = m;
        lo = t + 1;
      }
    }
    if (!feasible) continue;
    detail::CompensatedSum sse;
    for (int i = 0; i < k; ++i) {
      const double d = data.means[i] - cand[i];
      sse.add(data.weights[i] * d * d);
    }
    if (sse.value() < best_sse) {
      best_sse = sse.value();
      best = cand;
    }
  }
  return detail::fit_from_level_sets(data, best);
}

}  // namespace isomed
