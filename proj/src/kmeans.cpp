#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "chdet/error.hpp"
#include "chdet/segment.hpp"

namespace chdet {

namespace {

std::vector<double> initial_centers(std::span<const double> x, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> centers;
  std::vector<std::size_t> leftovers;
  for (std::size_t idx : order) {
    if (centers.size() == k) break;
    if (std::find(centers.begin(), centers.end(), x[idx]) == centers.end()) {
      centers.push_back(x[idx]);
    } else {
      leftovers.push_back(idx);
    }
  }
  // Fewer distinct values than clusters: fall back to repeated values.
  for (std::size_t i = 0; centers.size() < k; ++i) centers.push_back(x[leftovers[i]]);
  return centers;
}

std::size_t nearest(double value, const std::vector<double>& centers) {
  std::size_t best = 0;
  double best_dist = std::abs(value - centers[0]);
  for (std::size_t j = 1; j < centers.size(); ++j) {
    const double d = std::abs(value - centers[j]);
    if (d < best_dist) {
      best = j;
      best_dist = d;
    }
  }
  return best;
}

void recompute_centers(std::span<const double> x, const std::vector<std::size_t>& labels,
                       std::vector<double>& centers, std::vector<std::size_t>& counts) {
  std::vector<double> sums(centers.size(), 0.0);
  std::fill(counts.begin(), counts.end(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    sums[labels[i]] += x[i];
    ++counts[labels[i]];
  }
  for (std::size_t j = 0; j < centers.size(); ++j) {
    if (counts[j] > 0) centers[j] = sums[j] / static_cast<double>(counts[j]);
  }
}

}  // namespace

KMeansResult kmeans(std::span<const double> x, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k-means needs at least one cluster");
  if (x.size() < k) {
    throw Error(ErrorCode::TooFewPoints,
                std::to_string(x.size()) + " points for " + std::to_string(k) + " clusters");
  }
  for (double value : x) {
    if (!std::isfinite(value)) throw Error(ErrorCode::NonFiniteInput, "k-means input");
  }

  KMeansResult result;
  result.centers = initial_centers(x, k, seed);
  result.labels.assign(x.size(), 0);
  std::vector<std::size_t> counts(k, 0);

  bool first = true;
  while (result.iterations < max_iter) {
    bool changed = first;
    first = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::size_t label = nearest(x[i], result.centers);
      if (label != result.labels[i]) {
        result.labels[i] = label;
        changed = true;
      }
    }
    ++result.iterations;
    if (!changed) break;

    recompute_centers(x, result.labels, result.centers, counts);
    bool reseeded = false;
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] > 0) continue;
      std::size_t far = 0;
      double far_dist = -1.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = std::abs(x[i] - result.centers[result.labels[i]]);
        if (d > far_dist) {
          far = i;
          far_dist = d;
        }
      }
      // Every point already sits on its center; nothing to steal.
      if (far_dist <= 0.0) continue;
      --counts[result.labels[far]];
      result.labels[far] = j;
      counts[j] = 1;
      result.centers[j] = x[far];
      reseeded = true;
    }
    if (reseeded) recompute_centers(x, result.labels, result.centers, counts);
  }
  return result;
}

}  // namespace chdet
