#include <cmath>
#include <random>
#include <string>

#include "chdet/error.hpp"
#include "chdet/segment.hpp"

namespace chdet {

MembershipMatrix::MembershipMatrix(std::size_t n, std::size_t c, double fill)
    : n_(n), c_(c), u_(n * c, fill) {}

MembershipMatrix::MembershipMatrix(std::size_t n, std::size_t c, std::vector<double> values)
    : n_(n), c_(c), u_(std::move(values)) {
  if (u_.size() != n_ * c_) {
    throw Error(ErrorCode::ShapeMismatch, "membership matrix " + std::to_string(n_) + "x" +
                                              std::to_string(c_) + " given " +
                                              std::to_string(u_.size()) + " values");
  }
}

void validate(const FcmConfig& cfg) {
  if (cfg.clusters < 2) throw Error(ErrorCode::InvalidArgument, "FCM needs at least 2 clusters");
  if (!(cfg.fuzziness > 1.0) || !std::isfinite(cfg.fuzziness)) {
    throw Error(ErrorCode::InvalidArgument, "fuzziness must be > 1");
  }
  if (!(cfg.eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (cfg.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
}

namespace {

double weight(double u, double m) { return m == 2.0 ? u * u : std::pow(u, m); }

MembershipMatrix random_memberships(std::size_t n, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MembershipMatrix u(n, c);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = u.row(i);
    double sum = 0.0;
    for (double& value : row) {
      value = unit(rng);
      sum += value;
    }
    for (double& value : row) value = sum > 0.0 ? value / sum : 1.0 / static_cast<double>(c);
  }
  return u;
}

void update_centers(std::span<const double> x, const MembershipMatrix& u, double m,
                    ClusterCenters& v) {
  const std::size_t c = u.clusters();
  // Weighted mean taken as an offset from the first sample, so identical
  // samples give back exactly their value.
  const double origin = x[0];
  std::vector<double> num(c, 0.0);
  std::vector<double> den(c, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto row = u.row(i);
    for (std::size_t j = 0; j < c; ++j) {
      const double w = weight(row[j], m);
      num[j] += w * (x[i] - origin);
      den[j] += w;
    }
  }
  for (std::size_t j = 0; j < c; ++j) {
    if (den[j] > 0.0) v[j] = origin + num[j] / den[j];
  }
}

// Writes the optimal memberships for fixed centers into `u`.
void update_memberships(std::span<const double> x, const ClusterCenters& v, double m,
                        MembershipMatrix& u) {
  const std::size_t c = v.size();
  const double exponent = 2.0 / (m - 1.0);
  std::vector<double> dist(c);
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto row = u.row(i);
    std::size_t nearest = 0;
    for (std::size_t j = 0; j < c; ++j) {
      dist[j] = std::abs(x[i] - v[j]);
      if (dist[j] < dist[nearest]) nearest = j;
    }
    if (dist[nearest] == 0.0) {
      for (std::size_t j = 0; j < c; ++j) row[j] = j == nearest ? 1.0 : 0.0;
      continue;
    }
    // Ratios against the nearest distance stay in (0, 1], so nothing overflows.
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      const double r = dist[nearest] / dist[j];
      row[j] = exponent == 2.0 ? r * r : std::pow(r, exponent);
      sum += row[j];
    }
    for (double& value : row) value /= sum;
  }
}

}  // namespace

FcmResult fcm(std::span<const double> x, const FcmConfig& cfg, const FcmObserver& observer) {
  validate(cfg);
  if (x.size() < cfg.clusters) {
    throw Error(ErrorCode::TooFewPoints, std::to_string(x.size()) + " points for " +
                                             std::to_string(cfg.clusters) + " clusters");
  }
  for (double value : x) {
    if (!std::isfinite(value)) throw Error(ErrorCode::NonFiniteInput, "FCM input");
  }

  FcmResult result;
  result.u = random_memberships(x.size(), cfg.clusters, cfg.seed);
  result.v.assign(cfg.clusters, 0.0);

  MembershipMatrix next(x.size(), cfg.clusters);
  while (result.iterations < cfg.max_iter) {
    update_centers(x, result.u, cfg.fuzziness, result.v);
    update_memberships(x, result.v, cfg.fuzziness, next);

    double change = 0.0;
    const auto before = result.u.values();
    const auto after = next.values();
    for (std::size_t k = 0; k < before.size(); ++k) {
      const double d = after[k] - before[k];
      change += d * d;
    }
    std::swap(result.u, next);
    ++result.iterations;
    if (observer) observer(result.iterations, result.u, result.v);
    if (std::sqrt(change) <= cfg.eps) {
      result.converged = true;
      break;
    }
  }
  return result;
}

double fcm_objective(std::span<const double> x, const MembershipMatrix& u, const ClusterCenters& v,
                     double fuzziness) {
  if (u.rows() != x.size() || u.clusters() != v.size()) {
    throw Error(ErrorCode::ShapeMismatch,
                "objective over " + std::to_string(x.size()) + " points, U " +
                    std::to_string(u.rows()) + "x" + std::to_string(u.clusters()) + ", " +
                    std::to_string(v.size()) + " centers");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double d = x[i] - v[j];
      total += weight(u(i, j), fuzziness) * d * d;
    }
  }
  return total;
}

}  // namespace chdet
