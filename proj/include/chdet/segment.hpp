#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "chdet/raster.hpp"

namespace chdet {

/// N x c row-major fuzzy memberships; each row is a distribution over clusters.
class MembershipMatrix {
 public:
  MembershipMatrix() = default;
  MembershipMatrix(std::size_t n, std::size_t c, double fill = 0.0);
  MembershipMatrix(std::size_t n, std::size_t c, std::vector<double> values);

  std::size_t rows() const noexcept { return n_; }
  std::size_t clusters() const noexcept { return c_; }

  double& operator()(std::size_t i, std::size_t j) { return u_[i * c_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return u_[i * c_ + j]; }

  std::span<double> row(std::size_t i) { return std::span<double>(u_).subspan(i * c_, c_); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(u_).subspan(i * c_, c_);
  }
  std::span<const double> values() const noexcept { return u_; }

  bool operator==(const MembershipMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t c_ = 0;
  std::vector<double> u_;
};

using ClusterCenters = std::vector<double>;

struct FcmConfig {
  std::size_t clusters = 6;
  double fuzziness = 2.0;
  double eps = 1e-5;
  std::size_t max_iter = 300;
  std::uint64_t seed = 0;
};

/// Throws InvalidArgument when a field breaks its range.
void validate(const FcmConfig& cfg);

struct FcmResult {
  MembershipMatrix u;
  ClusterCenters v;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Called after every iteration with the freshly updated state.
using FcmObserver =
    std::function<void(std::size_t iteration, const MembershipMatrix& u, const ClusterCenters& v)>;

/// Fuzzy C-Means on scalar data.
///
/// Starts from a seeded random membership matrix with normalised rows, then
/// alternates the weighted-mean center update and the inverse-distance
/// membership update until the Frobenius norm of the membership change
/// drops to cfg.eps or cfg.max_iter iterations have run.
///
/// A point sitting exactly on a center gets membership 1 in the lowest such
/// cluster. A cluster whose total weight vanishes keeps its previous center.
///
/// Throws TooFewPoints when x.size() < clusters and NonFiniteInput on NaN/inf.
FcmResult fcm(std::span<const double> x, const FcmConfig& cfg, const FcmObserver& observer = {});

/// sum_i sum_j u_ij^m (x_i - v_j)^2. Throws ShapeMismatch.
double fcm_objective(std::span<const double> x, const MembershipMatrix& u, const ClusterCenters& v,
                     double fuzziness);

struct KMeansResult {
  std::vector<std::size_t> labels;
  std::vector<double> centers;
  std::size_t iterations = 0;
};

/// Lloyd iteration on scalar data. Centers start on k seeded data points
/// with distinct values where the data allows; an empty cluster is
/// re-seeded with the point farthest from its own center. Stops when no
/// label changes or after max_iter rounds. Throws TooFewPoints.
KMeansResult kmeans(std::span<const double> x, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter = 300);

inline constexpr std::size_t kOtsuBins = 256;

/// 256-bin histogram of values in [0,1]; value v lands in bin floor(256 v),
/// with 1.0 folded into the last bin.
std::vector<std::uint64_t> otsu_histogram(std::span<const double> x);

/// Boundary b in [1, 255] maximising the between-class variance of bins
/// [0, b) versus [b, 256). Ties go to the lowest b. Comparisons are exact
/// for images up to a few hundred thousand pixels.
std::size_t otsu_boundary(std::span<const std::uint64_t> histogram);

/// Threshold b / 256; values >= threshold count as changed. Throws EmptyInput.
double otsu_threshold(std::span<const double> x);

class ChangeMap {
 public:
  ChangeMap() = default;
  ChangeMap(std::size_t width, std::size_t height);
  ChangeMap(std::size_t width, std::size_t height, std::vector<std::uint8_t> flags);

  /// Pixels >= 0.5 are changed.
  static ChangeMap from_raster(const GrayRaster& raster);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return flags_.size(); }

  bool changed(std::size_t i) const { return flags_[i] != 0; }
  void set(std::size_t i, bool changed) { flags_[i] = changed ? 1 : 0; }
  std::span<const std::uint8_t> flags() const noexcept { return flags_; }

  std::size_t changed_count() const noexcept;
  double changed_fraction() const noexcept;

  /// Changed pixels render white.
  GrayRaster to_raster() const;

  bool operator==(const ChangeMap&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> flags_;
};

/// Index of the highest center; ties go to the lowest index.
std::size_t changed_cluster(const ClusterCenters& v);

/// Pixel i is changed when its highest membership falls on the highest
/// center. Membership ties are settled in favour of the higher center.
/// Throws ShapeMismatch.
ChangeMap to_change_map(const MembershipMatrix& u, const ClusterCenters& v, std::size_t width,
                        std::size_t height);

ChangeMap labels_to_change_map(std::span<const std::size_t> labels, const ClusterCenters& centers,
                               std::size_t width, std::size_t height);

ChangeMap threshold_change_map(std::span<const double> x, double threshold, std::size_t width,
                               std::size_t height);

/// First line: the c centers. Then one line per pixel with its c memberships.
void write_fcm_dump(std::ostream& out, const MembershipMatrix& u, const ClusterCenters& v);

}  // namespace chdet
