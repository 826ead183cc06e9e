#include <algorithm>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include "chdet/error.hpp"
#include "chdet/segment.hpp"

namespace chdet {

ChangeMap::ChangeMap(std::size_t width, std::size_t height)
    : width_(width), height_(height), flags_(width * height, 0) {}

ChangeMap::ChangeMap(std::size_t width, std::size_t height, std::vector<std::uint8_t> flags)
    : width_(width), height_(height), flags_(std::move(flags)) {
  if (flags_.size() != width_ * height_) {
    throw Error(ErrorCode::ShapeMismatch, "change map " + std::to_string(width_) + "x" +
                                              std::to_string(height_) + " given " +
                                              std::to_string(flags_.size()) + " flags");
  }
  for (auto& f : flags_) f = f ? 1 : 0;
}

ChangeMap ChangeMap::from_raster(const GrayRaster& raster) {
  ChangeMap map(raster.width(), raster.height());
  const auto values = raster.values();
  for (std::size_t i = 0; i < values.size(); ++i) map.set(i, values[i] >= 0.5);
  return map;
}

std::size_t ChangeMap::changed_count() const noexcept {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

double ChangeMap::changed_fraction() const noexcept {
  return flags_.empty() ? 0.0 : static_cast<double>(changed_count()) / flags_.size();
}

GrayRaster ChangeMap::to_raster() const {
  std::vector<double> values(flags_.size());
  std::transform(flags_.begin(), flags_.end(), values.begin(),
                 [](std::uint8_t f) { return f ? 1.0 : 0.0; });
  return GrayRaster(width_, height_, std::move(values));
}

std::size_t changed_cluster(const ClusterCenters& v) {
  if (v.empty()) throw Error(ErrorCode::ShapeMismatch, "no cluster centers");
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

namespace {

void check_pixels(std::size_t n, std::size_t width, std::size_t height) {
  if (n != width * height) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(n) + " pixels for a " +
                                              std::to_string(width) + "x" +
                                              std::to_string(height) + " map");
  }
}

}  // namespace

ChangeMap to_change_map(const MembershipMatrix& u, const ClusterCenters& v, std::size_t width,
                        std::size_t height) {
  if (u.clusters() != v.size()) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(u.clusters()) + " membership columns vs " +
                                              std::to_string(v.size()) + " centers");
  }
  check_pixels(u.rows(), width, height);
  const std::size_t target = changed_cluster(v);
  ChangeMap map(width, height);
  for (std::size_t i = 0; i < u.rows(); ++i) {
    const auto row = u.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (row[j] > row[best] || (row[j] == row[best] && v[j] > v[best])) best = j;
    }
    map.set(i, best == target);
  }
  return map;
}

ChangeMap labels_to_change_map(std::span<const std::size_t> labels, const ClusterCenters& centers,
                               std::size_t width, std::size_t height) {
  check_pixels(labels.size(), width, height);
  const std::size_t target = changed_cluster(centers);
  ChangeMap map(width, height);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= centers.size()) {
      throw Error(ErrorCode::ShapeMismatch, "label " + std::to_string(labels[i]) + " out of range");
    }
    map.set(i, labels[i] == target);
  }
  return map;
}

ChangeMap threshold_change_map(std::span<const double> x, double threshold, std::size_t width,
                               std::size_t height) {
  check_pixels(x.size(), width, height);
  ChangeMap map(width, height);
  for (std::size_t i = 0; i < x.size(); ++i) map.set(i, x[i] >= threshold);
  return map;
}

void write_fcm_dump(std::ostream& out, const MembershipMatrix& u, const ClusterCenters& v) {
  const auto flags = out.flags();
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  auto write_row = [&out](std::span<const double> row) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
    out << '\n';
  };
  write_row(v);
  for (std::size_t i = 0; i < u.rows(); ++i) write_row(u.row(i));
  out.flags(flags);
  out.precision(precision);
}

}  // namespace chdet
