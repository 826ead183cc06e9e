#include "chdet/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chdet/error.hpp"

namespace chdet {

namespace {

void check_unit_range(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "raster value " + std::to_string(v) + " at index " + std::to_string(i) +
                      " lies outside [0,1]");
    }
  }
}

}  // namespace

RealGrid::RealGrid(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), values_(width * height, fill) {}

RealGrid::RealGrid(std::size_t width, std::size_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (values_.size() != width_ * height_) {
    throw Error(ErrorCode::DimensionMismatch,
                "grid of " + std::to_string(width_) + "x" + std::to_string(height_) + " given " +
                    std::to_string(values_.size()) + " values");
  }
}

GrayRaster::GrayRaster(std::size_t width, std::size_t height, double fill)
    : GrayRaster(RealGrid(width, height, fill)) {}

GrayRaster::GrayRaster(std::size_t width, std::size_t height, std::vector<double> values)
    : GrayRaster(RealGrid(width, height, std::move(values))) {}

GrayRaster::GrayRaster(RealGrid grid) : grid_(std::move(grid)) {
  if (grid_.width() == 0 || grid_.height() == 0) {
    throw Error(ErrorCode::InvalidArgument, "raster must be at least 1x1");
  }
  check_unit_range(grid_.values());
}

GrayRaster GrayRaster::clamped(const RealGrid& grid) {
  RealGrid out = grid;
  for (double& v : out.values()) {
    v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
  }
  return GrayRaster(std::move(out));
}

bool is_pow2(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::pair<RealGrid, PadRecord> pad_to_pow2(const RealGrid& grid) {
  const std::size_t w = grid.width();
  const std::size_t h = grid.height();
  const std::size_t side = next_pow2(std::max(w, h));
  PadRecord record{w, h, side, 0, 0};
  if (w == side && h == side) return {grid, record};

  RealGrid out(side, side);
  for (std::size_t y = 0; y < side; ++y) {
    const std::size_t sy = std::min(y, h - 1);
    for (std::size_t x = 0; x < side; ++x) {
      out(x, y) = grid(std::min(x, w - 1), sy);
    }
  }
  return {std::move(out), record};
}

std::pair<GrayRaster, PadRecord> pad_to_pow2(const GrayRaster& raster) {
  auto [grid, record] = pad_to_pow2(raster.grid());
  return {GrayRaster(std::move(grid)), record};
}

RealGrid crop(const RealGrid& grid, const PadRecord& record) {
  const bool fits = record.original_width > 0 && record.original_height > 0 &&
                    record.padded_side == grid.width() && record.padded_side == grid.height() &&
                    record.offset_x + record.original_width <= grid.width() &&
                    record.offset_y + record.original_height <= grid.height();
  if (!fits) {
    throw Error(ErrorCode::RecordMismatch,
                "pad record {" + std::to_string(record.original_width) + "x" +
                    std::to_string(record.original_height) + " at (" +
                    std::to_string(record.offset_x) + "," + std::to_string(record.offset_y) +
                    ") in " + std::to_string(record.padded_side) + "} does not fit a " +
                    std::to_string(grid.width()) + "x" + std::to_string(grid.height()) + " grid");
  }
  RealGrid out(record.original_width, record.original_height);
  for (std::size_t y = 0; y < record.original_height; ++y) {
    for (std::size_t x = 0; x < record.original_width; ++x) {
      out(x, y) = grid(x + record.offset_x, y + record.offset_y);
    }
  }
  return out;
}

GrayRaster crop(const GrayRaster& raster, const PadRecord& record) {
  return GrayRaster(crop(raster.grid(), record));
}

}  // namespace chdet
