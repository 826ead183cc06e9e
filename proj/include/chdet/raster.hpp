#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chdet {

/// Row-major grid of unbounded reals. Carries wavelet coefficients and
/// intermediate results that may leave [0,1].
class RealGrid {
 public:
  RealGrid() = default;
  RealGrid(std::size_t width, std::size_t height, double fill = 0.0);
  RealGrid(std::size_t width, std::size_t height, std::vector<double> values);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t x, std::size_t y) { return values_[y * width_ + x]; }
  double operator()(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const RealGrid&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> values_;
};

/// Grayscale image with every intensity in [0,1] and at least one pixel.
/// The constructor enforces the invariant, so a GrayRaster in hand is
/// always valid.
class GrayRaster {
 public:
  GrayRaster(std::size_t width, std::size_t height, double fill = 0.0);
  GrayRaster(std::size_t width, std::size_t height, std::vector<double> values);
  explicit GrayRaster(RealGrid grid);

  /// Clamps each value into [0,1]; NaN becomes 0.
  static GrayRaster clamped(const RealGrid& grid);

  std::size_t width() const noexcept { return grid_.width(); }
  std::size_t height() const noexcept { return grid_.height(); }
  std::size_t size() const noexcept { return grid_.size(); }

  double operator()(std::size_t x, std::size_t y) const { return grid_(x, y); }
  std::span<const double> values() const noexcept { return grid_.values(); }
  const RealGrid& grid() const noexcept { return grid_; }

  bool operator==(const GrayRaster&) const = default;

 private:
  RealGrid grid_;
};

struct PadRecord {
  std::size_t original_width = 0;
  std::size_t original_height = 0;
  std::size_t padded_side = 0;
  std::size_t offset_x = 0;
  std::size_t offset_y = 0;

  bool operator==(const PadRecord&) const = default;
};

bool is_pow2(std::size_t n) noexcept;
std::size_t next_pow2(std::size_t n) noexcept;

/// Embeds the raster in the smallest power-of-two square that holds it.
/// Content sits at the top-left; the right and bottom margins replicate the
/// last column and row.
std::pair<GrayRaster, PadRecord> pad_to_pow2(const GrayRaster& raster);
std::pair<RealGrid, PadRecord> pad_to_pow2(const RealGrid& grid);

/// Inverse of pad_to_pow2. Throws RecordMismatch if the record does not fit.
GrayRaster crop(const GrayRaster& raster, const PadRecord& record);
RealGrid crop(const RealGrid& grid, const PadRecord& record);

}  // namespace chdet
