#include "chdet/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chdet/error.hpp"
#include "chdet/raster_io.hpp"

namespace chdet {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_length(std::size_t n, std::size_t levels) {
  if (!is_pow2(n)) {
    throw Error(ErrorCode::NonPowerOfTwoLength, "length " + std::to_string(n));
  }
  if (levels > log2_exact(n)) {
    throw Error(ErrorCode::TooManyLevels, std::to_string(levels) + " levels for length " +
                                              std::to_string(n));
  }
}

void forward_inplace(std::span<double> v, std::size_t levels, std::vector<double>& scratch) {
  scratch.resize(v.size());
  std::size_t n = v.size();
  for (std::size_t level = 0; level < levels; ++level, n /= 2) {
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) {
      const double a = v[2 * i];
      const double b = v[2 * i + 1];
      scratch[i] = (a + b) * kInvSqrt2;
      scratch[half + i] = (a - b) * kInvSqrt2;
    }
    std::copy_n(scratch.begin(), n, v.begin());
  }
}

void inverse_inplace(std::span<double> v, std::size_t levels, std::vector<double>& scratch) {
  scratch.resize(v.size());
  for (std::size_t level = levels; level-- > 0;) {
    const std::size_t n = v.size() >> level;
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) {
      const double s = v[i];
      const double d = v[half + i];
      scratch[2 * i] = (s + d) * kInvSqrt2;
      scratch[2 * i + 1] = (s - d) * kInvSqrt2;
    }
    std::copy_n(scratch.begin(), n, v.begin());
  }
}

template <typename Transform>
void apply_rows(RealGrid& g, Transform&& t) {
  std::vector<double> scratch;
  for (std::size_t y = 0; y < g.height(); ++y) {
    t(g.values().subspan(y * g.width(), g.width()), scratch);
  }
}

template <typename Transform>
void apply_columns(RealGrid& g, Transform&& t) {
  std::vector<double> column(g.height());
  std::vector<double> scratch;
  for (std::size_t x = 0; x < g.width(); ++x) {
    for (std::size_t y = 0; y < g.height(); ++y) column[y] = g(x, y);
    t(std::span<double>(column), scratch);
    for (std::size_t y = 0; y < g.height(); ++y) g(x, y) = column[y];
  }
}

void check_boundary(const BandSplit& split) {
  if (!(split.boundary > 0.0 && split.boundary < 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "band split boundary " + std::to_string(split.boundary) + " not in (0,1)");
  }
}

}  // namespace

std::size_t log2_exact(std::size_t pow2) noexcept {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < pow2) ++k;
  return k;
}

std::vector<double> haar_forward_1d(std::span<const double> v, std::size_t levels) {
  check_length(v.size(), levels);
  std::vector<double> out(v.begin(), v.end());
  std::vector<double> scratch;
  forward_inplace(out, levels, scratch);
  return out;
}

std::vector<double> haar_forward_1d(std::span<const double> v) {
  check_length(v.size(), 0);
  return haar_forward_1d(v, log2_exact(v.size()));
}

std::vector<double> haar_inverse_1d(std::span<const double> coeffs, std::size_t levels) {
  check_length(coeffs.size(), levels);
  std::vector<double> out(coeffs.begin(), coeffs.end());
  std::vector<double> scratch;
  inverse_inplace(out, levels, scratch);
  return out;
}

std::vector<double> haar_inverse_1d(std::span<const double> coeffs) {
  check_length(coeffs.size(), 0);
  return haar_inverse_1d(coeffs, log2_exact(coeffs.size()));
}

WaveletPyramid::WaveletPyramid(RealGrid coeffs, std::size_t levels)
    : coeffs_(std::move(coeffs)), levels_(levels) {
  if (coeffs_.width() != coeffs_.height()) {
    throw Error(ErrorCode::NotSquare, std::to_string(coeffs_.width()) + "x" +
                                          std::to_string(coeffs_.height()));
  }
  if (!is_pow2(coeffs_.width())) {
    throw Error(ErrorCode::NotPowerOfTwo, "side " + std::to_string(coeffs_.width()));
  }
  if (levels_ < 1 || levels_ > log2_exact(coeffs_.width())) {
    throw Error(ErrorCode::TooManyLevels, std::to_string(levels_) + " levels for side " +
                                              std::to_string(coeffs_.width()));
  }
}

WaveletPyramid dwt2(const RealGrid& x, std::size_t levels, AxisOrder order) {
  if (x.width() != x.height()) {
    throw Error(ErrorCode::NotSquare, std::to_string(x.width()) + "x" + std::to_string(x.height()));
  }
  if (!is_pow2(x.width())) {
    throw Error(ErrorCode::NotPowerOfTwo, "side " + std::to_string(x.width()));
  }
  if (levels < 1 || levels > log2_exact(x.width())) {
    throw Error(ErrorCode::TooManyLevels, std::to_string(levels) + " levels for side " +
                                              std::to_string(x.width()));
  }
  RealGrid g = x;
  auto fwd = [levels](std::span<double> v, std::vector<double>& s) {
    forward_inplace(v, levels, s);
  };
  if (order == AxisOrder::RowsFirst) {
    apply_rows(g, fwd);
    apply_columns(g, fwd);
  } else {
    apply_columns(g, fwd);
    apply_rows(g, fwd);
  }
  return WaveletPyramid(std::move(g), levels);
}

WaveletPyramid dwt2(const GrayRaster& x, std::size_t levels, AxisOrder order) {
  return dwt2(x.grid(), levels, order);
}

RealGrid idwt2(const WaveletPyramid& p) {
  RealGrid g = p.coeffs();
  auto inv = [levels = p.levels()](std::span<double> v, std::vector<double>& s) {
    inverse_inplace(v, levels, s);
  };
  apply_columns(g, inv);
  apply_rows(g, inv);
  return g;
}

std::size_t low_block_side(const BandSplit& split, std::size_t side) {
  check_boundary(split);
  return static_cast<std::size_t>(std::ceil(split.boundary * static_cast<double>(side)));
}

WaveletPyramid fuse_pyramids(const WaveletPyramid& low_source, const WaveletPyramid& high_source,
                             const BandSplit& split) {
  if (low_source.side() != high_source.side() || low_source.levels() != high_source.levels()) {
    throw Error(ErrorCode::ShapeMismatch,
                "pyramids of side " + std::to_string(low_source.side()) + "/" +
                    std::to_string(high_source.side()) + " and levels " +
                    std::to_string(low_source.levels()) + "/" +
                    std::to_string(high_source.levels()));
  }
  const std::size_t low = low_block_side(split, low_source.side());
  WaveletPyramid out = high_source;
  for (std::size_t r = 0; r < low; ++r) {
    for (std::size_t c = 0; c < low; ++c) out.coeffs()(c, r) = low_source.coeffs()(c, r);
  }
  return out;
}

RealGrid dwt_fuse_grid(const GrayRaster& d_minus, const GrayRaster& d_ratio, std::size_t levels,
                       const BandSplit& split) {
  require_same_shape(d_minus, d_ratio);
  check_boundary(split);
  auto [padded_minus, record] = pad_to_pow2(d_minus.grid());
  const RealGrid padded_ratio = pad_to_pow2(d_ratio.grid()).first;
  const auto fused =
      fuse_pyramids(dwt2(padded_minus, levels), dwt2(padded_ratio, levels), split);
  return crop(idwt2(fused), record);
}

RealGrid min_max_rescale(const RealGrid& grid) {
  RealGrid out = grid;
  if (grid.empty()) return out;
  const auto [lo, hi] = std::minmax_element(grid.values().begin(), grid.values().end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (double& v : out.values()) v = range > 0.0 ? std::clamp((v - min) / range, 0.0, 1.0) : 0.0;
  return out;
}

DifferenceMap dwt_fuse_maps(const DifferenceMap& d_minus, const DifferenceMap& d_ratio,
                            std::size_t levels, const BandSplit& split) {
  const RealGrid fused = dwt_fuse_grid(d_minus.raster, d_ratio.raster, levels, split);
  const GrayRaster clamped = GrayRaster::clamped(fused);
  return {GrayRaster(min_max_rescale(clamped.grid())), DiffKind::DwtFused};
}

void save_pyramid_debug(const WaveletPyramid& p, const std::filesystem::path& path) {
  save_raster(GrayRaster(min_max_rescale(p.coeffs())), path, ImageFormat::Pgm);
}

}  // namespace chdet
