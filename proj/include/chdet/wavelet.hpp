#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "chdet/diffmap.hpp"
#include "chdet/raster.hpp"

namespace chdet {

// Orthonormal Haar convention: each pair (a, b) becomes ((a+b)/sqrt2, (a-b)/sqrt2),
// averages in the first half and details in the second. Repeating on the
// approximation half `levels` times gives the multi-level transform.

/// Multi-level forward Haar transform of a power-of-two length vector.
/// Throws NonPowerOfTwoLength, or TooManyLevels if levels > log2(length).
std::vector<double> haar_forward_1d(std::span<const double> v, std::size_t levels);
/// Full depth: levels = log2(length).
std::vector<double> haar_forward_1d(std::span<const double> v);

std::vector<double> haar_inverse_1d(std::span<const double> coeffs, std::size_t levels);
std::vector<double> haar_inverse_1d(std::span<const double> coeffs);

std::size_t log2_exact(std::size_t pow2) noexcept;

/// Coefficients of a square 2D Haar transform. Every row and every column
/// carries a `levels`-deep 1D transform, so the coarse approximation block
/// occupies [0, side / 2^levels) in both axes.
class WaveletPyramid {
 public:
  WaveletPyramid(RealGrid coeffs, std::size_t levels);

  std::size_t side() const noexcept { return coeffs_.width(); }
  std::size_t levels() const noexcept { return levels_; }
  std::size_t approximation_side() const noexcept { return side() >> levels_; }

  const RealGrid& coeffs() const noexcept { return coeffs_; }
  RealGrid& coeffs() noexcept { return coeffs_; }

 private:
  RealGrid coeffs_;
  std::size_t levels_;
};

enum class AxisOrder { RowsFirst, ColumnsFirst };

/// Separable forward transform. Throws NotSquare, NotPowerOfTwo or
/// TooManyLevels; levels must be at least 1.
WaveletPyramid dwt2(const RealGrid& x, std::size_t levels,
                    AxisOrder order = AxisOrder::RowsFirst);
WaveletPyramid dwt2(const GrayRaster& x, std::size_t levels,
                    AxisOrder order = AxisOrder::RowsFirst);

/// Exact inverse of dwt2. The result is unbounded; callers clamp.
RealGrid idwt2(const WaveletPyramid& p);

/// Fraction of the coefficient index range, per axis, that counts as low
/// frequency. Must lie strictly inside (0, 1).
struct BandSplit {
  double boundary = 0.5;
};

/// Side length of the low-frequency block: ceil(boundary * side).
std::size_t low_block_side(const BandSplit& split, std::size_t side);

/// Copies coefficient (r, c) from `low_source` when both r and c fall below
/// boundary * side, otherwise from `high_source`. Nothing is blended.
/// Throws ShapeMismatch on differing side or levels, InvalidArgument on a
/// bad boundary.
WaveletPyramid fuse_pyramids(const WaveletPyramid& low_source, const WaveletPyramid& high_source,
                             const BandSplit& split);

/// Unclamped fused grid: pad -> dwt2 -> fuse_pyramids -> idwt2 -> crop.
RealGrid dwt_fuse_grid(const GrayRaster& d_minus, const GrayRaster& d_ratio, std::size_t levels,
                       const BandSplit& split);

/// Affine map of [min, max] onto [0, 1]. A constant grid maps to all zeros.
RealGrid min_max_rescale(const RealGrid& grid);

/// Full fusion: dwt_fuse_grid, clamp to [0,1], then min_max_rescale.
DifferenceMap dwt_fuse_maps(const DifferenceMap& d_minus, const DifferenceMap& d_ratio,
                            std::size_t levels = 1, const BandSplit& split = {});

/// Writes coefficients affinely mapped to [0,1] as a PGM, for eyeballing only.
void save_pyramid_debug(const WaveletPyramid& p, const std::filesystem::path& path);

}  // namespace chdet
