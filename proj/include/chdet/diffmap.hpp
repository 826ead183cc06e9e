#pragma once

#include <string_view>

#include "chdet/raster.hpp"

namespace chdet {

enum class DiffKind { Minus, Ratio, Weighted, DwtFused };

std::string_view to_string(DiffKind kind);

// Bright means changed, whatever the kind.
struct DifferenceMap {
  GrayRaster raster;
  DiffKind kind;
};

inline constexpr double kDefaultRatioEps = 1.0 / 255.0;

/// |a - b| per pixel.
DifferenceMap minus_map(const GrayRaster& a, const GrayRaster& b);

/// 1 - (min + eps) / (max + eps) per pixel, so equal pixels map to 0 and the
/// result is symmetric in (a, b).
DifferenceMap ratio_map(const GrayRaster& a, const GrayRaster& b, double eps = kDefaultRatioEps);

/// w * d1 + (1 - w) * d2. Throws WeightOutOfRange unless 0 <= w <= 1.
DifferenceMap weighted_average_fuse(const DifferenceMap& d1, const DifferenceMap& d2,
                                    double w = 0.5);

void require_same_shape(const GrayRaster& a, const GrayRaster& b);

}  // namespace chdet
