#include "chdet/diffmap.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "chdet/error.hpp"

namespace chdet {

std::string_view to_string(DiffKind kind) {
  switch (kind) {
    case DiffKind::Minus: return "minus";
    case DiffKind::Ratio: return "ratio";
    case DiffKind::Weighted: return "weighted";
    case DiffKind::DwtFused: return "dwt_fused";
  }
  return "unknown";
}

void require_same_shape(const GrayRaster& a, const GrayRaster& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                    std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

namespace {

template <typename Op>
GrayRaster pixelwise(const GrayRaster& a, const GrayRaster& b, Op op) {
  require_same_shape(a, b);
  std::vector<double> out(a.size());
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(op(va[i], vb[i]), 0.0, 1.0);
  return GrayRaster(a.width(), a.height(), std::move(out));
}

}  // namespace

DifferenceMap minus_map(const GrayRaster& a, const GrayRaster& b) {
  return {pixelwise(a, b, [](double x, double y) { return std::abs(x - y); }), DiffKind::Minus};
}

DifferenceMap ratio_map(const GrayRaster& a, const GrayRaster& b, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorCode::InvalidArgument, "ratio eps must be positive");
  }
  return {pixelwise(a, b,
                    [eps](double x, double y) {
                      return 1.0 - (std::min(x, y) + eps) / (std::max(x, y) + eps);
                    }),
          DiffKind::Ratio};
}

DifferenceMap weighted_average_fuse(const DifferenceMap& d1, const DifferenceMap& d2, double w) {
  if (!(w >= 0.0 && w <= 1.0)) {
    throw Error(ErrorCode::WeightOutOfRange, "weight " + std::to_string(w) + " not in [0,1]");
  }
  return {pixelwise(d1.raster, d2.raster,
                    [w](double x, double y) {
                      // Rounding must not push the blend outside [x, y].
                      return std::clamp(w * x + (1.0 - w) * y, std::min(x, y), std::max(x, y));
                    }),
          DiffKind::Weighted};
}

}  // namespace chdet
