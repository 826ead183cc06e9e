#include "chdet/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "chdet/error.hpp"
#include "chdet/raster_io.hpp"

namespace chdet {

bool ChangeShape::contains(std::size_t x, std::size_t y) const noexcept {
  if (kind == Kind::Rectangle) return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h;
  const double dx = static_cast<double>(x) - static_cast<double>(x0);
  const double dy = static_cast<double>(y) - static_cast<double>(y0);
  const double r = static_cast<double>(w);
  return dx * dx + dy * dy <= r * r;
}

void validate(const SceneSpec& spec) {
  if (spec.width == 0 || spec.height == 0) {
    throw Error(ErrorCode::InvalidArgument, "scene must be at least 1x1");
  }
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
    throw Error(ErrorCode::InvalidArgument, "noise_sigma must be >= 0");
  }
  if (!(spec.contrast_delta > 0.0 && spec.contrast_delta <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "contrast_delta must lie in (0,1]");
  }
}

namespace {

// Sum of a few long-wavelength cosines, mapped into [0.3, 0.6].
RealGrid smooth_background(std::size_t width, std::size_t height, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> freq(0.5, 2.5);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> amp(0.5, 1.0);
  constexpr int kWaves = 4;
  struct Wave {
    double fx, fy, phase, amp;
  };
  std::vector<Wave> waves;
  for (int i = 0; i < kWaves; ++i) waves.push_back({freq(rng), freq(rng), phase(rng), amp(rng)});

  RealGrid g(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double u = static_cast<double>(x) / static_cast<double>(width);
      const double v = static_cast<double>(y) / static_cast<double>(height);
      double s = 0.0;
      for (const Wave& wave : waves) {
        s += wave.amp * std::cos(2.0 * std::numbers::pi * (wave.fx * u + wave.fy * v) + wave.phase);
      }
      g(x, y) = s;
    }
  }
  const auto [lo, hi] = std::minmax_element(g.values().begin(), g.values().end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (double& value : g.values()) value = 0.3 + 0.3 * (range > 0.0 ? (value - min) / range : 0.5);
  return g;
}

std::vector<ChangeShape> random_shapes(const SceneSpec& spec, std::mt19937_64& rng) {
  const std::size_t short_side = std::min(spec.width, spec.height);
  const std::size_t min_extent = std::max<std::size_t>(1, short_side / 8);
  const std::size_t max_extent = std::max(min_extent, short_side / 4);
  std::uniform_int_distribution<std::size_t> extent(min_extent, max_extent);
  std::bernoulli_distribution coin(0.5);

  std::vector<ChangeShape> shapes;
  for (std::size_t i = 0; i < spec.n_shapes; ++i) {
    ChangeShape s;
    s.kind = coin(rng) ? ChangeShape::Kind::Rectangle : ChangeShape::Kind::Disc;
    s.direction = coin(rng) ? 1 : -1;
    if (s.kind == ChangeShape::Kind::Rectangle) {
      s.w = std::min(extent(rng), spec.width);
      s.h = std::min(extent(rng), spec.height);
      s.x0 = std::uniform_int_distribution<std::size_t>(0, spec.width - s.w)(rng);
      s.y0 = std::uniform_int_distribution<std::size_t>(0, spec.height - s.h)(rng);
    } else {
      const std::size_t radius = std::max<std::size_t>(1, extent(rng) / 2);
      s.w = s.h = radius;
      const auto place = [&](std::size_t side) {
        if (side <= 2 * radius) return side / 2;
        return std::uniform_int_distribution<std::size_t>(radius, side - 1 - radius)(rng);
      };
      s.x0 = place(spec.width);
      s.y0 = place(spec.height);
    }
    shapes.push_back(s);
  }
  return shapes;
}

double shifted(double v, double delta, int direction) {
  const double preferred = v + direction * delta;
  if (preferred >= 0.0 && preferred <= 1.0) return preferred;
  const double other = v - direction * delta;
  if (other >= 0.0 && other <= 1.0) return other;
  return std::clamp(preferred, 0.0, 1.0);
}

}  // namespace

SyntheticPair generate_pair(const SceneSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  const RealGrid background = smooth_background(spec.width, spec.height, rng);
  const std::vector<ChangeShape> shapes =
      spec.shapes.empty() ? random_shapes(spec, rng) : spec.shapes;

  RealGrid altered = background;
  ChangeMap truth(spec.width, spec.height);
  for (std::size_t y = 0; y < spec.height; ++y) {
    for (std::size_t x = 0; x < spec.width; ++x) {
      const auto hit = std::find_if(shapes.begin(), shapes.end(),
                                    [&](const ChangeShape& s) { return s.contains(x, y); });
      if (hit == shapes.end()) continue;
      const double before = background(x, y);
      const double after = shifted(before, spec.contrast_delta, hit->direction);
      altered(x, y) = after;
      truth.set(y * spec.width + x, after != before);
    }
  }

  std::normal_distribution<double> noise(0.0, spec.noise_sigma);
  auto noisy = [&](const RealGrid& clean) {
    RealGrid out = clean;
    if (spec.noise_sigma > 0.0) {
      for (double& v : out.values()) v += noise(rng);
    }
    return GrayRaster::clamped(out);
  };
  GrayRaster t1 = noisy(background);
  GrayRaster t2 = noisy(altered);

  const double fraction = truth.changed_fraction();
  return {std::move(t1), std::move(t2), std::move(truth), GrayRaster(background),
          GrayRaster(altered), fraction};
}

GrayRaster add_salt_noise(const GrayRaster& raster, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "salt fraction must lie in [0,1]");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(raster.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(raster.size())));
  std::bernoulli_distribution coin(0.5);

  RealGrid out = raster.grid();
  for (std::size_t k = 0; k < count; ++k) out.values()[order[k]] = coin(rng) ? 1.0 : 0.0;
  return GrayRaster(std::move(out));
}

void write_pair(const SyntheticPair& pair, const std::filesystem::path& dir,
                const std::string& id) {
  save_raster(pair.t1, dir / (id + "_t1.png"), ImageFormat::Png);
  save_raster(pair.t2, dir / (id + "_t2.png"), ImageFormat::Png);
  save_raster(pair.truth.to_raster(), dir / (id + "_truth.png"), ImageFormat::Png);
}

}  // namespace chdet
