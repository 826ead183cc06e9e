#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chdet/raster.hpp"
#include "chdet/segment.hpp"

namespace chdet {

struct ChangeShape {
  enum class Kind { Rectangle, Disc };
  Kind kind = Kind::Rectangle;
  // Rectangle: [x0, x0 + w) x [y0, y0 + h). Disc: centre (x0, y0), radius w.
  std::size_t x0 = 0;
  std::size_t y0 = 0;
  std::size_t w = 1;
  std::size_t h = 1;
  // +1 brightens the region, -1 darkens it.
  int direction = 1;

  bool contains(std::size_t x, std::size_t y) const noexcept;
};

struct SceneSpec {
  std::size_t width = 256;
  std::size_t height = 256;
  std::uint64_t seed = 0;
  std::size_t n_shapes = 1;
  double noise_sigma = 0.0;
  double contrast_delta = 0.5;
  // When non-empty, used verbatim instead of n_shapes random shapes.
  std::vector<ChangeShape> shapes;
};

/// Throws InvalidArgument when a field breaks its range.
void validate(const SceneSpec& spec);

struct SyntheticPair {
  GrayRaster t1;
  GrayRaster t2;
  ChangeMap truth;
  // Noise-free versions of t1 and t2.
  GrayRaster clean_t1;
  GrayRaster clean_t2;
  double change_fraction = 0.0;
};

/// Smooth seeded background as t1; t2 repeats it with every pixel covered by
/// a shape moved by contrast_delta (in the shape's direction, or the other
/// way when that would leave [0,1]). Independent Gaussian noise is added to
/// each image afterwards, so truth is exactly the set of altered pixels.
SyntheticPair generate_pair(const SceneSpec& spec);

/// Sets round(fraction * N) distinct pixels to 0 or 1 with equal odds.
GrayRaster add_salt_noise(const GrayRaster& raster, double fraction, std::uint64_t seed);

/// Writes <id>_t1.png, <id>_t2.png and <id>_truth.png into dir.
void write_pair(const SyntheticPair& pair, const std::filesystem::path& dir,
                const std::string& id);

}  // namespace chdet
