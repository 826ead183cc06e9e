#pragma once

#include <filesystem>

#include "chdet/raster.hpp"

namespace chdet {

enum class ImageFormat { Pgm, Png };

/// Picks the format from the file extension (.pgm/.pnm/.ppm or .png).
/// Throws UnsupportedFormat for anything else.
ImageFormat format_from_path(const std::filesystem::path& path);

/// Reads binary PNM (P5 gray, P6 color; maxval up to 65535) or PNG (any
/// color type, 8 or 16 bit). Samples are scaled linearly by 1/maxcode and
/// color pixels collapse to the unweighted mean of their channels.
///
/// Throws FileNotFound, UnsupportedFormat or CorruptImage; each message
/// names the path.
GrayRaster load_raster(const std::filesystem::path& path, ImageFormat format);
GrayRaster load_raster(const std::filesystem::path& path);

/// Writes 8-bit output (or 16-bit PGM when bit_depth == 16). Each value is
/// rounded to the nearest code. Throws IoFailure.
void save_raster(const GrayRaster& raster, const std::filesystem::path& path, ImageFormat format,
                 int bit_depth = 8);
void save_raster(const GrayRaster& raster, const std::filesystem::path& path);

}  // namespace chdet
