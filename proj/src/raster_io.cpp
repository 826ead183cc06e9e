#include "chdet/raster_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "chdet/error.hpp"

namespace chdet {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void corrupt(const fs::path& path, const std::string& why) {
  throw Error(ErrorCode::CorruptImage, path.string() + ": " + why);
}

[[noreturn]] void unsupported(const fs::path& path, const std::string& why) {
  throw Error(ErrorCode::UnsupportedFormat, path.string() + ": " + why);
}

void require_exists(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, path.string());
  }
}

std::uint16_t to_code(double v, std::uint32_t max_code) {
  return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * max_code));
}

// ---- PNM ------------------------------------------------------------------

// Reads one whitespace-delimited header token, skipping '#' comments.
bool read_token(std::istream& in, std::string& token) {
  token.clear();
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (!std::isspace(ch)) break;
  }
  if (ch == EOF) return false;
  token.push_back(static_cast<char>(ch));
  while ((ch = in.peek()) != EOF && !std::isspace(ch) && ch != '#') {
    token.push_back(static_cast<char>(in.get()));
  }
  return true;
}

std::size_t read_header_number(std::istream& in, const fs::path& path, const char* field) {
  std::string token;
  if (!read_token(in, token)) corrupt(path, std::string("missing ") + field);
  if (token.empty() || !std::all_of(token.begin(), token.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      })) {
    corrupt(path, std::string("bad ") + field + " '" + token + "'");
  }
  try {
    return std::stoul(token);
  } catch (const std::exception&) {
    corrupt(path, std::string(field) + " out of range");
  }
}

GrayRaster load_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());

  char magic[2] = {0, 0};
  if (!in.read(magic, 2)) corrupt(path, "truncated header");
  if (magic[0] != 'P') unsupported(path, "not a PNM file");
  std::size_t channels = 0;
  if (magic[1] == '5') {
    channels = 1;
  } else if (magic[1] == '6') {
    channels = 3;
  } else {
    unsupported(path, std::string("PNM variant P") + magic[1] + " is not supported");
  }

  const std::size_t width = read_header_number(in, path, "width");
  const std::size_t height = read_header_number(in, path, "height");
  const std::size_t maxval = read_header_number(in, path, "maxval");
  if (width == 0 || height == 0) corrupt(path, "zero dimension");
  if (maxval == 0 || maxval > 65535) corrupt(path, "maxval out of range");
  // Exactly one whitespace byte separates the header from the raster.
  if (!std::isspace(in.get())) corrupt(path, "malformed header terminator");

  const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
  const std::size_t samples = width * height * channels;
  std::vector<unsigned char> data(samples * bytes_per_sample);
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()))) {
    corrupt(path, "truncated pixel data");
  }

  std::vector<double> values(width * height);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t p = 0; p < values.size(); ++p) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t s = (p * channels + c) * bytes_per_sample;
      std::uint32_t code = data[s];
      if (bytes_per_sample == 2) code = (code << 8) | data[s + 1];
      if (code > maxval) corrupt(path, "sample exceeds maxval");
      acc += code * scale;
    }
    values[p] = std::min(1.0, acc / static_cast<double>(channels));
  }
  return GrayRaster(width, height, std::move(values));
}

void save_pnm(const GrayRaster& raster, const fs::path& path, int bit_depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  const std::uint32_t max_code = bit_depth == 16 ? 65535u : 255u;
  out << "P5\n" << raster.width() << ' ' << raster.height() << '\n' << max_code << '\n';
  std::vector<unsigned char> data;
  data.reserve(raster.size() * (bit_depth == 16 ? 2 : 1));
  for (double v : raster.values()) {
    const std::uint16_t code = to_code(v, max_code);
    if (bit_depth == 16) data.push_back(static_cast<unsigned char>(code >> 8));
    data.push_back(static_cast<unsigned char>(code & 0xFF));
  }
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

// ---- PNG ------------------------------------------------------------------

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// State touched between setjmp and a possible longjmp lives on the heap so
// it stays well-defined after the jump.
struct PngContext {
  std::string message;
  std::vector<unsigned char> pixels;
  std::vector<png_bytep> rows;
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* ctx = static_cast<PngContext*>(png_get_error_ptr(png));
  ctx->message = msg ? msg : "libpng error";
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

GrayRaster load_png(const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error(ErrorCode::FileNotFound, path.string());

  png_byte signature[8];
  const std::size_t got = std::fread(signature, 1, sizeof(signature), file.get());
  if (got < sizeof(signature)) corrupt(path, "truncated signature");
  if (png_sig_cmp(signature, 0, sizeof(signature)) != 0) unsupported(path, "not a PNG file");

  auto ctx = std::make_unique<PngContext>();
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, ctx.get(), png_error_handler,
                                           png_warning_handler);
  if (!png) throw Error(ErrorCode::IoFailure, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::IoFailure, "libpng initialisation failed");
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    corrupt(path, ctx->message);
  }

  png_init_io(png, file.get());
  png_set_sig_bytes(png, sizeof(signature));
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);

  ctx->pixels.resize(row_bytes * height);
  ctx->rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) ctx->rows[y] = ctx->pixels.data() + y * row_bytes;
  png_read_image(png, ctx->rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t bytes = depth == 16 ? 2 : 1;
  const double scale = 1.0 / (depth == 16 ? 65535.0 : 255.0);
  std::vector<double> values(static_cast<std::size_t>(width) * height);
  for (std::size_t y = 0; y < height; ++y) {
    const unsigned char* row = ctx->rows[y];
    for (std::size_t x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int c = 0; c < channels; ++c) {
        const unsigned char* s = row + (x * channels + c) * bytes;
        const std::uint32_t code = bytes == 2 ? (std::uint32_t{s[0]} << 8) | s[1] : s[0];
        acc += code * scale;
      }
      values[y * width + x] = std::min(1.0, acc / channels);
    }
  }
  return GrayRaster(width, height, std::move(values));
}

void save_png(const GrayRaster& raster, const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");

  auto ctx = std::make_unique<PngContext>();
  ctx->pixels.resize(raster.size());
  std::transform(raster.values().begin(), raster.values().end(), ctx->pixels.begin(),
                 [](double v) { return static_cast<unsigned char>(to_code(v, 255)); });
  ctx->rows.resize(raster.height());
  for (std::size_t y = 0; y < raster.height(); ++y) {
    ctx->rows[y] = ctx->pixels.data() + y * raster.width();
  }

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, ctx.get(), png_error_handler,
                                            png_warning_handler);
  if (!png) throw Error(ErrorCode::IoFailure, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::IoFailure, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::IoFailure, path.string() + ": " + ctx->message);
  }

  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(raster.width()),
               static_cast<png_uint_32>(raster.height()), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, ctx->rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);

  if (std::fflush(file.get()) != 0) {
    throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
  }
}

}  // namespace

ImageFormat format_from_path(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".png") return ImageFormat::Png;
  if (ext == ".pgm" || ext == ".pnm" || ext == ".ppm") return ImageFormat::Pgm;
  unsupported(path, "unknown extension '" + ext + "'");
}

GrayRaster load_raster(const fs::path& path, ImageFormat format) {
  require_exists(path);
  return format == ImageFormat::Png ? load_png(path) : load_pnm(path);
}

GrayRaster load_raster(const fs::path& path) {
  require_exists(path);
  return load_raster(path, format_from_path(path));
}

void save_raster(const GrayRaster& raster, const fs::path& path, ImageFormat format,
                 int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw Error(ErrorCode::InvalidArgument, "bit depth must be 8 or 16");
  }
  if (format == ImageFormat::Png) {
    if (bit_depth != 8) throw Error(ErrorCode::InvalidArgument, "PNG output is 8-bit only");
    save_png(raster, path);
  } else {
    save_pnm(raster, path, bit_depth);
  }
}

void save_raster(const GrayRaster& raster, const fs::path& path) {
  save_raster(raster, path, format_from_path(path));
}

}  // namespace chdet
