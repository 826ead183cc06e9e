#include <doctest.h>

#include <fstream>
#include <random>

#include "chdet/error.hpp"
#include "chdet/raster.hpp"
#include "chdet/raster_io.hpp"
#include "oracles.hpp"

using namespace chdet;
namespace fs = std::filesystem;

namespace {

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

GrayRaster random_raster(std::size_t w, std::size_t h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(w * h);
  for (double& x : v) x = unit(rng);
  return GrayRaster(w, h, std::move(v));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("GrayRaster rejects values outside [0,1] and empty shapes") {
  CHECK_THROWS_AS(GrayRaster(2, 1, std::vector<double>{0.5, 1.5}), Error);
  CHECK_THROWS_AS(GrayRaster(0, 3), Error);
  CHECK(code_of([] { GrayRaster(2, 2, std::vector<double>{0.1}); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("load 8-bit PGM scales by 1/255") {
  const auto dir = oracle::scratch_dir("pgm8");
  write_bytes(dir / "a.pgm", std::string("P5\n# comment\n2 2\n255\n") + '\x00' + '\xff' + '\x80' + '\x40');
  const GrayRaster r = load_raster(dir / "a.pgm", ImageFormat::Pgm);
  REQUIRE(r.width() == 2);
  REQUIRE(r.height() == 2);
  CHECK(r(0, 0) == 0.0);
  CHECK(r(1, 0) == 1.0);
  CHECK(r(0, 1) == doctest::Approx(128.0 / 255.0).epsilon(1e-15));
  CHECK(r(1, 1) == doctest::Approx(64.0 / 255.0).epsilon(1e-15));

  write_bytes(dir / "z.pgm", std::string("P5 1 1 255\n") + '\x00');
  CHECK(load_raster(dir / "z.pgm").values()[0] == 0.0);
  fs::remove_all(dir);
}

TEST_CASE("load 16-bit PGM and color PPM") {
  const auto dir = oracle::scratch_dir("pgm16");
  write_bytes(dir / "a.pgm", std::string("P5\n2 1\n65535\n") + '\xff' + '\xff' + '\x80' + '\x00');
  const GrayRaster r = load_raster(dir / "a.pgm");
  CHECK(r(0, 0) == 1.0);
  CHECK(r(1, 0) == doctest::Approx(32768.0 / 65535.0));

  // Color collapses to the unweighted channel mean.
  write_bytes(dir / "c.ppm", std::string("P6\n1 1\n255\n") + '\xff' + '\x00' + '\x00');
  CHECK(load_raster(dir / "c.ppm")(0, 0) == doctest::Approx(1.0 / 3.0));
  fs::remove_all(dir);
}

TEST_CASE("load errors name the path") {
  const auto dir = oracle::scratch_dir("errors");
  CHECK(code_of([&] { load_raster(dir / "missing.pgm"); }) == ErrorCode::FileNotFound);

  write_bytes(dir / "trunc.pgm", std::string("P5\n4 4\n255\n") + "abc");
  try {
    load_raster(dir / "trunc.pgm");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CorruptImage);
    CHECK(std::string(e.what()).find("trunc.pgm") != std::string::npos);
  }

  write_bytes(dir / "ascii.pgm", "P2\n1 1\n255\n0\n");
  CHECK(code_of([&] { load_raster(dir / "ascii.pgm"); }) == ErrorCode::UnsupportedFormat);
  write_bytes(dir / "x.bmp", "BM");
  CHECK(code_of([&] { load_raster(dir / "x.bmp"); }) == ErrorCode::UnsupportedFormat);

  // A PNG cut short after its header.
  save_raster(GrayRaster(8, 8, 0.25), dir / "ok.png");
  std::ifstream in(dir / "ok.png", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  write_bytes(dir / "cut.png", bytes.substr(0, 40));
  CHECK(code_of([&] { load_raster(dir / "cut.png"); }) == ErrorCode::CorruptImage);
  write_bytes(dir / "fake.png", "not a png at all");
  CHECK(code_of([&] { load_raster(dir / "fake.png"); }) == ErrorCode::UnsupportedFormat);
  fs::remove_all(dir);
}

TEST_CASE("save/load round trip stays within half a quantisation step") {
  const auto dir = oracle::scratch_dir("roundtrip");
  std::mt19937_64 rng(7);
  for (const char* name : {"r.png", "r.pgm"}) {
    const GrayRaster r = random_raster(13, 7, rng);
    save_raster(r, dir / name);
    const GrayRaster back = load_raster(dir / name);
    REQUIRE(back.width() == 13);
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(std::abs(back.values()[i] - r.values()[i]) <= 1.0 / 510.0 + 1e-15);
    }
  }

  save_raster(GrayRaster(4, 4, 0.5), dir / "half.png");
  const GrayRaster half = load_raster(dir / "half.png");
  for (double v : half.values()) CHECK(std::abs(v - 0.5) <= 1.0 / 510.0);

  // 1.0 is stored as code 255.
  save_raster(GrayRaster(1, 1, 1.0), dir / "one.pgm");
  std::ifstream in(dir / "one.pgm", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  CHECK(static_cast<unsigned char>(bytes.back()) == 255);

  // 16-bit PGM output is finer.
  const GrayRaster fine = random_raster(5, 5, rng);
  save_raster(fine, dir / "fine.pgm", ImageFormat::Pgm, 16);
  const GrayRaster fine_back = load_raster(dir / "fine.pgm");
  for (std::size_t i = 0; i < fine.size(); ++i) {
    CHECK(std::abs(fine_back.values()[i] - fine.values()[i]) <= 1.0 / (2 * 65535.0) + 1e-15);
  }
  fs::remove_all(dir);
}

TEST_CASE("save into a missing directory is an IoFailure") {
  const fs::path bad = "/nonexistent_dir_for_chdet/x.png";
  CHECK(code_of([&] { save_raster(GrayRaster(2, 2), bad); }) == ErrorCode::IoFailure);
  CHECK(code_of([&] { save_raster(GrayRaster(2, 2), "/nonexistent_dir_for_chdet/x.pgm"); }) ==
        ErrorCode::IoFailure);
}

TEST_CASE("pad_to_pow2 replicates edges into the smallest power-of-two square") {
  std::vector<double> v(15);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i) / 20.0;
  const GrayRaster r(3, 5, v);
  const auto [padded, record] = pad_to_pow2(r);
  CHECK(padded.width() == 8);
  CHECK(padded.height() == 8);
  CHECK(record == PadRecord{3, 5, 8, 0, 0});
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) {
      CHECK(padded(x, y) == r(std::min<std::size_t>(x, 2), std::min<std::size_t>(y, 4)));
    }
  }

  const GrayRaster square(4, 4, 0.3);
  const auto [same, rec4] = pad_to_pow2(square);
  CHECK(same == square);
  CHECK(rec4 == PadRecord{4, 4, 4, 0, 0});

  const GrayRaster dot(1, 1, 0.7);
  CHECK(pad_to_pow2(dot).first == dot);
  CHECK(pad_to_pow2(dot).second.padded_side == 1);
}

TEST_CASE("crop inverts pad exactly and rejects bad records") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> dim(1, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const GrayRaster r = random_raster(dim(rng), dim(rng), rng);
    const auto [padded, record] = pad_to_pow2(r);
    CHECK(is_pow2(record.padded_side));
    CHECK(record.padded_side >= std::max(r.width(), r.height()));
    CHECK(crop(padded, record) == r);
    // Padding an already padded square changes nothing.
    const auto again = pad_to_pow2(padded);
    CHECK(again.first == padded);
    CHECK(again.second == PadRecord{padded.width(), padded.width(), padded.width(), 0, 0});
  }

  const GrayRaster four(4, 4, 0.2);
  CHECK(crop(four, PadRecord{4, 4, 4, 0, 0}) == four);
  CHECK(code_of([&] { crop(four, PadRecord{3, 3, 4, 2, 0}); }) == ErrorCode::RecordMismatch);
  CHECK(code_of([&] { crop(four, PadRecord{3, 3, 8, 0, 0}); }) == ErrorCode::RecordMismatch);
}
