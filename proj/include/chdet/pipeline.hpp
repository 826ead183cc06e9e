#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chdet/diffmap.hpp"
#include "chdet/error.hpp"
#include "chdet/evaluate.hpp"
#include "chdet/segment.hpp"
#include "chdet/wavelet.hpp"

namespace chdet {

enum class Fusion { Minus, Ratio, Weighted, Dwt };
enum class Segmentor { Otsu, KMeans, Fcm };

Fusion parse_fusion(std::string_view name);
Segmentor parse_segmentor(std::string_view name);
std::string_view to_string(Fusion f);
/// Display names as they appear in the report: Otsu, KMeans, FCM.
std::string_view method_name(Segmentor s);

struct PipelineConfig {
  std::filesystem::path t1;
  std::filesystem::path t2;
  std::optional<std::filesystem::path> truth;
  Fusion fusion = Fusion::Dwt;
  double weight = 0.5;
  std::size_t levels = 1;
  BandSplit split;
  Segmentor segmentor = Segmentor::Fcm;
  // clusters doubles as k for k-means; max_iter caps both iterative segmentors.
  FcmConfig fcm;
  double ratio_eps = kDefaultRatioEps;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = ".";
  std::string test_id = "1";
  std::optional<std::filesystem::path> fcm_dump;
};

/// Throws InvalidArgument (or WeightOutOfRange) on out-of-range fields.
void validate(const PipelineConfig& cfg);

/// Difference map of the pair for the configured fusion mode.
DifferenceMap build_difference_map(const GrayRaster& t1, const GrayRaster& t2,
                                   const PipelineConfig& cfg);

/// Binary change map of a difference map; a constant map has no change.
/// When `fcm_state` is given and the
/// segmentor is FCM, the converged state is copied out.
ChangeMap segment_map(const DifferenceMap& diff, Segmentor segmentor, const PipelineConfig& cfg,
                      FcmResult* fcm_state = nullptr);

struct RunResult {
  DifferenceMap fused;
  ChangeMap change_map;
  std::optional<EvalReport> report;
};

/// Loads the pair (and truth), writes fused_diff.png, change_map.png and,
/// with truth, report.csv into cfg.out_dir.
RunResult run(const PipelineConfig& cfg);

struct TestSet {
  std::string id;
  std::filesystem::path t1;
  std::filesystem::path t2;
  std::filesystem::path truth;
};

struct CompareRow {
  Segmentor method;
  std::string test_id;
  EvalReport report;
};

/// Every method on every test set. Rows come out method-major in the order
/// of `methods`, then in test-set order, whatever `jobs` is. Writes
/// report.csv, fused_diff_<id>.png and change_map_<method>_<id>.png.
std::vector<CompareRow> compare(const std::vector<TestSet>& sets,
                                const std::vector<Segmentor>& methods,
                                const PipelineConfig& base, unsigned jobs = 1);

std::string compare_csv(const std::vector<CompareRow>& rows);

struct RoundTripStats {
  std::size_t side = 0;
  std::size_t levels = 0;
  double max_abs_error = 0.0;
  double energy_in = 0.0;
  double energy_coeffs = 0.0;
};

/// Pads, transforms and inverts the raster, measuring reconstruction error.
RoundTripStats dwt_roundtrip(const GrayRaster& raster, std::size_t levels,
                             const std::filesystem::path* pyramid_dump = nullptr);

/// Process exit status for a library error: 2 config, 3 I/O, 4 numeric.
int exit_code_for(ErrorCode code);

}  // namespace chdet
