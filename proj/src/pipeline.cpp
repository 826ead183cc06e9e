#include "chdet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include "chdet/raster_io.hpp"

namespace chdet {

namespace fs = std::filesystem;

Fusion parse_fusion(std::string_view name) {
  if (name == "minus") return Fusion::Minus;
  if (name == "ratio") return Fusion::Ratio;
  if (name == "weighted") return Fusion::Weighted;
  if (name == "dwt") return Fusion::Dwt;
  throw Error(ErrorCode::InvalidArgument, "unknown fusion '" + std::string(name) + "'");
}

Segmentor parse_segmentor(std::string_view name) {
  if (name == "otsu") return Segmentor::Otsu;
  if (name == "kmeans") return Segmentor::KMeans;
  if (name == "fcm") return Segmentor::Fcm;
  throw Error(ErrorCode::InvalidArgument, "unknown segmentor '" + std::string(name) + "'");
}

std::string_view to_string(Fusion f) {
  switch (f) {
    case Fusion::Minus: return "minus";
    case Fusion::Ratio: return "ratio";
    case Fusion::Weighted: return "weighted";
    case Fusion::Dwt: return "dwt";
  }
  return "unknown";
}

std::string_view method_name(Segmentor s) {
  switch (s) {
    case Segmentor::Otsu: return "Otsu";
    case Segmentor::KMeans: return "KMeans";
    case Segmentor::Fcm: return "FCM";
  }
  return "unknown";
}

void validate(const PipelineConfig& cfg) {
  validate(cfg.fcm);
  if (!(cfg.weight >= 0.0 && cfg.weight <= 1.0)) {
    throw Error(ErrorCode::WeightOutOfRange, "weight " + std::to_string(cfg.weight));
  }
  if (cfg.levels < 1) throw Error(ErrorCode::InvalidArgument, "levels must be >= 1");
  if (!(cfg.split.boundary > 0.0 && cfg.split.boundary < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "split must lie in (0,1)");
  }
  if (!(cfg.ratio_eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "ratio eps must be > 0");
}

DifferenceMap build_difference_map(const GrayRaster& t1, const GrayRaster& t2,
                                   const PipelineConfig& cfg) {
  switch (cfg.fusion) {
    case Fusion::Minus: return minus_map(t1, t2);
    case Fusion::Ratio: return ratio_map(t1, t2, cfg.ratio_eps);
    case Fusion::Weighted:
      return weighted_average_fuse(minus_map(t1, t2), ratio_map(t1, t2, cfg.ratio_eps),
                                   cfg.weight);
    case Fusion::Dwt:
      return dwt_fuse_maps(minus_map(t1, t2), ratio_map(t1, t2, cfg.ratio_eps), cfg.levels,
                           cfg.split);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown fusion mode");
}

ChangeMap segment_map(const DifferenceMap& diff, Segmentor segmentor, const PipelineConfig& cfg,
                      FcmResult* fcm_state) {
  const GrayRaster& r = diff.raster;
  // No contrast at all means no change; every clustering would tie here.
  const auto [lo, hi] = std::minmax_element(r.values().begin(), r.values().end());
  if (*lo == *hi) return ChangeMap(r.width(), r.height());
  switch (segmentor) {
    case Segmentor::Otsu:
      return threshold_change_map(r.values(), otsu_threshold(r.values()), r.width(), r.height());
    case Segmentor::KMeans: {
      const KMeansResult km = kmeans(r.values(), cfg.fcm.clusters, cfg.seed, cfg.fcm.max_iter);
      return labels_to_change_map(km.labels, km.centers, r.width(), r.height());
    }
    case Segmentor::Fcm: {
      FcmConfig fc = cfg.fcm;
      fc.seed = cfg.seed;
      FcmResult result = fcm(r.values(), fc);
      ChangeMap map = to_change_map(result.u, result.v, r.width(), r.height());
      if (fcm_state) *fcm_state = std::move(result);
      return map;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown segmentor");
}

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::IoFailure, "cannot create output directory " + dir.string());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

ChangeMap load_truth(const fs::path& path, const GrayRaster& like) {
  const GrayRaster raw = load_raster(path);
  require_same_shape(raw, like);
  return ChangeMap::from_raster(raw);
}

}  // namespace

RunResult run(const PipelineConfig& cfg) {
  validate(cfg);
  const GrayRaster t1 = load_raster(cfg.t1);
  const GrayRaster t2 = load_raster(cfg.t2);
  require_same_shape(t1, t2);
  std::optional<ChangeMap> truth;
  if (cfg.truth) truth = load_truth(*cfg.truth, t1);

  ensure_dir(cfg.out_dir);
  DifferenceMap fused = build_difference_map(t1, t2, cfg);
  FcmResult state;
  ChangeMap map = segment_map(fused, cfg.segmentor, cfg, &state);

  save_raster(fused.raster, cfg.out_dir / "fused_diff.png", ImageFormat::Png);
  save_raster(map.to_raster(), cfg.out_dir / "change_map.png", ImageFormat::Png);
  if (cfg.fcm_dump && cfg.segmentor == Segmentor::Fcm) {
    std::ostringstream dump;
    write_fcm_dump(dump, state.u, state.v);
    write_text(*cfg.fcm_dump, dump.str());
  }

  std::optional<EvalReport> rep;
  if (truth) {
    rep = report(map, *truth);
    write_text(cfg.out_dir / "report.csv",
               csv_header() + "\n" +
                   csv_row(std::string(method_name(cfg.segmentor)), cfg.test_id, *rep) + "\n");
  }
  return {std::move(fused), std::move(map), rep};
}

std::vector<CompareRow> compare(const std::vector<TestSet>& sets,
                                const std::vector<Segmentor>& methods,
                                const PipelineConfig& base, unsigned jobs) {
  validate(base);
  if (sets.empty()) throw Error(ErrorCode::InvalidArgument, "compare needs at least one test set");
  if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "compare needs at least one method");
  ensure_dir(base.out_dir);

  // reports[s][m]
  auto evaluate_set = [&](const TestSet& set) {
    const GrayRaster t1 = load_raster(set.t1);
    const GrayRaster t2 = load_raster(set.t2);
    require_same_shape(t1, t2);
    const ChangeMap truth = load_truth(set.truth, t1);
    const DifferenceMap fused = build_difference_map(t1, t2, base);
    save_raster(fused.raster, base.out_dir / ("fused_diff_" + set.id + ".png"), ImageFormat::Png);
    std::vector<EvalReport> out;
    for (Segmentor m : methods) {
      const ChangeMap map = segment_map(fused, m, base);
      save_raster(map.to_raster(),
                  base.out_dir / ("change_map_" + std::string(method_name(m)) + "_" + set.id + ".png"),
                  ImageFormat::Png);
      out.push_back(report(map, truth));
    }
    return out;
  };

  std::vector<std::vector<EvalReport>> reports(sets.size());
  const std::size_t batch = std::max(1u, jobs);
  for (std::size_t start = 0; start < sets.size(); start += batch) {
    std::vector<std::future<std::vector<EvalReport>>> pending;
    const std::size_t end = std::min(sets.size(), start + batch);
    for (std::size_t s = start; s < end; ++s) {
      pending.push_back(std::async(batch > 1 ? std::launch::async : std::launch::deferred,
                                   evaluate_set, std::cref(sets[s])));
    }
    for (std::size_t s = start; s < end; ++s) reports[s] = pending[s - start].get();
  }

  std::vector<CompareRow> rows;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    for (std::size_t s = 0; s < sets.size(); ++s) {
      rows.push_back({methods[m], sets[s].id, reports[s][m]});
    }
  }
  write_text(base.out_dir / "report.csv", compare_csv(rows));
  return rows;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const CompareRow& row : rows) {
    out += csv_row(std::string(method_name(row.method)), row.test_id, row.report) + "\n";
  }
  return out;
}

RoundTripStats dwt_roundtrip(const GrayRaster& raster, std::size_t levels,
                             const fs::path* pyramid_dump) {
  const auto [padded, record] = pad_to_pow2(raster.grid());
  const WaveletPyramid pyramid = dwt2(padded, levels);
  if (pyramid_dump) save_pyramid_debug(pyramid, *pyramid_dump);
  const RealGrid back = crop(idwt2(pyramid), record);

  RoundTripStats stats;
  stats.side = pyramid.side();
  stats.levels = levels;
  for (std::size_t i = 0; i < back.size(); ++i) {
    stats.max_abs_error = std::max(stats.max_abs_error, std::abs(back.values()[i] - raster.values()[i]));
  }
  for (double v : padded.values()) stats.energy_in += v * v;
  for (double v : pyramid.coeffs().values()) stats.energy_coeffs += v * v;
  return stats;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::CorruptImage:
    case ErrorCode::IoFailure:
      return 3;
    case ErrorCode::InvalidArgument:
    case ErrorCode::WeightOutOfRange:
    case ErrorCode::TooManyLevels:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::RecordMismatch:
      return 2;
    default:
      return 4;
  }
}

}  // namespace chdet
