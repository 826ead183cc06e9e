#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "chdet/segment.hpp"

namespace chdet {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

struct Rates {
  double tpr = 0.0;
  double fpr = 0.0;
  double tnr = 0.0;
  double fnr = 0.0;
  // Truth has no changed (resp. unchanged) pixels, so tpr/fnr (resp.
  // fpr/tnr) are reported as 0.
  bool no_positives = false;
  bool no_negatives = false;
};

struct Kappa {
  double value = 0.0;
  // Expected agreement is 1: both maps are a single, identical class.
  bool degenerate = false;
};

struct EvalReport {
  ConfusionCounts counts;
  double tpr = 0.0;
  double fpr = 0.0;
  double tnr = 0.0;
  double fnr = 0.0;
  double kappa = 0.0;
  bool degenerate = false;
};

/// Throws DimensionMismatch.
ConfusionCounts confusion(const ChangeMap& map, const ChangeMap& truth);
Rates rates(const ConfusionCounts& c);
/// Cohen's kappa for the 2x2 table. Throws EmptyInput when total is 0.
Kappa kappa(const ConfusionCounts& c);
EvalReport make_report(const ConfusionCounts& c);
EvalReport report(const ChangeMap& map, const ChangeMap& truth);

/// "method,test_set,tp,fp,tn,fn,kappa,degenerate"
std::string csv_header();
/// Rates and kappa to 4 decimals, degenerate as 0/1.
std::string csv_row(const std::string& method, const std::string& test_id, const EvalReport& r);

/// key=value lines with raw counts and full-precision rates.
void write_key_values(std::ostream& out, const std::string& method, const std::string& test_id,
                      const EvalReport& r);

}  // namespace chdet
