#include "chdet/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "chdet/error.hpp"

namespace chdet {

ConfusionCounts confusion(const ChangeMap& map, const ChangeMap& truth) {
  if (map.width() != truth.width() || map.height() != truth.height()) {
    throw Error(ErrorCode::DimensionMismatch,
                "change map " + std::to_string(map.width()) + "x" + std::to_string(map.height()) +
                    " vs truth " + std::to_string(truth.width()) + "x" +
                    std::to_string(truth.height()));
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < map.size(); ++i) {
    const bool predicted = map.changed(i);
    const bool actual = truth.changed(i);
    if (predicted && actual) {
      ++c.tp;
    } else if (predicted) {
      ++c.fp;
    } else if (actual) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

Rates rates(const ConfusionCounts& c) {
  Rates r;
  const std::uint64_t positives = c.tp + c.fn;
  const std::uint64_t negatives = c.fp + c.tn;
  if (positives > 0) {
    r.tpr = static_cast<double>(c.tp) / positives;
    r.fnr = static_cast<double>(c.fn) / positives;
  } else {
    r.no_positives = true;
  }
  if (negatives > 0) {
    r.fpr = static_cast<double>(c.fp) / negatives;
    r.tnr = static_cast<double>(c.tn) / negatives;
  } else {
    r.no_negatives = true;
  }
  return r;
}

Kappa kappa(const ConfusionCounts& c) {
  const std::uint64_t total = c.total();
  if (total == 0) throw Error(ErrorCode::EmptyInput, "kappa over zero pixels");
  const double n = static_cast<double>(total);
  const double po = static_cast<double>(c.tp + c.tn) / n;
  const double pe = (static_cast<double>(c.tp + c.fp) * static_cast<double>(c.tp + c.fn) +
                     static_cast<double>(c.fn + c.tn) * static_cast<double>(c.fp + c.tn)) /
                    (n * n);
  if (pe >= 1.0) return {0.0, true};
  return {(po - pe) / (1.0 - pe), false};
}

EvalReport make_report(const ConfusionCounts& c) {
  const Rates r = rates(c);
  const Kappa k = kappa(c);
  return {c, r.tpr, r.fpr, r.tnr, r.fnr, k.value,
          r.no_positives || r.no_negatives || k.degenerate};
}

EvalReport report(const ChangeMap& map, const ChangeMap& truth) {
  return make_report(confusion(map, truth));
}

std::string csv_header() { return "method,test_set,tp,fp,tn,fn,kappa,degenerate"; }

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

}  // namespace

std::string csv_row(const std::string& method, const std::string& test_id, const EvalReport& r) {
  return method + "," + test_id + "," + fixed4(r.tpr) + "," + fixed4(r.fpr) + "," +
         fixed4(r.tnr) + "," + fixed4(r.fnr) + "," + fixed4(r.kappa) + "," +
         (r.degenerate ? "1" : "0");
}

void write_key_values(std::ostream& out, const std::string& method, const std::string& test_id,
                      const EvalReport& r) {
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "method=" << method << '\n'
      << "test_set=" << test_id << '\n'
      << "tp_count=" << r.counts.tp << '\n'
      << "fp_count=" << r.counts.fp << '\n'
      << "tn_count=" << r.counts.tn << '\n'
      << "fn_count=" << r.counts.fn << '\n'
      << "tpr=" << r.tpr << '\n'
      << "fpr=" << r.fpr << '\n'
      << "tnr=" << r.tnr << '\n'
      << "fnr=" << r.fnr << '\n'
      << "kappa=" << r.kappa << '\n'
      << "degenerate=" << (r.degenerate ? 1 : 0) << '\n';
  out.precision(precision);
}

}  // namespace chdet
