#include <algorithm>
#include <cmath>

#include "chdet/error.hpp"
#include "chdet/segment.hpp"

namespace chdet {

namespace {

__extension__ using u128 = unsigned __int128;
__extension__ using i128 = __int128;

// Between-class variance of a split, up to the common factor 1/N^3:
// (n1*s0 - n0*s1)^2 / (n0*n1), with s the sums of bin indices per class.
struct Score {
  u128 num = 0;
  u128 den = 1;
};

Score split_score(std::uint64_t n0, std::uint64_t s0, std::uint64_t n1, std::uint64_t s1) {
  if (n0 == 0 || n1 == 0) return {};
  const i128 diff = static_cast<i128>(n1) * s0 - static_cast<i128>(n0) * s1;
  const u128 mag = static_cast<u128>(diff < 0 ? -diff : diff);
  return {mag * mag, static_cast<u128>(n0) * n1};
}

// a > b, exactly when the cross products fit in 128 bits.
bool greater(const Score& a, const Score& b) {
  u128 lhs;
  u128 rhs;
  if (!__builtin_mul_overflow(a.num, b.den, &lhs) && !__builtin_mul_overflow(b.num, a.den, &rhs)) {
    return lhs > rhs;
  }
  const long double la = static_cast<long double>(a.num) / static_cast<long double>(a.den);
  const long double lb = static_cast<long double>(b.num) / static_cast<long double>(b.den);
  return la > lb;
}

}  // namespace

std::vector<std::uint64_t> otsu_histogram(std::span<const double> x) {
  std::vector<std::uint64_t> hist(kOtsuBins, 0);
  for (double v : x) {
    const double clamped = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
    const auto bin = std::min<std::size_t>(kOtsuBins - 1,
                                           static_cast<std::size_t>(clamped * kOtsuBins));
    ++hist[bin];
  }
  return hist;
}

std::size_t otsu_boundary(std::span<const std::uint64_t> histogram) {
  if (histogram.size() != kOtsuBins) {
    throw Error(ErrorCode::ShapeMismatch, "Otsu expects a 256-bin histogram");
  }
  std::uint64_t total_n = 0;
  std::uint64_t total_s = 0;
  for (std::size_t b = 0; b < kOtsuBins; ++b) {
    total_n += histogram[b];
    total_s += histogram[b] * b;
  }

  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  std::size_t best = 1;
  Score best_score;
  for (std::size_t b = 1; b < kOtsuBins; ++b) {
    n0 += histogram[b - 1];
    s0 += histogram[b - 1] * (b - 1);
    const Score score = split_score(n0, s0, total_n - n0, total_s - s0);
    if (b == 1 || greater(score, best_score)) {
      best = b;
      best_score = score;
    }
  }
  return best;
}

double otsu_threshold(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorCode::EmptyInput, "Otsu on an empty input");
  const auto hist = otsu_histogram(x);
  return static_cast<double>(otsu_boundary(hist)) / static_cast<double>(kOtsuBins);
}

}  // namespace chdet
