#pragma once

// Reference computations used only by tests. They are deliberately built
// from definitions rather than from the library's code paths.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Orthonormal full-depth Haar matrix of size n (a power of two), assembled
// row by row from the Haar basis functions: row 0 is the constant, row
// 2^k + p is the scale-k wavelet at position p (+ on the left half of its
// support, - on the right).
inline Matrix haar_matrix(std::size_t n) {
  Matrix h(n, std::vector<double>(n, 0.0));
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t t = 0; t < n; ++t) h[0][t] = norm;
  for (std::size_t scale = 1, k = 0; scale < n; scale *= 2, ++k) {
    const std::size_t support = n / scale;
    const double amp = std::sqrt(static_cast<double>(scale)) * norm;
    for (std::size_t p = 0; p < scale; ++p) {
      for (std::size_t t = 0; t < support; ++t) {
        h[scale + p][p * support + t] = t < support / 2 ? amp : -amp;
      }
    }
  }
  return h;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix c(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a[0].size(), std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline std::vector<double> apply(const Matrix& h, const std::vector<double>& v) {
  std::vector<double> out(h.size(), 0.0);
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += h[i][j] * v[j];
  return out;
}

// Brute-force Otsu: for every boundary b in [1, 255], split the raw pixels
// by their 256-bin index and score n0*n1*(mean0 - mean1)^2 as the exact
// rational (s0*n1 - s1*n0)^2 / (n0*n1). Returns the first maximiser.
inline std::size_t otsu_boundary(const std::vector<double>& x) {
  __extension__ using i128 = __int128;
  std::vector<std::int64_t> bins;
  bins.reserve(x.size());
  for (double v : x) {
    auto b = static_cast<std::int64_t>(std::floor(v * 256.0));
    if (b > 255) b = 255;
    if (b < 0) b = 0;
    bins.push_back(b);
  }
  std::size_t best = 0;
  i128 best_num = -1;
  i128 best_den = 1;
  for (std::int64_t boundary = 1; boundary <= 255; ++boundary) {
    i128 n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (std::int64_t b : bins) {
      if (b < boundary) {
        ++n0;
        s0 += b;
      } else {
        ++n1;
        s1 += b;
      }
    }
    i128 num = 0, den = 1;
    if (n0 > 0 && n1 > 0) {
      const i128 d = s0 * n1 - s1 * n0;
      num = d * d;
      den = n0 * n1;
    }
    if (best_num < 0 || num * best_den > best_num * den) {
      best = static_cast<std::size_t>(boundary);
      best_num = num;
      best_den = den;
    }
  }
  return best;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("chdet_test_" + name + "_" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
