#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "chdet/error.hpp"
#include "chdet/segment.hpp"
#include "oracles.hpp"

using namespace chdet;

namespace {

// Independent restatement of one FCM sweep for fixed-point checks.
std::vector<double> centers_from(const std::vector<double>& x, const MembershipMatrix& u, double m) {
  std::vector<double> v(u.clusters());
  for (std::size_t j = 0; j < u.clusters(); ++j) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      num += std::pow(u(i, j), m) * x[i];
      den += std::pow(u(i, j), m);
    }
    v[j] = num / den;
  }
  return v;
}

double membership_from(const std::vector<double>& x, const std::vector<double>& v, std::size_t i,
                       std::size_t j, double m) {
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    s += std::pow(std::abs(x[i] - v[j]) / std::abs(x[i] - v[k]), 2.0 / (m - 1.0));
  }
  return 1.0 / s;
}

std::vector<double> separated_groups(std::size_t per_group, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> jitter(-0.03, 0.03);
  std::vector<double> x;
  for (double centre : {0.1, 0.5, 0.9})
    for (std::size_t i = 0; i < per_group; ++i) x.push_back(centre + jitter(rng));
  return x;
}

double sse(const std::vector<double>& x, const std::vector<std::size_t>& labels,
           const std::vector<double>& centers) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - centers[labels[i]]) * (x[i] - centers[labels[i]]);
  return s;
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

TEST_CASE("FCM separates two clean groups and satisfies its own update equations") {
  const std::vector<double> x{0, 0, 0, 0, 1, 1, 1, 1};
  FcmConfig cfg;
  cfg.clusters = 2;
  cfg.eps = 1e-10;
  cfg.seed = 42;
  const FcmResult r = fcm(x, cfg);
  CHECK(r.converged);
  const std::size_t low = r.v[0] < r.v[1] ? 0 : 1;
  CHECK(std::abs(r.v[low]) < 1e-3);
  CHECK(std::abs(r.v[1 - low] - 1.0) < 1e-3);
  for (std::size_t i = 0; i < 4; ++i) CHECK(r.u(i, low) >= 0.99);
  for (std::size_t i = 4; i < 8; ++i) CHECK(r.u(i, 1 - low) >= 0.99);

  // Fixed point: one more sweep by hand reproduces the state.
  const auto v = centers_from(x, r.u, 2.0);
  for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(v[j] - r.v[j]) < 1e-8);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == r.v[0] || x[i] == r.v[1]) continue;
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(membership_from(x, r.v, i, j, 2.0) - r.u(i, j)) < 1e-8);
  }
}

TEST_CASE("FCM with as many clusters as points lands one center per point") {
  const std::vector<double> x{0.1, 0.45, 0.9};
  FcmConfig cfg;
  cfg.clusters = 3;
  cfg.eps = 1e-12;
  cfg.max_iter = 1000;
  cfg.seed = 9;
  const FcmResult r = fcm(x, cfg);
  std::vector<double> sorted = r.v;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(sorted[j] - x[j]) < 1e-6);
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t ones = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      const double u = r.u(i, j);
      CHECK((std::abs(u) < 1e-6 || std::abs(u - 1.0) < 1e-6));
      ones += std::abs(u - 1.0) < 1e-6;
    }
    CHECK(ones == 1);
  }
  // Substituting the state back into the center update returns it.
  const auto v = centers_from(x, r.u, 2.0);
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(v[j] - r.v[j]) < 1e-6);
}

TEST_CASE("FCM on constant data collapses every center onto the constant") {
  const std::vector<double> x(50, 0.3);
  FcmConfig cfg;
  cfg.clusters = 4;
  std::vector<ClusterCenters> seen;
  const FcmResult r = fcm(x, cfg, [&](std::size_t, const MembershipMatrix&, const ClusterCenters& v) {
    seen.push_back(v);
  });
  REQUIRE(!seen.empty());
  for (double c : seen.front()) CHECK(c == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(r.converged);
  CHECK(r.iterations <= 3);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(r.u(i, 0) == 1.0);
}

TEST_CASE("FCM invariants on random data: stochastic rows, monotone objective") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(50 + 30 * trial);
    for (double& v : x) v = unit(rng) * unit(rng);
    FcmConfig cfg;
    cfg.clusters = 2 + trial % 5;
    cfg.seed = trial;
    double previous = std::numeric_limits<double>::infinity();
    fcm(x, cfg, [&](std::size_t, const MembershipMatrix& u, const ClusterCenters& v) {
      for (std::size_t i = 0; i < u.rows(); ++i) {
        const auto row = u.row(i);
        CHECK(std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) < 1e-9);
        for (double m : row) CHECK((m >= 0.0 && m <= 1.0));
      }
      const double j = fcm_objective(x, u, v, cfg.fuzziness);
      CHECK(j <= previous + 1e-12);
      previous = j;
    });
  }
}

TEST_CASE("FCM is deterministic and permutation equivariant") {
  std::mt19937_64 rng(7);
  const std::vector<double> x = separated_groups(40, rng);
  FcmConfig cfg;
  cfg.clusters = 3;
  cfg.eps = 1e-10;
  cfg.seed = 1234;
  const FcmResult a = fcm(x, cfg);
  const FcmResult b = fcm(x, cfg);
  CHECK(a.u == b.u);
  CHECK(a.v == b.v);

  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> px(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) px[i] = x[perm[i]];
  const FcmResult p = fcm(px, cfg);

  auto order_of = [](const ClusterCenters& v) {
    std::vector<std::size_t> o(v.size());
    std::iota(o.begin(), o.end(), std::size_t{0});
    std::sort(o.begin(), o.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    return o;
  };
  const auto oa = order_of(a.v);
  const auto op = order_of(p.v);
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(a.v[oa[k]] - p.v[op[k]]) < 1e-6);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(p.u(i, op[k]) - a.u(perm[i], oa[k])) < 1e-6);
}

TEST_CASE("FCM change maps are invariant to scaling data") {
  std::mt19937_64 rng(77);
  const std::vector<double> x = separated_groups(30, rng);
  FcmConfig cfg;
  cfg.clusters = 3;
  cfg.seed = 5;
  const FcmResult base = fcm(x, cfg);
  const ChangeMap expect = to_change_map(base.u, base.v, x.size(), 1);
  for (double alpha : {0.5, 2.0, 3.0}) {
    std::vector<double> scaled(x);
    for (double& v : scaled) v *= alpha;
    const FcmResult r = fcm(scaled, cfg);
    CHECK(to_change_map(r.u, r.v, x.size(), 1) == expect);
  }
}

TEST_CASE("FCM argument checks") {
  FcmConfig cfg;
  const std::vector<double> few(5, 0.1);
  CHECK(code_of([&] { fcm(few, cfg); }) == ErrorCode::TooFewPoints);
  std::vector<double> bad(10, 0.1);
  bad[3] = std::nan("");
  CHECK(code_of([&] { fcm(bad, cfg); }) == ErrorCode::NonFiniteInput);
  cfg.fuzziness = 1.0;
  CHECK(code_of([&] { fcm(bad, cfg); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("fcm_objective") {
  const std::vector<double> x{0.2, 0.2, 0.7};
  const MembershipMatrix hard(3, 2, std::vector<double>{1, 0, 1, 0, 0, 1});
  CHECK(fcm_objective(x, hard, {0.2, 0.7}, 2.0) == 0.0);

  const MembershipMatrix single(3, 1, std::vector<double>{1, 1, 1});
  const double mean = (0.2 + 0.2 + 0.7) / 3.0;
  const double expect = 2 * (0.2 - mean) * (0.2 - mean) + (0.7 - mean) * (0.7 - mean);
  CHECK(fcm_objective(x, single, {mean}, 2.0) == doctest::Approx(expect).epsilon(1e-14));

  const MembershipMatrix soft(3, 2, std::vector<double>{0.3, 0.7, 0.5, 0.5, 0.9, 0.1});
  CHECK(fcm_objective(x, soft, {0.1, 0.6}, 2.5) >= 0.0);
  CHECK(code_of([&] { fcm_objective(x, soft, {0.1}, 2.0); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("k-means examples") {
  SUBCASE("two pairs: matches the exhaustive optimum") {
    const std::vector<double> x{0, 0, 1, 1};
    const KMeansResult r = kmeans(x, 2, 3);
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < 15; ++mask) {
      std::vector<std::size_t> labels(4);
      std::vector<double> sums(2, 0.0), counts(2, 0.0);
      for (std::size_t i = 0; i < 4; ++i) {
        labels[i] = (mask >> i) & 1u;
        sums[labels[i]] += x[i];
        counts[labels[i]] += 1;
      }
      best = std::min(best, sse(x, labels, {sums[0] / counts[0], sums[1] / counts[1]}));
    }
    CHECK(sse(x, r.labels, r.centers) == doctest::Approx(best));
    CHECK(r.labels[0] == r.labels[1]);
    CHECK(r.labels[2] == r.labels[3]);
    CHECK(r.labels[0] != r.labels[2]);
    std::vector<double> c = r.centers;
    std::sort(c.begin(), c.end());
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 1.0);
  }

  SUBCASE("k = 1 is the mean") {
    const std::vector<double> x{0.1, 0.4, 0.4, 0.9, 0.35};
    const KMeansResult r = kmeans(x, 1, 0);
    CHECK(r.centers[0] == doctest::Approx(2.15 / 5.0).epsilon(1e-14));
  }

  SUBCASE("k = N puts every point on its own center") {
    const std::vector<double> x{0.3, 0.1, 0.8, 0.55, 0.2};
    const KMeansResult r = kmeans(x, x.size(), 11);
    CHECK(sse(x, r.labels, r.centers) == 0.0);
    std::vector<std::size_t> labels = r.labels;
    std::sort(labels.begin(), labels.end());
    CHECK(std::adjacent_find(labels.begin(), labels.end()) == labels.end());
  }

  SUBCASE("repeated values with more clusters than distinct values terminate") {
    const std::vector<double> x{0, 0, 0, 0.5, 0.5};
    const KMeansResult r = kmeans(x, 3, 2);
    CHECK(sse(x, r.labels, r.centers) == 0.0);
    for (std::size_t l : r.labels) CHECK(l < 3);
  }

  SUBCASE("deterministic and never worse than its start") {
    std::mt19937_64 rng(4);
    std::vector<double> x = separated_groups(50, rng);
    const KMeansResult a = kmeans(x, 3, 99);
    const KMeansResult b = kmeans(x, 3, 99);
    CHECK(a.labels == b.labels);
    CHECK(a.centers == b.centers);
    // Local optimum: each label is the nearest center.
    for (std::size_t i = 0; i < x.size(); ++i)
      for (double c : a.centers) CHECK(std::abs(x[i] - a.centers[a.labels[i]]) <= std::abs(x[i] - c));
  }

  CHECK(code_of([] { kmeans(std::vector<double>{0.1}, 2, 0); }) == ErrorCode::TooFewPoints);
}

TEST_CASE("Otsu threshold") {
  SUBCASE("bimodal data splits the modes") {
    std::vector<double> x(100, 0.1);
    x.insert(x.end(), 100, 0.9);
    const double t = otsu_threshold(x);
    CHECK(t > 0.1);
    CHECK(t <= 0.9);
    const ChangeMap m = threshold_change_map(x, t, 200, 1);
    CHECK(m.changed_count() == 100);
    for (std::size_t i = 100; i < 200; ++i) CHECK(m.changed(i));
  }

  SUBCASE("constant data gives a single class") {
    for (double c : {0.0, 0.4, 1.0}) {
      const std::vector<double> x(64, c);
      const double t = otsu_threshold(x);
      CHECK(t == 1.0 / 256.0);
      const std::size_t changed = threshold_change_map(x, t, 64, 1).changed_count();
      CHECK((changed == 0 || changed == 64));
    }
  }

  SUBCASE("matches brute force over all boundaries") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> size(1, 600);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> x(size(rng));
      const double a = unit(rng), b = unit(rng), spread = 0.3 * unit(rng);
      for (double& v : x) v = std::clamp((unit(rng) < 0.5 ? a : b) + spread * (unit(rng) - 0.5), 0.0, 1.0);
      CHECK(otsu_threshold(x) == static_cast<double>(oracle::otsu_boundary(x)) / 256.0);
    }
  }

  CHECK_THROWS_AS(otsu_threshold(std::vector<double>{}), Error);
}

TEST_CASE("change map extraction rules") {
  const ClusterCenters v{0.1, 0.9};
  const MembershipMatrix u(3, 2, std::vector<double>{0.3, 0.7, 0.8, 0.2, 0.5, 0.5});
  const ChangeMap m = to_change_map(u, v, 3, 1);
  CHECK(m.changed(0));
  CHECK_FALSE(m.changed(1));
  CHECK(m.changed(2));
  CHECK_THROWS_AS(to_change_map(u, v, 2, 2), Error);

  const std::vector<std::size_t> labels{0, 1, 0};
  const ChangeMap lm = labels_to_change_map(labels, {0.2, 0.8}, 3, 1);
  CHECK(lm.flags()[0] == 0);
  CHECK(lm.flags()[1] == 1);
  CHECK(lm.flags()[2] == 0);

  const std::vector<std::size_t> all_top{1, 1, 1, 1};
  CHECK(labels_to_change_map(all_top, {0.2, 0.8}, 2, 2).changed_count() == 4);

  // Equal centers: the lower index is the changed cluster.
  const ChangeMap eq = labels_to_change_map(labels, {0.5, 0.5}, 3, 1);
  CHECK(eq.changed(0));
  CHECK_FALSE(eq.changed(1));
  CHECK(eq.changed(2));
}

TEST_CASE("change map raster conversion and FCM dump") {
  const GrayRaster r(2, 2, std::vector<double>{0.0, 0.49, 0.5, 1.0});
  const ChangeMap m = ChangeMap::from_raster(r);
  CHECK(m.changed_count() == 2);
  CHECK(m.to_raster().values()[3] == 1.0);
  CHECK(m.changed_fraction() == 0.5);

  std::ostringstream out;
  write_fcm_dump(out, MembershipMatrix(2, 2, std::vector<double>{0.25, 0.75, 1, 0}), {0.1, 0.9});
  CHECK(out.str() == "0.10000000000000001 0.90000000000000002\n0.25 0.75\n1 0\n");
}
