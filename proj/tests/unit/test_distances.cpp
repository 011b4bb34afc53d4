#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "hcmap/distances.hpp"
#include "oracles.hpp"

using namespace hcmap;

namespace {

TimeSeriesSet make_series(std::vector<std::vector<double>> rows) {
  TimeSeriesSet s;
  s.ids = gen::labels(rows.size(), "s");
  s.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t t = 0; t < rows[i].size(); ++t) s.values(static_cast<Index>(i), static_cast<Index>(t)) = rows[i][t];
  return s;
}

std::vector<double> random_walk(gen::Rng& rng, std::size_t T) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> out(T);
  double level = 0;
  for (auto& v : out) v = level += z(rng);
  return out;
}

}  // namespace

TEST_CASE("increments are first differences") {
  const auto inc = increments(make_series({{1, 2, 4}, {5, 5, 5}}));
  CHECK(inc.values.cols() == 2);
  CHECK(inc.values(0, 0) == 1);
  CHECK(inc.values(0, 1) == 2);
  CHECK(inc.values(1, 0) == 0);
  CHECK(inc.values(1, 1) == 0);

  const auto alt = increments(make_series({{0, 1, 0, 1}}));
  CHECK(alt.values(0, 0) == 1);
  CHECK(alt.values(0, 1) == -1);
  CHECK(alt.values(0, 2) == 1);

  CHECK_THROWS_AS(increments(make_series({{1}})), Error);
}

TEST_CASE("correlation distance endpoints") {
  gen::Rng rng(7);
  auto x = random_walk(rng, 200);
  std::vector<double> neg(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) neg[t] = -x[t];
  for (auto method : {CorrelationMethod::Pearson, CorrelationMethod::Spearman}) {
    const auto d = correlation_distance(make_series({x, x, neg}), method);
    CHECK(d.d(0, 1) <= 1e-7);
    CHECK(d.d(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    d.validate();
  }
}

TEST_CASE("independent long series sit near sqrt(1/2)") {
  gen::Rng rng(20240601);
  const auto x = random_walk(rng, 10000);
  const auto y = random_walk(rng, 10000);
  const auto d = correlation_distance(make_series({x, y}), CorrelationMethod::Pearson);

  std::vector<double> dx(x.size() - 1), dy(y.size() - 1);
  for (std::size_t t = 0; t + 1 < x.size(); ++t) {
    dx[t] = x[t + 1] - x[t];
    dy[t] = y[t + 1] - y[t];
  }
  const double rho = oracle::pearson(dx, dy);
  CHECK(d.d(0, 1) == doctest::Approx(std::sqrt((1 - rho) / 2)).epsilon(1e-12));
  CHECK(d.d(0, 1) >= 0.65);
  CHECK(d.d(0, 1) <= 0.75);
}

TEST_CASE("pearson matches the reference routine on random data") {
  gen::Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_walk(rng, 50), b = random_walk(rng, 50);
    const auto d = correlation_distance(make_series({a, b}), CorrelationMethod::Pearson);
    std::vector<double> da, db;
    for (std::size_t t = 0; t + 1 < a.size(); ++t) {
      da.push_back(a[t + 1] - a[t]);
      db.push_back(b[t + 1] - b[t]);
    }
    CHECK(d.d(0, 1) == doctest::Approx(std::sqrt((1 - oracle::pearson(da, db)) / 2)).epsilon(1e-12));
  }
}

TEST_CASE("spearman uses average ranks") {
  RowVector<double> row(5);
  row << 3, 1, 3, 2, 5;
  const auto r = average_ranks(row);
  CHECK(r(0) == 3.5);
  CHECK(r(1) == 1);
  CHECK(r(2) == 3.5);
  CHECK(r(3) == 2);
  CHECK(r(4) == 5);
}

TEST_CASE("spearman is invariant under increasing transforms of increments") {
  gen::Rng rng(11);
  const auto a = random_walk(rng, 300), b = random_walk(rng, 300);
  std::vector<double> c(a.size());
  c[0] = a[0];
  for (std::size_t t = 1; t < a.size(); ++t) c[t] = c[t - 1] + std::pow(a[t] - a[t - 1], 3);
  const auto d = correlation_distance(make_series({a, b, c}), CorrelationMethod::Spearman);
  CHECK(d.d(0, 2) <= 1e-7);
  CHECK(d.d(1, 2) == doctest::Approx(d.d(0, 1)).epsilon(1e-9));
}

TEST_CASE("constant increments are rejected") {
  CHECK_THROWS_AS(correlation_distance(make_series({{1, 2, 3}, {1, 3, 2}}), CorrelationMethod::Pearson), Error);
  try {
    correlation_distance(make_series({{1, 2, 3, 4}, {1, 3, 2, 5}}), CorrelationMethod::Spearman);
    FAIL("expected DegenerateSeries");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateSeries);
  }
}

TEST_CASE("hellinger closed forms") {
  RowVector<double> p(2), q(2);
  p << 0.5, 0.5;
  q << 1.0, 0.0;
  const double expected = std::sqrt(0.5 * (std::pow(std::sqrt(0.5) - 1.0, 2) + 0.5));
  CHECK(hellinger(p, q) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(hellinger(p, q) == doctest::Approx(0.5412).epsilon(1e-4));
  CHECK(hellinger(p, p) == 0.0);
}

TEST_CASE("distribution distance extremes") {
  // same increment multiset in a different order
  const auto same = distribution_distance(make_series({{0, 1, 3, 6, 10}, {0, 4, 7, 9, 10}}), 4);
  CHECK(same.d(0, 1) == 0.0);
  // increments {0, 0, 0} against {10, 10, 10}: disjoint bins
  const auto apart = distribution_distance(make_series({{0, 0, 0, 0}, {0, 10, 20, 30}}), 3);
  CHECK(apart.d(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  // pooled range empty
  const auto flat = distribution_distance(make_series({{0, 1, 2}, {5, 6, 7}}), 2);
  CHECK(flat.d(0, 1) == 0.0);
  CHECK_THROWS_AS(distribution_distance(make_series({{0, 1, 2}, {5, 6, 7}}), 1), Error);
}

TEST_CASE("blend collapses at the ends and mixes in between") {
  DistanceMatrix dep{{"a", "b"}, Matrix<double>::Zero(2, 2)};
  DistanceMatrix dist = dep;
  dep.d(0, 1) = dep.d(1, 0) = 0.6;
  dist.d(0, 1) = dist.d(1, 0) = 0.8;
  CHECK(blended_distance(dep, dist, 1.0) == dep);
  CHECK(blended_distance(dep, dist, 0.0) == dist);
  CHECK(blended_distance(dep, dist, 0.5).d(0, 1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(blended_distance(dep, dist, 1.5), Error);
}

TEST_CASE("hypothesis distances are valid matrices bounded by 1") {
  gen::Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 6; ++i) rows.push_back(random_walk(rng, 40));
    const auto s = make_series(rows);
    for (double theta : {0.0, 0.3, 1.0}) {
      HypothesisSpec spec{Hypothesis::CorrelationPlusDistribution, theta, CorrelationMethod::Spearman, std::nullopt};
      const auto d = hypothesis_distance(s, spec);
      d.validate();
      CHECK(d.d.maxCoeff() <= 1.0);
    }
  }
}

TEST_CASE("default bins") {
  CHECK(default_bins(1001) == 32);
  CHECK(default_bins(2) == 2);
  CHECK(default_bins(17) == 4);
}

TEST_CASE("hypothesis settings validation") {
  HypothesisSpec spec;
  spec.theta = 1.5;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.theta = 0.5;
  spec.bins = 1;
  CHECK_THROWS_AS(spec.validate(), Error);
}
