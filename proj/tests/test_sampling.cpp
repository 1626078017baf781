#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "citegrowth/sampling.hpp"

using namespace citegrowth;

TEST_CASE("degenerate draws") {
  Rng rng(1);
  const std::vector<double> one{1, 0, 0};
  for (int i = 0; i < 100; ++i)
    CHECK(sample_without_replacement(one, 1, rng) == std::vector<Eigen::Index>{0});
  const std::vector<double> flat{1, 1, 1};
  for (int i = 0; i < 100; ++i) {
    auto got = sample_without_replacement(flat, 3, rng);
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<Eigen::Index>{0, 1, 2});
  }
  CHECK(sample_without_replacement(flat, 0, rng).empty());
}

TEST_CASE("first-draw frequency follows the weights") {
  Rng rng(42);
  const std::vector<double> w{3, 1};
  int zero = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    zero += sample_without_replacement(w, 1, rng)[0] == 0;
  CHECK(std::abs(static_cast<double>(zero) / n - 0.75) < 0.01);
}

TEST_CASE("ordered pair law of sequential draws") {
  // oracle: P(i then j) = w_i / W * w_j / (W - w_i)
  const std::vector<double> w{1, 2, 3, 4};
  const double total = 10;
  std::map<std::pair<Eigen::Index, Eigen::Index>, int> seen;
  Rng rng(9);
  const int n = 200000;
  for (int t = 0; t < n; ++t) {
    const auto got = sample_without_replacement(w, 2, rng);
    ++seen[{got[0], got[1]}];
  }
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (i == j)
        continue;
      const double expect = w[i] / total * w[j] / (total - w[i]);
      const double got = static_cast<double>(seen[{static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)}]) / n;
      CHECK(std::abs(got - expect) < 0.005);
    }
}

TEST_CASE("draws are distinct and positive-weight only") {
  Rng rng(5);
  std::vector<double> w(50);
  for (int trial = 0; trial < 200; ++trial) {
    for (auto& x : w)
      x = uniform01(rng) < 0.3 ? 0.0 : uniform01(rng);
    const int positive = static_cast<int>(std::count_if(w.begin(), w.end(), [](double x) { return x > 0; }));
    const int k = static_cast<int>(uniform01(rng) * (positive + 1));
    const auto got = sample_without_replacement(w, k, rng);
    CHECK(static_cast<int>(got.size()) == k);
    CHECK(std::set<Eigen::Index>(got.begin(), got.end()).size() == got.size());
    for (auto i : got)
      CHECK(w[static_cast<std::size_t>(i)] > 0.0);
  }
}

TEST_CASE("sampler errors") {
  Rng rng(1);
  const std::vector<double> w{1, 0, 2};
  CHECK_THROWS_WITH_AS(sample_without_replacement(w, 3, rng), doctest::Contains("deficit 1"), std::invalid_argument);
  const std::vector<double> neg{1, -1};
  CHECK_THROWS_AS(sample_without_replacement(neg, 1, rng), std::invalid_argument);
  const std::vector<double> nan{1, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(sample_without_replacement(nan, 1, rng), std::invalid_argument);
}

TEST_CASE("log-space sampler matches the linear law") {
  Rng rng(8);
  Weights lw(2);
  lw << std::log(3.0), 0.0;
  int zero = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    zero += sample_without_replacement_log(lw, 1, rng)[0] == 0;
  CHECK(std::abs(static_cast<double>(zero) / n - 0.75) < 0.01);
}

TEST_CASE("log-space sampler survives weights below the double range") {
  Rng rng(8);
  Weights lw(3);
  // linear weights e^-5000 * {3, 1, 0}
  lw << -5000.0 + std::log(3.0), -5000.0, -std::numeric_limits<double>::infinity();
  int zero = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto got = sample_without_replacement_log(lw, 2, rng);
    REQUIRE(got.size() == 2);
    CHECK(got[0] != 2);
    CHECK(got[1] != 2);
    zero += got[0] == 0;
  }
  CHECK(std::abs(static_cast<double>(zero) / n - 0.75) < 0.015);
  CHECK_THROWS_AS(sample_without_replacement_log(lw, 3, rng), std::invalid_argument);
}

TEST_CASE("log-space sampler rebuilds after the leading weight is taken") {
  // the remaining weights are ~e^-900 relative to the first, which underflows
  Rng rng(2);
  Weights lw(3);
  lw << 0.0, -900.0, -900.0 + std::log(3.0);
  int second_is_two = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto got = sample_without_replacement_log(lw, 2, rng);
    REQUIRE(got.size() == 2);
    CHECK(got[0] == 0);
    second_is_two += got[1] == 2;
  }
  CHECK(std::abs(static_cast<double>(second_is_two) / n - 0.75) < 0.015);
}
