#include <doctest.h>

#include <cmath>

#include "citegrowth/theory.hpp"

using namespace citegrowth;
using namespace citegrowth::theory;

namespace {

double rule(ModelKind m, double d, double xi) {
  if (m == ModelKind::BA)
    return d;
  if (m == ModelKind::AdditiveFitness)
    return d + xi;
  return d * xi;
}

/// Rebuilds the grown graph for every possible target and recomputes the
/// attachment probability of node i from scratch.
double brute_force_change(ModelKind m, const TheoryGraph& g, int i, double xi_new) {
  const int t = g.size();
  auto prob = [&](const std::vector<double>& deg, const std::vector<double>& fit, int node) {
    double total = 0.0;
    for (std::size_t j = 0; j < deg.size(); ++j)
      total += rule(m, deg[j], fit[j]);
    return rule(m, deg[static_cast<std::size_t>(node)], fit[static_cast<std::size_t>(node)]) / total;
  };
  std::vector<double> deg(g.degree.begin(), g.degree.end());
  std::vector<double> fit(static_cast<std::size_t>(t), 1.0);
  if (g.fitness.size() == t)
    for (int j = 0; j < t; ++j)
      fit[static_cast<std::size_t>(j)] = g.fitness[j];
  const double before = prob(deg, fit, i);
  double expected_after = 0.0;
  for (int s = 0; s < t; ++s) {
    auto d2 = deg;
    auto f2 = fit;
    d2[static_cast<std::size_t>(s)] += 1.0;
    d2.push_back(1.0);
    f2.push_back(xi_new);
    expected_after += prob(deg, fit, s) * prob(d2, f2, i);
  }
  return expected_after - before;
}

TheoryGraph make(std::vector<int> degree, std::vector<double> fitness = {}) {
  TheoryGraph g;
  g.degree = std::move(degree);
  g.fitness = Eigen::Map<Eigen::ArrayXd>(fitness.data(), static_cast<Eigen::Index>(fitness.size()));
  return g;
}

} // namespace

TEST_CASE("closed-form examples") {
  const auto two = make({1, 1}, {1.0, 1.0});
  CHECK(exact_expected_change(ModelKind::BA, two, 0, 1.0) == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(theorem_formula(ModelKind::BA, two, 0, 1.0) == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(theorem_formula(ModelKind::AdditiveFitness, two, 0, 1.0) == doctest::Approx(-1.0 / 7.0).epsilon(1e-15));
  CHECK(exact_expected_change(ModelKind::AdditiveFitness, two, 0, 1.0) == doctest::Approx(-1.0 / 7.0).epsilon(1e-14));

  const auto zero_fit = make({2, 1, 1}, {0.0, 1.0, 2.0});
  CHECK(theorem_formula(ModelKind::MultiplicativeFitness, zero_fit, 0, 1.0) == 0.0);
  CHECK(mf_bound_scale(zero_fit, 0, 1.0) == 0.0);
}

TEST_CASE("theory graph validation") {
  CHECK_THROWS_AS(make({1}).validate(false), std::invalid_argument);
  CHECK_THROWS_AS(make({2, 1, 2}).validate(false), std::invalid_argument);
  CHECK_THROWS_AS(make({3, 1, 0}).validate(false), std::invalid_argument);
  CHECK_THROWS_AS(make({2, 1, 1}, {1.0, -1.0, 1.0}).validate(true), std::invalid_argument);
  CHECK_THROWS_AS(make({2, 1, 1}).validate(true), std::invalid_argument);
  CHECK_NOTHROW(make({2, 1, 1}).validate(false));
  CHECK_THROWS_AS(check_theory_model(ModelKind::LBM), std::invalid_argument);
  CHECK_THROWS_AS(exact_expected_change(ModelKind::BA, make({1, 1}), 2, 1.0), std::invalid_argument);
}

TEST_CASE("random theory graphs satisfy the regime") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int t = 2 + static_cast<int>(uniform01(rng) * 40);
    const auto g = TheoryGraph::random(t, rng);
    CHECK(g.size() == t);
    CHECK_NOTHROW(g.validate(true));
    CHECK((g.fitness >= 1.0).all());
  }
}

TEST_CASE("enumeration agrees with a from-scratch oracle") {
  Rng rng(21);
  for (auto m : {ModelKind::BA, ModelKind::AdditiveFitness, ModelKind::MultiplicativeFitness})
    for (int trial = 0; trial < 40; ++trial) {
      const auto g = TheoryGraph::random(2 + static_cast<int>(uniform01(rng) * 25), rng);
      const double xi_new = sample_fitness(rng, 2.0, 1.0);
      for (int i = 0; i < g.size(); ++i)
        CHECK(std::abs(exact_expected_change(m, g, i, xi_new) - brute_force_change(m, g, i, xi_new)) < 1e-13);
    }
}

TEST_CASE("BA and AF closed forms are exact") {
  Rng rng(5);
  for (auto m : {ModelKind::BA, ModelKind::AdditiveFitness})
    for (int trial = 0; trial < 50; ++trial) {
      const auto g = TheoryGraph::random(2 + static_cast<int>(uniform01(rng) * 29), rng);
      const double xi_new = sample_fitness(rng, 2.0, 1.0);
      for (int i = 0; i < g.size(); ++i) {
        const double exact = exact_expected_change(m, g, i, xi_new);
        CHECK(std::abs(exact - theorem_formula(m, g, i, xi_new)) < kEqualityTolerance);
        CHECK(exact < 0.0);
      }
    }
}

TEST_CASE("probability conservation and BA fitness independence") {
  Rng rng(44);
  for (auto m : {ModelKind::BA, ModelKind::AdditiveFitness, ModelKind::MultiplicativeFitness})
    for (int trial = 0; trial < 50; ++trial) {
      auto g = TheoryGraph::random(2 + static_cast<int>(uniform01(rng) * 29), rng);
      const double xi_new = sample_fitness(rng, 2.0, 1.0);
      const auto p = selection_probabilities(m, g);
      CHECK((p >= 0.0).all());
      CHECK(std::abs(p.sum() - 1.0) < 1e-12);
      double total = entrant_expected_probability(m, g, xi_new);
      for (int i = 0; i < g.size(); ++i)
        total += exact_expected_change(m, g, i, xi_new);
      CHECK(std::abs(total) < 1e-12);

      if (m == ModelKind::BA) {
        const double before = exact_expected_change(m, g, 0, xi_new);
        g.fitness *= 7.5;
        CHECK(exact_expected_change(m, g, 0, 123.0) == before);
      }
    }
}

TEST_CASE("AF symmetry") {
  const auto g = make({2, 2, 1, 1, 2}, std::vector<double>(5, 1.5));
  // two leaves and three degree-2 nodes: equal degree and fitness give equal change
  CHECK(exact_expected_change(ModelKind::AdditiveFitness, g, 0, 2.0) ==
        doctest::Approx(exact_expected_change(ModelKind::AdditiveFitness, g, 1, 2.0)).epsilon(1e-15));
  CHECK(exact_expected_change(ModelKind::AdditiveFitness, g, 2, 2.0) ==
        doctest::Approx(exact_expected_change(ModelKind::AdditiveFitness, g, 3, 2.0)).epsilon(1e-15));
}

TEST_CASE("MF sign under fitness scaling follows the scaling margin") {
  Rng rng(61);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = TheoryGraph::random(3 + static_cast<int>(uniform01(rng) * 27), rng);
    const double xi_new = 1.0;
    for (int i = 0; i < g.size(); ++i) {
      const double margin = mf_scaling_margin(g, i, xi_new);
      if (std::abs(margin) < 1e-6)
        continue;
      TheoryGraph big = g;
      big.fitness[i] *= 1e6;
      const double change = exact_expected_change(ModelKind::MultiplicativeFitness, big, i, xi_new);
      CHECK((change > 0.0) == (margin > 0.0));
      if (margin > 0.0)
        CHECK(mf_positive_scaling(g, i, xi_new) > 0.0);
    }
  }
}

TEST_CASE("MF bound in the large-psi regime") {
  Rng rng(3);
  int checked = 0;
  for (int attempt = 0; attempt < 20 && checked < 3; ++attempt) {
    const auto g = TheoryGraph::random(2000, rng);
    const double xi_new = sample_fitness(rng, 2.0, 1.0);
    if (g.fitness_degree_sum() < kMfRegimeFactor * (g.fitness.maxCoeff() + xi_new))
      continue;
    ++checked;
    for (int i = 0; i < g.size(); i += 7) {
      const double exact = exact_expected_change(ModelKind::MultiplicativeFitness, g, i, xi_new);
      const double bound = theorem_formula(ModelKind::MultiplicativeFitness, g, i, xi_new);
      CHECK((bound - exact) / mf_bound_scale(g, i, xi_new) <= kMfRelativeSlack);
    }
  }
  CHECK(checked == 3);
}

TEST_CASE("theorem verification reports") {
  for (auto m : {ModelKind::BA, ModelKind::AdditiveFitness}) {
    const auto r = verify_theorem(m, 50, {2, 30}, 1);
    CHECK(r.pass);
    CHECK(r.violations == 0);
    CHECK(r.max_deviation < 1e-12);
  }
  const auto mf = verify_theorem(ModelKind::MultiplicativeFitness, 10, {2, 30}, 1);
  CHECK(mf.pass);
  CHECK(mf.sign_failures == 0);
  CHECK(mf.bound_nodes_checked > 0);
  const auto text = theorem_report_json(mf);
  for (const char* key : {"\"model\"", "\"trials\"", "\"max_deviation\"", "\"violations\"", "\"pass\""})
    CHECK(text.find(key) != std::string::npos);
  CHECK_THROWS_AS(verify_theorem(ModelKind::BA, 0, {2, 30}, 1), std::invalid_argument);
  CHECK_THROWS_AS(verify_theorem(ModelKind::BA, 5, {1, 30}, 1), std::invalid_argument);
}
