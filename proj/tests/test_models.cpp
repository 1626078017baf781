#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "citegrowth/models.hpp"

using namespace citegrowth;

namespace {

struct Snapshot {
  Eigen::ArrayXd degree;
  Eigen::ArrayXd fitness;
  Eigen::MatrixXd locations;
  AttachmentView view() const { return {degree, fitness, locations}; }
};

Snapshot random_snapshot(Rng& rng, int n, int dim) {
  Snapshot s;
  s.degree.resize(n);
  s.fitness.resize(n);
  s.locations.resize(dim, n);
  for (int i = 0; i < n; ++i) {
    s.degree[i] = 1 + static_cast<int>(uniform01(rng) * 10);
    s.fitness[i] = sample_fitness(rng, 2.0, 1.0);
    s.locations.col(i) = sample_location_uniform(rng, dim);
  }
  return s;
}

ModelSpec lbm_const(double gamma) {
  LocationParams loc;
  loc.gamma = GammaRegime::constant_value(gamma);
  return ModelSpec::lbm(loc);
}

} // namespace

TEST_CASE("attachment weight examples") {
  SUBCASE("BA uses the degree") {
    Snapshot s{Eigen::ArrayXd(2), Eigen::ArrayXd::Ones(2), Eigen::MatrixXd()};
    s.degree << 3, 1;
    const auto w = compute_weights(ModelSpec::ba(), s.view(), Location(), 2);
    CHECK(w[0] == 3.0);
    CHECK(w[1] == 1.0);
    CHECK(w[0] / w.sum() == doctest::Approx(0.75));
  }
  SUBCASE("AF and MF") {
    Snapshot s{Eigen::ArrayXd(2), Eigen::ArrayXd(2), Eigen::MatrixXd()};
    s.degree << 3, 1;
    s.fitness << 2, 5;
    const auto af = compute_weights(ModelSpec::additive(), s.view(), Location(), 2);
    const auto mf = compute_weights(ModelSpec::multiplicative(), s.view(), Location(), 2);
    CHECK(af[0] == 5.0);
    CHECK(af[1] == 6.0);
    CHECK(mf[0] == 6.0);
    CHECK(mf[1] == 5.0);
  }
  SUBCASE("LBM distance decay") {
    Snapshot s{Eigen::ArrayXd::Constant(1, 3.0), Eigen::ArrayXd::Constant(1, 2.0), Eigen::MatrixXd::Zero(2, 1)};
    Location incoming(2);
    incoming << std::log(2.0), 0.0;
    const auto w = compute_weights(lbm_const(1.0), s.view(), incoming, 10);
    CHECK(w[0] == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("LBM with zero gamma equals MF") {
  Rng rng(4);
  const auto s = random_snapshot(rng, 30, 2);
  const Location incoming = sample_location_uniform(rng, 2);
  const auto lbm = compute_weights(lbm_const(0.0), s.view(), incoming, 30);
  const auto mf = compute_weights(ModelSpec::multiplicative(), s.view(), Location(), 30);
  CHECK((lbm - mf).abs().maxCoeff() == 0.0);
}

TEST_CASE("log weights agree with linear weights") {
  Rng rng(6);
  const auto s = random_snapshot(rng, 25, 3);
  LocationParams loc;
  loc.dim = 3;
  const Location incoming = sample_location_uniform(rng, 3);
  for (const auto& model : {ModelSpec::ba(), ModelSpec::additive(), ModelSpec::multiplicative(), ModelSpec::lbm(loc),
                            ModelSpec::lbm_g(SubspaceParams{}, loc)}) {
    const auto w = compute_weights(model, s.view(), incoming, 25);
    const auto lw = compute_log_weights(model, s.view(), incoming, 25);
    CHECK((w.log() - lw).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("weight properties on random snapshots") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = random_snapshot(rng, 20, 2);
    const Location incoming = sample_location_uniform(rng, 2);
    for (const auto& model : {ModelSpec::ba(), ModelSpec::additive(), ModelSpec::multiplicative(), ModelSpec::lbm()}) {
      const auto w = compute_weights(model, s.view(), incoming, 20);
      CHECK((w > 0.0).all());
    }

    // BA ignores fitness and location
    const auto ba = compute_weights(ModelSpec::ba(), s.view(), incoming, 20);
    Snapshot other = s;
    other.fitness *= 3.7;
    other.locations.setRandom();
    const auto ba2 = compute_weights(ModelSpec::ba(), other.view(), sample_location_uniform(rng, 2), 20);
    CHECK((ba == ba2).all());

    // common fitness scale leaves the normalised law unchanged
    for (const auto& model : {ModelSpec::multiplicative(), ModelSpec::lbm()}) {
      const auto p = compute_weights(model, s.view(), incoming, 20);
      const auto q = compute_weights(model, other.view(), incoming, 20);
      Snapshot scaled = s;
      scaled.fitness *= 3.7;
      const auto r = compute_weights(model, scaled.view(), incoming, 20);
      CHECK(((p / p.sum()) - (r / r.sum())).abs().maxCoeff() < 1e-12);
      (void)q;
    }
  }
}

TEST_CASE("LBM weight decreases with distance") {
  Snapshot s{Eigen::ArrayXd::Constant(1, 4.0), Eigen::ArrayXd::Constant(1, 1.5), Eigen::MatrixXd::Zero(2, 1)};
  for (double gamma : {0.5, 3.0, 40.0}) {
    double last = std::numeric_limits<double>::infinity();
    for (double d = 0.0; d < 2.0; d += 0.05) {
      Location incoming(2);
      incoming << d, 0.0;
      const double w = compute_weights(lbm_const(gamma), s.view(), incoming, 100)[0];
      CHECK(w < last);
      last = w;
    }
  }
}

TEST_CASE("mismatched location sizes are rejected") {
  Snapshot s{Eigen::ArrayXd::Ones(2), Eigen::ArrayXd::Ones(2), Eigen::MatrixXd::Zero(2, 3)};
  Location incoming = Location::Zero(2);
  CHECK_THROWS_AS(compute_weights(ModelSpec::lbm(), s.view(), incoming, 2), std::invalid_argument);
  Snapshot t{Eigen::ArrayXd::Ones(2), Eigen::ArrayXd::Ones(2), Eigen::MatrixXd::Zero(2, 2)};
  CHECK_THROWS_AS(compute_weights(ModelSpec::lbm(), t.view(), Location::Zero(3), 2), std::invalid_argument);
}

TEST_CASE("gamma regimes") {
  CHECK(gamma_value(GammaRegime::constant_value(2.5), 1000) == 2.5);
  CHECK(gamma_value(GammaRegime::linear(), 100) == 100.0);
  CHECK(gamma_value(GammaRegime::sqrt(), 100) == 10.0);
  CHECK(gamma_value(GammaRegime::log(), 20) == doctest::Approx(2.995732273553991).epsilon(1e-15));
  CHECK_THROWS_AS(gamma_value(GammaRegime::log(), 1), std::invalid_argument);
}

TEST_CASE("Pareto fitness") {
  Rng rng(2024);
  long above_two = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = sample_fitness(rng, 2.0, 1.0);
    CHECK_FALSE(x < 1.0);
    above_two += x > 2.0;
  }
  // P(X > 2) = (xm / 2)^alpha
  CHECK(std::abs(static_cast<double>(above_two) / 1e5 - 0.25) < 0.01);

  double sum = 0.0;
  for (int i = 0; i < 1000000; ++i)
    sum += sample_fitness(rng, 2.0, 1.0);
  // mean alpha xm / (alpha - 1)
  CHECK(std::abs(sum / 1e6 - 2.0) < 0.05);

  for (int i = 0; i < 1000; ++i)
    CHECK(sample_fitness(rng, 3.0, 0.5) >= 0.5);
}

TEST_CASE("uniform locations") {
  Rng rng(31);
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(3);
  for (int i = 0; i < 100000; ++i) {
    const Location x = sample_location_uniform(rng, 3);
    REQUIRE(x.size() == 3);
    CHECK(((x.array() >= 0.0) && (x.array() <= 1.0)).all());
    sum += x.array();
  }
  CHECK((sum / 1e5 - 0.5).abs().maxCoeff() < 0.005);

  // Kolmogorov-Smirnov per coordinate against U(0,1), n = 10^4
  const int n = 10000;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    const Location p = sample_location_uniform(rng, 2);
    xs[static_cast<std::size_t>(i)] = p[0];
    ys[static_cast<std::size_t>(i)] = p[1];
  }
  const double critical = 1.6276 / std::sqrt(static_cast<double>(n)); // alpha = 1%
  for (auto* v : {&xs, &ys}) {
    std::sort(v->begin(), v->end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = (*v)[static_cast<std::size_t>(i)];
      d = std::max({d, (i + 1.0) / n - x, x - static_cast<double>(i) / n});
    }
    CHECK(d < critical);
  }
}

TEST_CASE("Gaussian active subspace") {
  Rng rng(77);
  ActiveSubspace sub{Location::Constant(2, 5.0), 0.0, 0};
  CHECK(sample_location_active(rng, sub) == sub.mu);

  sub.sigma = 1.0;
  Eigen::Array2d sum = Eigen::Array2d::Zero();
  for (int i = 0; i < 100000; ++i)
    sum += sample_location_active(rng, sub).array();
  CHECK((sum / 1e5 - 5.0).abs().maxCoeff() < 0.02);

  ActiveSubspace origin{Location::Zero(2), 2.0, 0};
  Eigen::Array2d s1 = Eigen::Array2d::Zero(), s2 = Eigen::Array2d::Zero();
  for (int i = 0; i < 100000; ++i) {
    const Eigen::Array2d x = sample_location_active(rng, origin).array();
    s1 += x;
    s2 += x * x;
  }
  const Eigen::Array2d mean = s1 / 1e5;
  const Eigen::Array2d sd = (s2 / 1e5 - mean * mean).sqrt();
  CHECK((sd - 2.0).abs().maxCoeff() < 0.05);
}

TEST_CASE("subspace shifts") {
  Rng rng(13);
  ActiveSubspace sub{Location::Constant(2, 0.5), 1.0, 0};
  const auto same = shift_subspace(sub, 0.0, rng);
  CHECK(same.mu == sub.mu);
  CHECK(same.shifts_applied == 1);
  CHECK(same.sigma == sub.sigma);
  CHECK_THROWS_AS(shift_subspace(sub, -1.0, rng), std::invalid_argument);

  // displacement after m shifts has per-coordinate variance m rho^2
  const int m = 5;
  const double rho = 1.5;
  const int trials = 10000;
  Eigen::Array2d s2 = Eigen::Array2d::Zero();
  for (int t = 0; t < trials; ++t) {
    ActiveSubspace cur = sub;
    for (int k = 0; k < m; ++k)
      cur = shift_subspace(cur, rho, rng);
    CHECK(cur.shifts_applied == m);
    const Eigen::Array2d d = (cur.mu - sub.mu).array();
    s2 += d * d;
  }
  const Eigen::Array2d var = s2 / trials;
  CHECK(((var / (m * rho * rho)) - 1.0).abs().maxCoeff() < 0.05);
}

TEST_CASE("shift due") {
  const ShiftPolicy nodes1{ShiftPolicy::Unit::Nodes, 1};
  CHECK(shift_due(nodes1, 0.0, 1));
  CHECK_FALSE(shift_due(nodes1, 0.0, 0));
  const ShiftPolicy months3{ShiftPolicy::Unit::Months, 3};
  CHECK(shift_due(months3, 0.25, 0));
  CHECK_FALSE(shift_due(months3, 0.2, 0));
  CHECK_THROWS_AS(shift_due(ShiftPolicy{ShiftPolicy::Unit::Months, 0}, 1.0, 0), std::invalid_argument);
}

TEST_CASE("shift clock") {
  auto count_year = [](ShiftClock& clock, int year, long m) {
    long shifts = 0;
    for (long j = 0; j < m; ++j) {
      shifts += clock.shifts_before(year, j, m);
      clock.node_inserted();
    }
    return shifts;
  };
  SUBCASE("yearly shifts") {
    ShiftClock clock({ShiftPolicy::Unit::Months, 12}, 1976);
    CHECK(count_year(clock, 1976, 50) == 0);
    for (int y = 1977; y < 1985; ++y)
      CHECK(count_year(clock, y, 37) == 1);
  }
  SUBCASE("monthly shifts, 120 nodes a year") {
    ShiftClock clock({ShiftPolicy::Unit::Months, 1}, 1976);
    CHECK(count_year(clock, 1976, 120) == 11);
    CHECK(count_year(clock, 1977, 120) == 12);
    CHECK(count_year(clock, 1978, 120) == 12);
  }
  SUBCASE("monthly shifts, sparse year catches up") {
    ShiftClock clock({ShiftPolicy::Unit::Months, 1}, 1976);
    CHECK(count_year(clock, 1976, 3) == 8); // grid points 1..8 months precede j/m = 2/3
    CHECK(count_year(clock, 1977, 3) == 12);
  }
  SUBCASE("every node") {
    ShiftClock clock({ShiftPolicy::Unit::Nodes, 1}, 1976);
    CHECK(count_year(clock, 1976, 10) == 9);
  }
  SUBCASE("every three nodes") {
    ShiftClock clock({ShiftPolicy::Unit::Nodes, 3}, 1976);
    CHECK(count_year(clock, 1976, 10) == 3);
  }
}

TEST_CASE("model validation") {
  CHECK_NOTHROW(ModelSpec::lbm_g().validate());
  auto bad = ModelSpec::additive(FitnessParams{0.0, 1.0});
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("alpha"), std::invalid_argument);
  auto neg_sigma = ModelSpec::lbm_g(SubspaceParams{-1.0, 1.0, {}});
  CHECK_THROWS_AS(neg_sigma.validate(), std::invalid_argument);
  auto stray = ModelSpec::ba();
  stray.fitness = FitnessParams{};
  CHECK_THROWS_AS(stray.validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_model_kind("xyz"), std::invalid_argument);
  CHECK(parse_model_kind("lbm-g") == ModelKind::LBMG);
}

TEST_CASE("model config round trip") {
  for (const auto& model : {ModelSpec::ba(), ModelSpec::additive({3.0, 0.5}), ModelSpec::multiplicative(),
                            ModelSpec::lbm({3, GammaRegime::constant_value(0.25)}),
                            ModelSpec::lbm_g({1.5, 0.5, {ShiftPolicy::Unit::Nodes, 40}})}) {
    std::stringstream ss;
    write_model_config(ss, model);
    CHECK(read_model_config(ss) == model);
  }
}

TEST_CASE("model config parsing") {
  std::istringstream cfg("# comment\nmodel = lbm-g\nsigma = 1.25\nshift_every = 6\n");
  const auto m = read_model_config(cfg);
  REQUIRE(m.subspace);
  CHECK(m.subspace->sigma == 1.25);
  CHECK(m.subspace->rho == 1.25);
  CHECK(m.subspace->shift.every == 6);
  CHECK(m.location->gamma.kind == GammaRegime::Kind::Log);

  std::istringstream unknown("model = ba\ncolour = blue\n");
  CHECK_THROWS_AS(read_model_config(unknown), InputError);
  std::istringstream missing("sigma = 2\n");
  CHECK_THROWS_AS(read_model_config(missing), InputError);
}
