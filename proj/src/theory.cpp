#include "citegrowth/theory.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace citegrowth::theory {

double TheoryGraph::fitness_degree_sum() const {
  double psi = 0.0;
  for (int j = 0; j < size(); ++j)
    psi += fitness[j] * degree[static_cast<std::size_t>(j)];
  return psi;
}

void TheoryGraph::validate(bool needs_fitness) const {
  const int t = size();
  if (t < 2)
    throw std::invalid_argument("theory graph needs at least 2 nodes");
  long sum = 0;
  for (int d : degree) {
    if (d < 1)
      throw std::invalid_argument("theory graph degrees must be at least 1");
    sum += d;
  }
  if (sum != 2L * (t - 1))
    throw std::invalid_argument("degree sum " + std::to_string(sum) + " differs from 2(t-1) = " +
                                std::to_string(2L * (t - 1)));
  if (needs_fitness) {
    if (fitness.size() != t)
      throw std::invalid_argument("theory graph lacks a fitness per node");
    if ((fitness < 0.0).any() || !(fitness.sum() > 0.0))
      throw std::invalid_argument("theory graph fitness must be non-negative with a positive sum");
  }
}

TheoryGraph TheoryGraph::random(int t, Rng& rng, FitnessParams f) {
  if (t < 2)
    throw std::invalid_argument("theory graph needs at least 2 nodes");
  TheoryGraph g;
  g.degree.assign(static_cast<std::size_t>(t), 0);
  g.degree[0] = 1;
  g.degree[1] = 1;
  // endpoint list: a uniform pick from it is a degree-proportional pick
  std::vector<int> ends{0, 1};
  const bool preferential = uniform01(rng) < 0.5;
  for (int j = 2; j < t; ++j) {
    int target = 0;
    if (preferential)
      target = ends[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(ends.size()))];
    else
      target = static_cast<int>(uniform01(rng) * j);
    ++g.degree[static_cast<std::size_t>(target)];
    g.degree[static_cast<std::size_t>(j)] = 1;
    ends.push_back(target);
    ends.push_back(j);
  }
  g.fitness.resize(t);
  for (int j = 0; j < t; ++j)
    g.fitness[j] = sample_fitness(rng, f.alpha, f.xm);
  return g;
}

void check_theory_model(ModelKind model) {
  if (model != ModelKind::BA && model != ModelKind::AdditiveFitness && model != ModelKind::MultiplicativeFitness)
    throw std::invalid_argument("theorem checks cover ba, af and mf only");
}

namespace {

bool needs_fitness(ModelKind model) { return model != ModelKind::BA; }

double weight(ModelKind model, double degree, double fitness) {
  switch (model) {
  case ModelKind::BA: return degree;
  case ModelKind::AdditiveFitness: return fitness + degree;
  case ModelKind::MultiplicativeFitness: return fitness * degree;
  default: break;
  }
  throw std::invalid_argument("theorem checks cover ba, af and mf only");
}

Eigen::ArrayXd weights(ModelKind model, const TheoryGraph& g) {
  Eigen::ArrayXd w(g.size());
  for (int j = 0; j < g.size(); ++j)
    w[j] = weight(model, g.degree[static_cast<std::size_t>(j)], needs_fitness(model) ? g.fitness[j] : 1.0);
  return w;
}

void check_inputs(ModelKind model, const TheoryGraph& g, int i) {
  check_theory_model(model);
  g.validate(needs_fitness(model));
  if (i < 0 || i >= g.size())
    throw std::invalid_argument("node index " + std::to_string(i) + " outside the graph");
}

double entrant_weight(ModelKind model, double xi_new) { return weight(model, 1.0, xi_new); }

} // namespace

Eigen::ArrayXd selection_probabilities(ModelKind model, const TheoryGraph& g) {
  check_theory_model(model);
  g.validate(needs_fitness(model));
  const Eigen::ArrayXd w = weights(model, g);
  return w / w.sum();
}

double exact_expected_change(ModelKind model, const TheoryGraph& g, int i, double xi_new) {
  check_inputs(model, g, i);
  const Eigen::ArrayXd w = weights(model, g);
  const double total = w.sum();
  const double before = w[i] / total;
  const double fresh = entrant_weight(model, xi_new);
  const auto di = static_cast<double>(g.degree[static_cast<std::size_t>(i)]);
  double expected = 0.0;
  for (int s = 0; s < g.size(); ++s) {
    const double prob = w[s] / total;
    const auto ds = static_cast<double>(g.degree[static_cast<std::size_t>(s)]);
    const double grown = weight(model, ds + 1.0, needs_fitness(model) ? g.fitness[s] : 1.0);
    const double next_total = total - w[s] + grown + fresh;
    const double wi = (s == i) ? grown : weight(model, di, needs_fitness(model) ? g.fitness[i] : 1.0);
    expected += prob * (wi / next_total - before);
  }
  return expected;
}

double entrant_expected_probability(ModelKind model, const TheoryGraph& g, double xi_new) {
  check_theory_model(model);
  g.validate(needs_fitness(model));
  const Eigen::ArrayXd w = weights(model, g);
  const double total = w.sum();
  const double fresh = entrant_weight(model, xi_new);
  double expected = 0.0;
  for (int s = 0; s < g.size(); ++s) {
    const auto ds = static_cast<double>(g.degree[static_cast<std::size_t>(s)]);
    const double grown = weight(model, ds + 1.0, needs_fitness(model) ? g.fitness[s] : 1.0);
    expected += (w[s] / total) * fresh / (total - w[s] + grown + fresh);
  }
  return expected;
}

namespace {

/// sum_l xi_l D_l (xi_l + xi_new)
double mf_cross_sum(const TheoryGraph& g, double xi_new) {
  double acc = 0.0;
  for (int l = 0; l < g.size(); ++l)
    acc += g.fitness[l] * g.degree[static_cast<std::size_t>(l)] * (g.fitness[l] + xi_new);
  return acc;
}

} // namespace

double theorem_formula(ModelKind model, const TheoryGraph& g, int i, double xi_new) {
  check_inputs(model, g, i);
  const double t = g.size();
  const auto di = static_cast<double>(g.degree[static_cast<std::size_t>(i)]);
  switch (model) {
  case ModelKind::BA:
    return -di / (4.0 * t * (t - 1.0));
  case ModelKind::AdditiveFitness: {
    const double xi_prev = g.fitness_sum();
    const double xi_next = xi_prev + xi_new;
    return -(g.fitness[i] + di) * (xi_new + 1.0) / ((xi_prev + 2.0 * (t - 1.0)) * (xi_next + 2.0 * t));
  }
  case ModelKind::MultiplicativeFitness: {
    const double psi = g.fitness_degree_sum();
    const double xi = g.fitness[i];
    return xi * di * (xi * psi - mf_cross_sum(g, xi_new)) / (psi * psi * (psi + xi + xi_new));
  }
  default:
    break;
  }
  throw std::invalid_argument("theorem checks cover ba, af and mf only");
}

double mf_bound_scale(const TheoryGraph& g, int i, double xi_new) {
  check_inputs(ModelKind::MultiplicativeFitness, g, i);
  const double psi = g.fitness_degree_sum();
  const double xi = g.fitness[i];
  const auto di = static_cast<double>(g.degree[static_cast<std::size_t>(i)]);
  return xi * di * (xi * psi + mf_cross_sum(g, xi_new)) / (psi * psi * (psi + xi + xi_new));
}

double mf_scaling_margin(const TheoryGraph& g, int i, double xi_new) {
  check_inputs(ModelKind::MultiplicativeFitness, g, i);
  const auto di = static_cast<double>(g.degree[static_cast<std::size_t>(i)]);
  return g.fitness_degree_sum() - g.fitness[i] * di - xi_new * di;
}

double mf_positive_scaling(const TheoryGraph& g, int i, double xi_new, double max_factor) {
  check_inputs(ModelKind::MultiplicativeFitness, g, i);
  TheoryGraph scaled = g;
  const double base = g.fitness[i];
  for (double factor = 1.0;; factor *= 2.0) {
    const double f = std::min(factor, max_factor);
    scaled.fitness[i] = base * f;
    if (exact_expected_change(ModelKind::MultiplicativeFitness, scaled, i, xi_new) > 0.0)
      return f;
    if (f >= max_factor)
      return 0.0;
  }
}

namespace {

int draw_size(SizeRange r, Rng& rng) {
  return r.min + static_cast<int>(uniform01(rng) * static_cast<double>(r.max - r.min + 1));
}

void verify_equality(ModelKind model, int trials, SizeRange sizes, Rng& rng, TheoremReport& report) {
  const FitnessParams f{};
  for (int trial = 0; trial < trials; ++trial) {
    const auto g = TheoryGraph::random(draw_size(sizes, rng), rng, f);
    const double xi_new = sample_fitness(rng, f.alpha, f.xm);
    for (int i = 0; i < g.size(); ++i) {
      const double dev =
          std::abs(exact_expected_change(model, g, i, xi_new) - theorem_formula(model, g, i, xi_new));
      report.max_deviation = std::max(report.max_deviation, dev);
      if (!(dev <= kEqualityTolerance))
        ++report.violations;
    }
  }
  report.pass = report.violations == 0;
}

void verify_mf(int trials, SizeRange sizes, Rng& rng, TheoremReport& report) {
  const FitnessParams f{};
  const auto mf = ModelKind::MultiplicativeFitness;
  for (int trial = 0; trial < trials; ++trial) {
    // (a) sign under fitness scaling, least-fit entrant
    {
      const auto g = TheoryGraph::random(draw_size(sizes, rng), rng, f);
      Eigen::Index top = 0;
      g.fitness.maxCoeff(&top);
      if (mf_positive_scaling(g, static_cast<int>(top), f.xm) == 0.0)
        ++report.sign_failures;
    }
    // (b) bound in the large-psi regime
    bool in_regime = false;
    for (int attempt = 0; attempt < 100 && !in_regime; ++attempt) {
      const auto g = TheoryGraph::random(draw_size(kMfBoundSizes, rng), rng, f);
      const double xi_new = sample_fitness(rng, f.alpha, f.xm);
      if (g.fitness_degree_sum() < kMfRegimeFactor * (g.fitness.maxCoeff() + xi_new))
        continue;
      in_regime = true;
      for (int i = 0; i < g.size(); ++i) {
        const double exact = exact_expected_change(mf, g, i, xi_new);
        const double bound = theorem_formula(mf, g, i, xi_new);
        const double scale = mf_bound_scale(g, i, xi_new);
        const double shortfall = (bound - exact) / scale;
        report.max_deviation = std::max(report.max_deviation, shortfall);
        ++report.bound_nodes_checked;
        if (shortfall > kMfRelativeSlack)
          ++report.bound_violations;
      }
    }
    if (!in_regime)
      ++report.regime_misses;
  }
  report.violations = report.sign_failures + report.bound_violations;
  report.pass = report.violations == 0 && report.regime_misses == 0;
}

} // namespace

TheoremReport verify_theorem(ModelKind model, int trials, SizeRange sizes, std::uint64_t rng_seed) {
  check_theory_model(model);
  if (sizes.min < 2 || sizes.max < sizes.min)
    throw std::invalid_argument("theory graph sizes must satisfy 2 <= min <= max");
  if (trials < 1)
    throw std::invalid_argument("at least one trial is required");
  TheoremReport report;
  report.model = model;
  report.trials = trials;
  Rng rng(rng_seed);
  if (model == ModelKind::MultiplicativeFitness)
    verify_mf(trials, sizes, rng, report);
  else
    verify_equality(model, trials, sizes, rng, report);
  return report;
}

std::string theorem_report_json(const TheoremReport& report) {
  nlohmann::ordered_json j;
  j["model"] = to_string(report.model);
  j["trials"] = report.trials;
  j["max_deviation"] = report.max_deviation;
  j["violations"] = report.violations;
  j["pass"] = report.pass;
  if (report.model == ModelKind::MultiplicativeFitness) {
    j["sign_failures"] = report.sign_failures;
    j["bound_violations"] = report.bound_violations;
    j["bound_nodes_checked"] = report.bound_nodes_checked;
    j["regime_misses"] = report.regime_misses;
  }
  return j.dump(2);
}

} // namespace citegrowth::theory
