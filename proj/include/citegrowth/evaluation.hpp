#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "citegrowth/graph.hpp"
#include "citegrowth/models.hpp"
#include "citegrowth/simulation.hpp"
#include "citegrowth/trajectory.hpp"

namespace citegrowth {

/// Tolerance on the unit sum of a probability vector passed to jsd2.
inline constexpr double kProbabilitySumTolerance = 1e-9;

/// Squared Jensen-Shannon distance in bits: 0.5 KL(P||M) + 0.5 KL(Q||M) with
/// M = (P + Q) / 2 and 0 log 0 = 0. The result lies in [0, 1].
template <typename DerivedP, typename DerivedQ>
double jsd2(const Eigen::DenseBase<DerivedP>& p, const Eigen::DenseBase<DerivedQ>& q) {
  using std::log2;
  if (p.size() != q.size())
    throw std::invalid_argument("jsd2: vectors differ in length");
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (!(p(i) >= 0.0) || !(q(i) >= 0.0))
      throw std::invalid_argument("jsd2: negative or non-finite probability");
  if (std::abs(p.sum() - 1.0) > kProbabilitySumTolerance || std::abs(q.sum() - 1.0) > kProbabilitySumTolerance)
    throw std::invalid_argument("jsd2: input does not sum to 1");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double a = p(i);
    const double b = q(i);
    const double m = 0.5 * (a + b);
    // pair the two terms before accumulating so swapping p and q is bit-exact
    const double ta = a > 0.0 ? a * log2(a / m) : 0.0;
    const double tb = b > 0.0 ? b * log2(b / m) : 0.0;
    acc += ta + tb;
  }
  return std::max(0.0, 0.5 * acc);
}

struct EvalReport {
  std::string model_label;
  CategoryDistribution distribution;
  CategoryDistribution reference;
  double jsd2 = 0.0;
};

EvalReport evaluate_model(const CategoryDistribution& sim, const CategoryDistribution& ref, std::string label);
std::string eval_report_json(const EvalReport& report);

/// Real-data category shares (ER, FR, LR, SR, OT) for the MAS and APS
/// citation networks, normalised to sum 1.
CategoryDistribution reference_mas();
CategoryDistribution reference_aps();

/// Everything a sweep needs besides the grid.
struct ExperimentSetup {
  std::vector<SeedNode> seed_nodes;
  std::vector<Edge> seed_edges;
  YearSchedule schedule;
  int cutoff_year = 2000;
  int horizon_year = 2010;
  ClassifierParams classifier{};
};

/// Seed attributes plus growth for one run, both driven by `run_seed`.
GrowthGraph simulate_run(const ExperimentSetup& setup, const ModelSpec& model, std::uint64_t run_seed,
                         SimulationStats* stats = nullptr);

/// Seed of run `r` in a sweep. The same seeds are reused at every grid point.
inline std::uint64_t sweep_run_seed(std::uint64_t rng_seed, int run) {
  return derive_seed(rng_seed, static_cast<std::uint64_t>(run));
}

struct GridPoint {
  std::vector<std::pair<std::string, std::string>> params; // name, value (as printed)
  ModelSpec model;

  std::string label() const;
};

struct SweepRow {
  GridPoint point;
  CategoryDistribution distribution; // proportions averaged over runs, counts summed
  double jsd2 = 0.0;
  bool best = false;
};

struct SweepResult {
  std::vector<SweepRow> rows; // ascending jsd2; rows.front() is best
  const SweepRow& best() const;
};

struct SweepOptions {
  int runs_per_point = 3;
  std::uint64_t rng_seed = 1;
  int jobs = 1;
};

SweepResult sweep(std::span<const GridPoint> grid, const ExperimentSetup& setup,
                  const CategoryDistribution& reference, const SweepOptions& options);

/// LBM grid over gamma regimes.
std::vector<GridPoint> gamma_regime_grid(const ModelSpec& base, std::span<const GammaRegime> regimes);
/// LBM-G grid over shift period S x sigma (rho follows sigma).
std::vector<GridPoint> subspace_grid(const ModelSpec& base, ShiftPolicy::Unit unit, std::span<const int> periods,
                                     std::span<const double> sigmas);

/// CSV `param_1,...,param_k,er,fr,lr,sr,ot,jsd2`.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
std::string sweep_summary_json(const SweepResult& result);

struct SensitivityRow {
  int activation = 0;
  double threshold = 0.0;
  TrajectoryCategory category = TrajectoryCategory::Other;
  std::optional<double> ratio; // empty when the category is absent at the defaults
};

/// Relative proportion x / y of each category, where x is measured at each
/// (activation, threshold) pair and y at `defaults`.
std::vector<SensitivityRow> sensitivity(const GrowthGraph& graph, int cutoff_year, int horizon_year,
                                        std::span<const int> activations, std::span<const double> thresholds,
                                        const ClassifierParams& defaults);

/// CSV `activation,threshold,category,ratio`; undefined ratios print as NA.
void write_sensitivity_csv(std::ostream& out, std::span<const SensitivityRow> rows);

/// Spearman rank correlation with average ranks for ties. Returns NaN when
/// either input is constant.
double spearman(std::span<const double> x, std::span<const double> y);

} // namespace citegrowth
