#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "citegrowth/common.hpp"
#include "citegrowth/models.hpp"

namespace citegrowth::theory {

/// Undirected growth graph in the one-node-one-edge regime: nodes 0..t-1,
/// every degree >= 1 and the degrees sum to 2(t-1).
struct TheoryGraph {
  std::vector<int> degree;
  Eigen::ArrayXd fitness; // may be empty for BA

  int size() const { return static_cast<int>(degree.size()); }
  double fitness_sum() const { return fitness.sum(); }                  // Xi
  double fitness_degree_sum() const;                                     // psi = sum xi_j D_j

  /// Throws std::invalid_argument on a degree-sum or size violation.
  void validate(bool needs_fitness) const;

  /// Random tree on t nodes (each new node links to a uniformly or
  /// preferentially chosen earlier node) with Pareto fitness.
  static TheoryGraph random(int t, Rng& rng, FitnessParams fitness = {});
};

/// Supported models: BA, AdditiveFitness, MultiplicativeFitness.
void check_theory_model(ModelKind model);

/// Probability that the entrant links to each node, under `model`.
Eigen::ArrayXd selection_probabilities(ModelKind model, const TheoryGraph& g);

/// E[p_i(t+1) - p_i(t) | G_{t-1}, xi_new], summed exactly over every
/// possible target of the entrant.
double exact_expected_change(ModelKind model, const TheoryGraph& g, int i, double xi_new);

/// Expected attachment probability of the entrant itself after it joins.
double entrant_expected_probability(ModelKind model, const TheoryGraph& g, double xi_new);

/// Closed forms: BA -D_i/(4t(t-1)); AF -(xi_i + D_i)(xi_new + 1) /
/// ((Xi + 2(t-1))(Xi + xi_new + 2t)); MF the lower-bound expression
/// xi_i D_i (xi_i psi - sum_l xi_l D_l (xi_l + xi_new)) / (psi^2 (psi + xi_i + xi_new)).
double theorem_formula(ModelKind model, const TheoryGraph& g, int i, double xi_new);

/// Size of the two competing terms of the MF bound,
/// xi_i D_i (xi_i psi + sum_l xi_l D_l (xi_l + xi_new)) / (psi^2 (psi + xi_i + xi_new)).
/// The bound slack is measured relative to this, since the bound itself
/// crosses zero.
double mf_bound_scale(const TheoryGraph& g, int i, double xi_new);

/// sum_{l != i} xi_l D_l - xi_new D_i. As xi_i grows without bound the exact
/// MF change behaves like margin / (xi_i D_i (D_i + 1)), so a large enough
/// fitness makes the change positive exactly when the margin is positive.
double mf_scaling_margin(const TheoryGraph& g, int i, double xi_new);

/// Smallest factor in {2^0, 2^1, ..., 2^19, 1e6} that makes node i's exact MF
/// change positive after multiplying its fitness by it; 0 if none does.
double mf_positive_scaling(const TheoryGraph& g, int i, double xi_new, double max_factor = 1e6);

inline constexpr double kEqualityTolerance = 1e-12;
inline constexpr double kMfRelativeSlack = 1e-2;
inline constexpr double kMfRegimeFactor = 100.0;

struct SizeRange {
  int min = 2;
  int max = 30;
};

struct TheoremReport {
  ModelKind model = ModelKind::BA;
  int trials = 0;
  double max_deviation = 0.0; // BA/AF: |exact - formula|; MF: largest slack shortfall / scale
  long violations = 0;
  bool pass = false;
  // MF only
  long sign_failures = 0;
  long bound_violations = 0;
  long bound_nodes_checked = 0;
  int regime_misses = 0; // bound trials that never reached the large-psi regime
};

/// BA/AF: random graphs with size in `sizes`, every node compared against the
/// closed form. MF: (a) per trial, the top-fitness node of a random graph
/// from `sizes` must turn positive under some fitness scaling with the
/// least-fit entrant (xi_new = xm); (b) on graphs with psi >=
/// 100 (max xi + xi_new) the exact change may not fall below the bound by
/// more than 1% of mf_bound_scale.
TheoremReport verify_theorem(ModelKind model, int trials, SizeRange sizes, std::uint64_t rng_seed);

/// Node range used for MF bound trials; the large-psi regime needs graphs
/// much larger than the equality checks use.
inline constexpr SizeRange kMfBoundSizes{1500, 3000};

/// `{"model":..,"trials":..,"max_deviation":..,"violations":..,"pass":..}`
std::string theorem_report_json(const TheoremReport& report);

} // namespace citegrowth::theory
