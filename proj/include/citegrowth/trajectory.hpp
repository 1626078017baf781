#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "citegrowth/common.hpp"
#include "citegrowth/graph.hpp"

namespace citegrowth {

enum class TrajectoryCategory { EarlyRiser = 0, FrequentRiser, LateRiser, SteadyRiser, Other };

inline constexpr int kCategoryCount = 5;
inline constexpr std::array<TrajectoryCategory, kCategoryCount> kAllCategories = {
    TrajectoryCategory::EarlyRiser, TrajectoryCategory::FrequentRiser, TrajectoryCategory::LateRiser,
    TrajectoryCategory::SteadyRiser, TrajectoryCategory::Other};

/// Short lowercase label: er, fr, lr, sr, ot.
std::string category_code(TrajectoryCategory c);
/// Full name, e.g. "EarlyRiser".
std::string category_name(TrajectoryCategory c);

struct ClassifierParams {
  int activation_period = 5;
  double peak_threshold = 0.75;
  int min_history_years = 10;

  void validate() const;
};

using Proportions = Eigen::Matrix<double, kCategoryCount, 1>;

/// Share of nodes per category, ordered ER, FR, LR, SR, OT.
struct CategoryDistribution {
  Proportions proportions = Proportions::Zero();
  std::array<long, kCategoryCount> counts{};

  long total() const;
  static CategoryDistribution from_counts(const std::array<long, kCategoryCount>& counts);
  /// Builds from proportions (normalised to sum 1); counts stay zero.
  static CategoryDistribution from_proportions(const Proportions& p);
};

struct NormalizedTrajectory {
  std::vector<double> values;
  bool degenerate = false; // every count was zero
};

NormalizedTrajectory normalize_trajectory(std::span<const int> counts);

/// Offsets of distinct peaks, in increasing order. A peak is a local maximum
/// (strict rise on the left, no rise on the right) whose normalised height
/// reaches `threshold`; a later peak only counts when the trajectory dips
/// below the threshold somewhere after the previous kept peak.
std::vector<int> detect_peaks(std::span<const int> counts, std::span<const double> normalized, double threshold);

TrajectoryCategory classify(std::span<const int> counts, const ClassifierParams& params);

/// Labels every non-seed node published on or before `cutoff_year`, using
/// citations up to `horizon_year`.
struct NodeLabel {
  NodeId node = 0;
  int year = 0;
  TrajectoryCategory category = TrajectoryCategory::Other;
};

std::vector<NodeLabel> classify_nodes(const GrowthGraph& graph, int cutoff_year, int horizon_year,
                                      const ClassifierParams& params);

CategoryDistribution category_distribution(const GrowthGraph& graph, int cutoff_year, int horizon_year,
                                           const ClassifierParams& params);

/// Same as category_distribution over precomputed histories (see
/// citation_histories); avoids rescanning edges in sensitivity sweeps.
CategoryDistribution category_distribution(const GrowthGraph& graph,
                                           const std::vector<std::vector<int>>& histories, int cutoff_year,
                                           const ClassifierParams& params);

void write_classification_csv(std::ostream& out, std::span<const NodeLabel> labels);
/// `{"er":..,"fr":..,"lr":..,"sr":..,"ot":..,"counts":{...}}`
std::string distribution_json(const CategoryDistribution& d);
CategoryDistribution parse_distribution_json(const std::string& text);

} // namespace citegrowth
