#include "citegrowth/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <json.hpp>

namespace citegrowth {

std::string category_code(TrajectoryCategory c) {
  switch (c) {
  case TrajectoryCategory::EarlyRiser: return "er";
  case TrajectoryCategory::FrequentRiser: return "fr";
  case TrajectoryCategory::LateRiser: return "lr";
  case TrajectoryCategory::SteadyRiser: return "sr";
  case TrajectoryCategory::Other: return "ot";
  }
  return "?";
}

std::string category_name(TrajectoryCategory c) {
  switch (c) {
  case TrajectoryCategory::EarlyRiser: return "EarlyRiser";
  case TrajectoryCategory::FrequentRiser: return "FrequentRiser";
  case TrajectoryCategory::LateRiser: return "LateRiser";
  case TrajectoryCategory::SteadyRiser: return "SteadyRiser";
  case TrajectoryCategory::Other: return "Other";
  }
  return "?";
}

void ClassifierParams::validate() const {
  if (activation_period < 1)
    throw std::invalid_argument("activation period must be at least 1 year");
  if (!(peak_threshold > 0.0 && peak_threshold <= 1.0))
    throw std::invalid_argument("peak threshold must lie in (0, 1]");
  if (min_history_years < 1)
    throw std::invalid_argument("minimum history must be at least 1 year");
}

long CategoryDistribution::total() const { return std::accumulate(counts.begin(), counts.end(), 0L); }

CategoryDistribution CategoryDistribution::from_counts(const std::array<long, kCategoryCount>& counts) {
  CategoryDistribution d;
  d.counts = counts;
  const long total = d.total();
  if (total > 0)
    for (int c = 0; c < kCategoryCount; ++c)
      d.proportions[c] = static_cast<double>(counts[c]) / static_cast<double>(total);
  return d;
}

CategoryDistribution CategoryDistribution::from_proportions(const Proportions& p) {
  if ((p.array() < 0.0).any() || !(p.sum() > 0.0))
    throw std::invalid_argument("proportions must be non-negative with a positive sum");
  CategoryDistribution d;
  d.proportions = p / p.sum();
  return d;
}

NormalizedTrajectory normalize_trajectory(std::span<const int> counts) {
  if (counts.empty())
    throw std::invalid_argument("cannot normalise an empty trajectory");
  NormalizedTrajectory out;
  const int top = *std::max_element(counts.begin(), counts.end());
  out.values.assign(counts.size(), 0.0);
  if (top <= 0) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t i = 0; i < counts.size(); ++i)
    out.values[i] = static_cast<double>(counts[i]) / static_cast<double>(top);
  return out;
}

std::vector<int> detect_peaks(std::span<const int> counts, std::span<const double> normalized, double threshold) {
  if (counts.size() != normalized.size())
    throw std::invalid_argument("counts and normalised trajectory differ in length");
  if (counts.empty())
    throw std::invalid_argument("cannot detect peaks in an empty trajectory");
  const int len = static_cast<int>(counts.size());
  std::vector<int> peaks;
  int last = -1;
  bool dipped = false; // below threshold since the last kept peak
  for (int t = 0; t < len; ++t) {
    if (normalized[t] < threshold) {
      dipped = true;
      continue;
    }
    const bool rises = t == 0 || counts[t] > counts[t - 1];
    const bool holds = t == len - 1 || counts[t] >= counts[t + 1];
    if (!rises || !holds)
      continue;
    if (last >= 0 && !dipped)
      continue;
    peaks.push_back(t);
    last = t;
    dipped = false;
  }
  return peaks;
}

TrajectoryCategory classify(std::span<const int> counts, const ClassifierParams& params) {
  params.validate();
  if (static_cast<int>(counts.size()) < params.min_history_years)
    throw std::invalid_argument("trajectory covers " + std::to_string(counts.size()) + " years, need at least " +
                                std::to_string(params.min_history_years));
  const double mean =
      static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0L)) / static_cast<double>(counts.size());
  if (mean < 1.0)
    return TrajectoryCategory::Other;

  if (std::is_sorted(counts.begin(), counts.end()) && counts.back() > counts.front())
    return TrajectoryCategory::SteadyRiser;

  const auto norm = normalize_trajectory(counts);
  const auto peaks = detect_peaks(counts, norm.values, params.peak_threshold);
  if (peaks.size() >= 2)
    return TrajectoryCategory::FrequentRiser;
  if (peaks.size() == 1) {
    const int at = peaks.front();
    if (at < params.activation_period)
      return TrajectoryCategory::EarlyRiser;
    if (at != static_cast<int>(counts.size()) - 1)
      return TrajectoryCategory::LateRiser;
  }
  return TrajectoryCategory::Other;
}

namespace {

void check_window(int cutoff_year, int horizon_year, const ClassifierParams& params) {
  params.validate();
  if (horizon_year - cutoff_year < params.min_history_years - 1)
    throw std::invalid_argument("horizon " + std::to_string(horizon_year) + " leaves less than " +
                                std::to_string(params.min_history_years) + " years of history after cutoff " +
                                std::to_string(cutoff_year));
}

} // namespace

std::vector<NodeLabel> classify_nodes(const GrowthGraph& graph, int cutoff_year, int horizon_year,
                                      const ClassifierParams& params) {
  check_window(cutoff_year, horizon_year, params);
  const auto histories = citation_histories(graph, horizon_year);
  std::vector<NodeLabel> labels;
  for (std::size_t i = graph.seed_count(); i < graph.node_count(); ++i) {
    const auto& n = graph.nodes()[i];
    if (n.year > cutoff_year)
      continue;
    labels.push_back({n.id, n.year, classify(histories[i], params)});
  }
  return labels;
}

CategoryDistribution category_distribution(const GrowthGraph& graph,
                                           const std::vector<std::vector<int>>& histories, int cutoff_year,
                                           const ClassifierParams& params) {
  std::array<long, kCategoryCount> counts{};
  for (std::size_t i = graph.seed_count(); i < graph.node_count(); ++i) {
    if (graph.nodes()[i].year > cutoff_year)
      continue;
    ++counts[static_cast<int>(classify(histories[i], params))];
  }
  return CategoryDistribution::from_counts(counts);
}

CategoryDistribution category_distribution(const GrowthGraph& graph, int cutoff_year, int horizon_year,
                                           const ClassifierParams& params) {
  check_window(cutoff_year, horizon_year, params);
  return category_distribution(graph, citation_histories(graph, horizon_year), cutoff_year, params);
}

void write_classification_csv(std::ostream& out, std::span<const NodeLabel> labels) {
  out << "node_id,year,category\n";
  for (const auto& l : labels)
    out << l.node << ',' << l.year << ',' << category_code(l.category) << '\n';
}

namespace {

double fixed6(double x) { return std::round(x * 1e6) / 1e6; }

} // namespace

std::string distribution_json(const CategoryDistribution& d) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json counts;
  for (auto c : kAllCategories) {
    j[category_code(c)] = fixed6(d.proportions[static_cast<int>(c)]);
    counts[category_code(c)] = d.counts[static_cast<int>(c)];
  }
  j["counts"] = counts;
  return j.dump(2);
}

CategoryDistribution parse_distribution_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("distribution JSON: ") + e.what());
  }
  CategoryDistribution d;
  Proportions p;
  for (auto c : kAllCategories) {
    const auto key = category_code(c);
    if (!j.contains(key) || !j[key].is_number())
      throw InputError("distribution JSON lacks numeric key '" + key + "'");
    p[static_cast<int>(c)] = j[key].get<double>();
  }
  if ((p.array() < 0.0).any() || !(p.sum() > 0.0))
    throw InputError("distribution JSON has negative or all-zero proportions");
  d.proportions = p / p.sum();
  if (j.contains("counts") && j["counts"].is_object())
    for (auto c : kAllCategories) {
      const auto key = category_code(c);
      if (j["counts"].contains(key))
        d.counts[static_cast<int>(c)] = j["counts"][key].get<long>();
    }
  return d;
}

} // namespace citegrowth
