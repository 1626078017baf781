#include "citegrowth/evaluation.hpp"

#include <atomic>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include <json.hpp>

namespace citegrowth {

namespace {

double fixed6(double x) { return std::round(x * 1e6) / 1e6; }

nlohmann::ordered_json proportions_json(const CategoryDistribution& d) {
  nlohmann::ordered_json j;
  for (auto c : kAllCategories)
    j[category_code(c)] = fixed6(d.proportions[static_cast<int>(c)]);
  return j;
}

} // namespace

EvalReport evaluate_model(const CategoryDistribution& sim, const CategoryDistribution& ref, std::string label) {
  EvalReport r;
  r.model_label = std::move(label);
  r.distribution = sim;
  r.reference = ref;
  r.jsd2 = jsd2(sim.proportions, ref.proportions);
  return r;
}

std::string eval_report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["model"] = report.model_label;
  j["distribution"] = proportions_json(report.distribution);
  j["reference"] = proportions_json(report.reference);
  j["jsd2"] = fixed6(report.jsd2);
  return j.dump(2);
}

CategoryDistribution reference_mas() {
  return CategoryDistribution::from_proportions((Proportions() << 6.78, 26.38, 32.87, 11.96, 22.04).finished());
}

CategoryDistribution reference_aps() {
  return CategoryDistribution::from_proportions((Proportions() << 9.98, 1.42, 24.76, 0.09, 63.73).finished());
}

GrowthGraph simulate_run(const ExperimentSetup& setup, const ModelSpec& model, std::uint64_t run_seed,
                         SimulationStats* stats) {
  const auto seed = init_from_seed(setup.seed_nodes, setup.seed_edges, model, run_seed);
  return run_simulation(seed, setup.schedule, model, run_seed, stats);
}

std::string GridPoint::label() const {
  std::string s;
  for (const auto& [name, value] : params) {
    if (!s.empty())
      s += ' ';
    s += name + '=' + value;
  }
  return s;
}

const SweepRow& SweepResult::best() const {
  if (rows.empty())
    throw std::logic_error("empty sweep result");
  return rows.front();
}

SweepResult sweep(std::span<const GridPoint> grid, const ExperimentSetup& setup,
                  const CategoryDistribution& reference, const SweepOptions& options) {
  if (grid.empty())
    throw std::invalid_argument("sweep grid is empty");
  if (options.runs_per_point < 1)
    throw std::invalid_argument("runs per point must be at least 1");
  {
    std::set<std::string> labels;
    for (const auto& p : grid)
      if (!labels.insert(p.label()).second)
        throw std::invalid_argument("duplicate grid point '" + p.label() + "'");
  }
  const auto runs = static_cast<std::size_t>(options.runs_per_point);
  const auto tasks = grid.size() * runs;
  std::vector<CategoryDistribution> results(tasks);
  std::vector<std::exception_ptr> errors(tasks);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const auto& point = grid[t / runs];
      const int run = static_cast<int>(t % runs);
      try {
        const auto g = simulate_run(setup, point.model, sweep_run_seed(options.rng_seed, run));
        results[t] = category_distribution(g, setup.cutoff_year, setup.horizon_year, setup.classifier);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(tasks)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i)
      pool.emplace_back(worker);
    for (auto& th : pool)
      th.join();
  }
  for (std::size_t t = 0; t < tasks; ++t) {
    if (!errors[t])
      continue;
    try {
      std::rethrow_exception(errors[t]);
    } catch (const std::exception& e) {
      throw std::runtime_error("grid point '" + grid[t / runs].label() + "' run " + std::to_string(t % runs) +
                               ": " + e.what());
    }
  }

  SweepResult out;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    SweepRow row;
    row.point = grid[p];
    Proportions mean = Proportions::Zero();
    for (std::size_t r = 0; r < runs; ++r) {
      const auto& d = results[p * runs + r];
      mean += d.proportions;
      for (int c = 0; c < kCategoryCount; ++c)
        row.distribution.counts[c] += d.counts[c];
    }
    row.distribution.proportions = mean / static_cast<double>(runs);
    row.jsd2 = jsd2(row.distribution.proportions, reference.proportions);
    out.rows.push_back(std::move(row));
  }
  // stable: ties keep grid order
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.jsd2 < b.jsd2; });
  out.rows.front().best = true;
  return out;
}

std::vector<GridPoint> gamma_regime_grid(const ModelSpec& base, std::span<const GammaRegime> regimes) {
  if (!base.location)
    throw std::invalid_argument("gamma grid needs a location model");
  std::vector<GridPoint> grid;
  for (const auto& g : regimes) {
    GridPoint p;
    p.model = base;
    p.model.location->gamma = g;
    p.params.emplace_back("gamma", to_string(g));
    grid.push_back(std::move(p));
  }
  return grid;
}

std::vector<GridPoint> subspace_grid(const ModelSpec& base, ShiftPolicy::Unit unit, std::span<const int> periods,
                                     std::span<const double> sigmas) {
  if (base.kind != ModelKind::LBMG)
    throw std::invalid_argument("subspace grid needs an lbm-g model");
  std::vector<GridPoint> grid;
  for (int s : periods) {
    for (double sigma : sigmas) {
      GridPoint p;
      p.model = base;
      p.model.subspace->shift = {unit, s};
      p.model.subspace->sigma = sigma;
      p.model.subspace->rho = sigma;
      std::ostringstream sv;
      sv << sigma;
      p.params.emplace_back(unit == ShiftPolicy::Unit::Months ? "S_months" : "S_nodes", std::to_string(s));
      p.params.emplace_back("sigma", sv.str());
      grid.push_back(std::move(p));
    }
  }
  return grid;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  if (result.rows.empty())
    return;
  for (const auto& [name, value] : result.rows.front().point.params)
    out << name << ',';
  out << "er,fr,lr,sr,ot,jsd2\n";
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(6);
  for (const auto& row : result.rows) {
    for (const auto& [name, value] : row.point.params)
      out << value << ',';
    for (int c = 0; c < kCategoryCount; ++c)
      out << row.distribution.proportions[c] << ',';
    out << row.jsd2 << '\n';
  }
  out.flags(flags);
}

std::string sweep_summary_json(const SweepResult& result) {
  const auto& best = result.best();
  nlohmann::ordered_json j;
  nlohmann::ordered_json params;
  for (const auto& [name, value] : best.point.params)
    params[name] = value;
  j["best"] = {{"params", params},
               {"distribution", proportions_json(best.distribution)},
               {"jsd2", fixed6(best.jsd2)}};
  j["grid_points"] = result.rows.size();
  return j.dump(2);
}

std::vector<SensitivityRow> sensitivity(const GrowthGraph& graph, int cutoff_year, int horizon_year,
                                        std::span<const int> activations, std::span<const double> thresholds,
                                        const ClassifierParams& defaults) {
  if (activations.empty() || thresholds.empty())
    throw std::invalid_argument("sensitivity ranges must be non-empty");
  defaults.validate();
  const auto [amin, amax] = std::minmax_element(activations.begin(), activations.end());
  const auto [tmin, tmax] = std::minmax_element(thresholds.begin(), thresholds.end());
  if (defaults.activation_period < *amin || defaults.activation_period > *amax ||
      defaults.peak_threshold < *tmin || defaults.peak_threshold > *tmax)
    throw std::invalid_argument("default classifier parameters lie outside the sweep ranges");
  if (horizon_year - cutoff_year < defaults.min_history_years - 1)
    throw std::invalid_argument("year window shorter than the minimum history");

  const auto histories = citation_histories(graph, horizon_year);
  const auto base = category_distribution(graph, histories, cutoff_year, defaults);
  std::vector<SensitivityRow> rows;
  for (int a : activations) {
    for (double t : thresholds) {
      ClassifierParams p = defaults;
      p.activation_period = a;
      p.peak_threshold = t;
      const auto d = category_distribution(graph, histories, cutoff_year, p);
      for (auto c : kAllCategories) {
        SensitivityRow row{a, t, c, std::nullopt};
        const double y = base.proportions[static_cast<int>(c)];
        if (y > 0.0)
          row.ratio = d.proportions[static_cast<int>(c)] / y;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_sensitivity_csv(std::ostream& out, std::span<const SensitivityRow> rows) {
  out << "activation,threshold,category,ratio\n";
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(6);
  for (const auto& r : rows) {
    out << r.activation << ',' << r.threshold << ',' << category_code(r.category) << ',';
    if (r.ratio)
      out << *r.ratio;
    else
      out << "NA";
    out << '\n';
  }
  out.flags(flags);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
      ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

} // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman needs two equally long samples of size >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const Eigen::Map<const Eigen::ArrayXd> a(rx.data(), static_cast<Eigen::Index>(rx.size()));
  const Eigen::Map<const Eigen::ArrayXd> b(ry.data(), static_cast<Eigen::Index>(ry.size()));
  const Eigen::ArrayXd da = a - a.mean();
  const Eigen::ArrayXd db = b - b.mean();
  const double denom = std::sqrt((da * da).sum() * (db * db).sum());
  if (denom == 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  return (da * db).sum() / denom;
}

} // namespace citegrowth
