#include "citegrowth/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "citegrowth/sampling.hpp"

namespace citegrowth {

namespace {

constexpr std::uint64_t kSeedStream = 0;
constexpr std::uint64_t kGrowthStream = 1;

ActiveSubspace initial_subspace(const ModelSpec& model) {
  return ActiveSubspace{initial_subspace_mean(model.location->dim), model.subspace->sigma, 0};
}

double draw_fitness(const ModelSpec& model, Rng& rng) {
  return model.fitness ? sample_fitness(rng, model.fitness->alpha, model.fitness->xm) : 1.0;
}

/// Mutable per-run arrays mirroring the graph, laid out for the weight kernels.
class GrowthState {
public:
  GrowthState(const GrowthGraph& seed, const ModelSpec& model, std::int64_t capacity)
      : model_(model), degree_(capacity), fitness_(capacity) {
    const int dim = model.location ? model.location->dim : 0;
    locations_.resize(dim, dim > 0 ? capacity : 0);
    for (const auto& node : seed.nodes()) {
      fitness_[size_] = node.fitness;
      degree_[size_] = model.degree == DegreeMode::InPlusOne ? 1.0 : node.out_degree;
      if (dim > 0) {
        if (node.location.size() != dim)
          throw std::invalid_argument("seed node " + std::to_string(node.id) + " lacks a " +
                                      std::to_string(dim) + "-dimensional location");
        locations_.col(size_) = node.location;
      }
      ++size_;
    }
    for (const auto& e : seed.edges())
      degree_[e.cited] += 1.0;
  }

  Eigen::Index size() const { return size_; }

  AttachmentView view() const {
    const auto n = size_;
    if (locations_.rows() > 0)
      return {degree_.head(n), fitness_.head(n), locations_.leftCols(n)};
    return {degree_.head(n), fitness_.head(n), locations_.leftCols(0)};
  }

  void add(double fitness, const Location& loc, std::span<const Eigen::Index> cited) {
    fitness_[size_] = fitness;
    degree_[size_] = model_.degree == DegreeMode::InPlusOne ? 1.0 : static_cast<double>(cited.size());
    if (locations_.rows() > 0)
      locations_.col(size_) = loc;
    for (auto c : cited)
      degree_[c] += 1.0;
    ++size_;
  }

private:
  const ModelSpec& model_;
  Eigen::ArrayXd degree_;
  Eigen::ArrayXd fitness_;
  Eigen::MatrixXd locations_;
  Eigen::Index size_ = 0;
};

std::vector<Eigen::Index> choose_targets(const ModelSpec& model, const GrowthState& state, const Location& loc,
                                         int k, Rng& rng, SimulationStats& stats) {
  const auto n = state.size();
  std::vector<Eigen::Index> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  if (k == 0)
    return chosen;
  if (k > n)
    throw InvariantError("out-degree " + std::to_string(k) + " exceeds the " + std::to_string(n) +
                         " nodes available");

  Weights w;
  Weights log_w;
  const bool use_log = model.uses_location();
  if (n < 2) {
    w = Weights::Ones(n);
  } else if (use_log) {
    log_w = compute_log_weights(model, state.view(), loc, n);
    const double top = log_w.maxCoeff();
    w = std::isfinite(top) ? Weights((log_w - top).exp()) : Weights::Zero(n);
  } else {
    w = compute_weights(model, state.view(), loc, n);
  }
  detail::sequential_draws(w, use_log && n >= 2 ? &log_w : nullptr, k, rng, chosen);

  if (static_cast<int>(chosen.size()) < k) {
    // Not enough positive weights: fill the rest uniformly from unchosen nodes.
    ++stats.fallback_events;
    std::vector<char> taken(static_cast<std::size_t>(n), 0);
    for (auto c : chosen)
      taken[static_cast<std::size_t>(c)] = 1;
    std::vector<Eigen::Index> pool;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!taken[static_cast<std::size_t>(i)])
        pool.push_back(i);
    while (static_cast<int>(chosen.size()) < k) {
      const auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(pool.size()));
      chosen.push_back(pool[pick]);
      pool[pick] = pool.back();
      pool.pop_back();
      ++stats.fallback_slots;
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

} // namespace

Location initial_subspace_mean(int dim) { return Location::Constant(dim, 0.5); }

GrowthGraph init_from_seed(std::span<const SeedNode> nodes, std::span<const Edge> edges,
                           const ModelSpec& model, std::uint64_t rng_seed) {
  model.validate();
  GrowthGraph bare = seed_graph(nodes, edges);
  Rng rng(derive_seed(rng_seed, kSeedStream));
  std::optional<ActiveSubspace> subspace;
  if (model.kind == ModelKind::LBMG)
    subspace = initial_subspace(model);

  GrowthGraph g;
  for (auto rec : bare.nodes()) {
    rec.fitness = draw_fitness(model, rng);
    if (model.kind == ModelKind::LBM)
      rec.location = sample_location_uniform(rng, model.location->dim);
    else if (subspace)
      rec.location = sample_location_active(rng, *subspace);
    g.add_node(std::move(rec));
  }
  for (const auto& e : bare.edges())
    g.add_edge(e.citing, e.cited);
  g.mark_seed_boundary();
  return g;
}

GrowthGraph run_simulation(const GrowthGraph& seed, const YearSchedule& schedule, const ModelSpec& model,
                           std::uint64_t rng_seed, SimulationStats* stats_out) {
  model.validate();
  int last_seed_year = std::numeric_limits<int>::min();
  for (const auto& n : seed.nodes())
    last_seed_year = std::max(last_seed_year, n.year);
  if (!schedule.empty() && schedule.entries.begin()->first <= last_seed_year)
    throw std::invalid_argument("schedule starts in " + std::to_string(schedule.entries.begin()->first) +
                                ", not after the last seed year " + std::to_string(last_seed_year));

  GrowthGraph g = seed;
  SimulationStats stats;
  if (schedule.empty()) {
    if (stats_out)
      *stats_out = stats;
    return g;
  }

  const auto capacity = static_cast<std::int64_t>(seed.node_count()) + schedule.node_count();
  GrowthState state(seed, model, capacity);
  Rng rng(derive_seed(rng_seed, kGrowthStream));

  std::optional<ActiveSubspace> subspace;
  std::optional<ShiftClock> clock;
  if (model.kind == ModelKind::LBMG) {
    // continue the walk from the mean the seed was drawn around
    subspace = initial_subspace(model);
    clock.emplace(model.subspace->shift, schedule.entries.begin()->first);
  }

  for (const auto& [year, degrees] : schedule.entries) {
    const auto m = static_cast<long>(degrees.size());
    for (long j = 0; j < m; ++j) {
      const int k = degrees[static_cast<std::size_t>(j)];
      if (k < 0)
        throw std::invalid_argument("negative out-degree in schedule year " + std::to_string(year));
      if (clock) {
        for (long s = clock->shifts_before(year, j, m); s > 0; --s) {
          *subspace = shift_subspace(*subspace, model.subspace->rho, rng);
          ++stats.subspace_shifts;
        }
      }
      NodeRecord rec;
      rec.id = static_cast<NodeId>(g.node_count());
      rec.year = year;
      rec.sub_year_time = static_cast<double>(j) / static_cast<double>(m);
      rec.fitness = draw_fitness(model, rng);
      if (model.kind == ModelKind::LBM)
        rec.location = sample_location_uniform(rng, model.location->dim);
      else if (subspace)
        rec.location = sample_location_active(rng, *subspace);

      const auto targets = choose_targets(model, state, rec.location, k, rng, stats);
      state.add(rec.fitness, rec.location, targets);
      g.add_node(rec);
      for (auto t : targets)
        g.add_edge(rec.id, static_cast<NodeId>(t));
      if (clock)
        clock->node_inserted();
      ++stats.nodes_inserted;
      stats.edges_created += k;
    }
  }
  if (stats_out)
    *stats_out = stats;
  return g;
}

} // namespace citegrowth
