#pragma once

#include <cstdint>
#include <span>

#include "citegrowth/graph.hpp"
#include "citegrowth/models.hpp"

namespace citegrowth {

struct SimulationStats {
  long nodes_inserted = 0;
  long edges_created = 0;
  /// Insertions where fewer positive-weight candidates existed than the
  /// out-degree; the missing slots were filled uniformly at random.
  long fallback_events = 0;
  long fallback_slots = 0;
  long subspace_shifts = 0;
};

/// Seed graph with fitness and location drawn for every node from the
/// model's samplers. LBM-G seed locations come from the initial subspace.
GrowthGraph init_from_seed(std::span<const SeedNode> nodes, std::span<const Edge> edges,
                           const ModelSpec& model, std::uint64_t rng_seed);

/// Grows `seed` year by year following `schedule`. Within a year nodes arrive
/// one at a time (node j of m gets sub_year_time j/m) and each picks its
/// out-degree worth of distinct targets among all nodes inserted before it.
GrowthGraph run_simulation(const GrowthGraph& seed, const YearSchedule& schedule, const ModelSpec& model,
                           std::uint64_t rng_seed, SimulationStats* stats = nullptr);

/// Initial mean of the active subspace: centre of the unit hypercube.
Location initial_subspace_mean(int dim);

} // namespace citegrowth
