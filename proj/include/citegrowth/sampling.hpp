#pragma once

#include <span>
#include <vector>

#include "citegrowth/common.hpp"

namespace citegrowth {

/// Draws `k` distinct indices by sequential weighted draws: each draw picks an
/// index with probability proportional to its weight among those not yet
/// chosen. Indices are returned in draw order.
///
/// Throws std::invalid_argument on a negative or non-finite weight, or when
/// `k` exceeds the number of strictly positive weights.
std::vector<Eigen::Index> sample_without_replacement(std::span<const double> weights, int k, Rng& rng);

/// Same law for weights given as logarithms (-inf marks a zero weight). The
/// largest remaining log weight is renormalised to 1 before each batch of
/// draws, so weights far below the double range are still ordered correctly.
std::vector<Eigen::Index> sample_without_replacement_log(const Weights& log_weights, int k, Rng& rng);

namespace detail {

/// Core sequential sampler. `w` holds non-negative weights and is modified:
/// chosen entries are zeroed. When every remaining entry of `w` has
/// underflowed to zero and `log_w` is given, `w` is rebuilt from `log_w`
/// over the unchosen entries. Appends at most `k` indices to `out`; stops
/// early when no positive weight remains.
void sequential_draws(Weights& w, const Weights* log_w, int k, Rng& rng, std::vector<Eigen::Index>& out);

} // namespace detail

} // namespace citegrowth
