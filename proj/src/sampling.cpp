#include "citegrowth/sampling.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace citegrowth {

namespace detail {

namespace {

void rebuild_from_log(Weights& w, const Weights& log_w) {
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w[i] >= 0.0 && log_w[i] > top)
      top = log_w[i];
  if (!std::isfinite(top)) {
    w.setZero();
    return;
  }
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w[i] = (w[i] >= 0.0) ? std::exp(log_w[i] - top) : 0.0;
}

} // namespace

void sequential_draws(Weights& w, const Weights* log_w, int k, Rng& rng, std::vector<Eigen::Index>& out) {
  // Chosen entries are parked at -1 until the end so rebuild_from_log can skip them.
  const auto first = out.size();
  for (int draw = 0; draw < k; ++draw) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
      if (w[i] > 0.0)
        total += w[i];
    if (total <= 0.0 && log_w != nullptr) {
      rebuild_from_log(w, *log_w);
      total = 0.0;
      for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w[i] > 0.0)
          total += w[i];
    }
    if (total <= 0.0)
      break;
    const double target = uniform01(rng) * total;
    double acc = 0.0;
    Eigen::Index pick = -1;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (w[i] <= 0.0)
        continue;
      acc += w[i];
      pick = i;
      if (target < acc)
        break;
    }
    out.push_back(pick);
    w[pick] = -1.0;
  }
  for (auto i = first; i < out.size(); ++i)
    w[out[i]] = 0.0;
}

} // namespace detail

std::vector<Eigen::Index> sample_without_replacement(std::span<const double> weights, int k, Rng& rng) {
  if (k < 0)
    throw std::invalid_argument("sample size must be non-negative");
  Weights w(static_cast<Eigen::Index>(weights.size()));
  Eigen::Index positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double x = weights[i];
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("weight " + std::to_string(i) + " is negative or not finite");
    positive += x > 0.0 ? 1 : 0;
    w[static_cast<Eigen::Index>(i)] = x;
  }
  if (k > positive)
    throw std::invalid_argument("cannot draw " + std::to_string(k) + " items: only " +
                                std::to_string(positive) + " positive weights (deficit " +
                                std::to_string(k - positive) + ")");
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(k));
  detail::sequential_draws(w, nullptr, k, rng, out);
  return out;
}

std::vector<Eigen::Index> sample_without_replacement_log(const Weights& log_weights, int k, Rng& rng) {
  if (k < 0)
    throw std::invalid_argument("sample size must be non-negative");
  Eigen::Index positive = 0;
  for (Eigen::Index i = 0; i < log_weights.size(); ++i) {
    if (std::isnan(log_weights[i]) || log_weights[i] == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("log weight " + std::to_string(i) + " is not a number or +inf");
    positive += std::isfinite(log_weights[i]) ? 1 : 0;
  }
  if (k > positive)
    throw std::invalid_argument("cannot draw " + std::to_string(k) + " items: only " +
                                std::to_string(positive) + " positive weights (deficit " +
                                std::to_string(k - positive) + ")");
  Weights w = Weights::Zero(log_weights.size());
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(k));
  if (k > 0) {
    detail::sequential_draws(w, &log_weights, k, rng, out);
  }
  return out;
}

} // namespace citegrowth
