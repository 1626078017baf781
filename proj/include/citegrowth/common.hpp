#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace citegrowth {

using NodeId = std::int64_t;
using Rng = std::mt19937_64;

using Location = Eigen::VectorXd;
using Weights = Eigen::ArrayXd;

/// Malformed or unreadable input data (files, dumps, configs).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A run reached a state that violates a documented invariant.
class InvariantError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Deterministic child seed for stream `index` of a parent seed.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = parent + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace citegrowth
