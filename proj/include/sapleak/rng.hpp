#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sapleak {

using Rng = std::mt19937_64;

std::uint64_t fnv1a64(std::string_view bytes);

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x);

/// Seed for an independent stream identified by (base, index, label).
/// Adding new labels never perturbs the streams of existing ones.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, std::string_view label);

inline Rng make_rng(std::uint64_t base, std::uint64_t index, std::string_view label) {
  return Rng(derive_seed(base, index, label));
}

/// Laplace(0, scale) by inversion.
double sample_laplace(Rng& rng, double scale);

/// Poisson(mean); mean <= 0 is the constant 0.
std::int64_t sample_poisson(Rng& rng, double mean);

}  // namespace sapleak
