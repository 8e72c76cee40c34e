#include "sapleak/rng.hpp"

#include <cmath>

namespace sapleak {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, std::string_view label) {
  std::uint64_t h = mix64(base);
  h = mix64(h ^ index);
  return mix64(h ^ fnv1a64(label));
}

double sample_laplace(Rng& rng, double scale) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  while (u == 0.0) u = unif(rng);
  if (u < 0.5) return scale * std::log(2.0 * u);
  return -scale * std::log(2.0 * (1.0 - u));
}

std::int64_t sample_poisson(Rng& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  // libstdc++ uses inversion below mean 12 and a rejection method above.
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng);
}

}  // namespace sapleak
