#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace sapleak {

double log_sum_exp(std::span<const double> values);

double log_choose(std::int64_t n, std::int64_t k);

/// log Pr[Bino(n, p) = k]; -inf outside the support.
double log_binomial_pmf(std::int64_t n, std::int64_t k, double p);

/// Inclusive range [lo, hi] around the mode of Bino(n, p) outside of which the
/// binomial mass is below tail_mass. Found by walking out of the mode until the
/// geometric bound on the remaining tail drops under tail_mass / 2 per side.
std::pair<std::int64_t, std::int64_t> binomial_support(std::int64_t n, double p,
                                                       double tail_mass);

/// log Pr[lo <= Bino(n, p) <= hi], accurate deep into the tails.
double log_binomial_interval(std::int64_t n, double p, std::int64_t lo, std::int64_t hi);

double laplace_cdf(double x, double scale);

/// log Pr[a < L <= b] for L ~ Laplace(0, scale), a < b, without cancellation.
double log_laplace_interval(double a, double b, double scale);

/// PPYY pad shift 2(log n + 64 log 2)/epsilon.
double ppyy_pad_constant(double epsilon, std::int64_t n_keywords);

/// log Pr[ceil(L + shift) = d] for L ~ Laplace(0, scale).
inline double log_disc_laplace(std::int64_t d, double shift, double scale) {
  const double hi = static_cast<double>(d) - shift;
  return log_laplace_interval(hi - 1.0, hi, scale);
}

}  // namespace sapleak
