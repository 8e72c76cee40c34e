#include "sapleak/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sapleak {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Terms this far below the leading term are dropped in interval sums.
constexpr double kDropLog = 50.0;
}  // namespace

double log_sum_exp(std::span<const double> values) {
  double hi = kNegInf;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return kNegInf;
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_binomial_pmf(std::int64_t n, std::int64_t k, double p) {
  if (k < 0 || k > n) return kNegInf;
  if (p <= 0.0) return k == 0 ? 0.0 : kNegInf;
  if (p >= 1.0) return k == n ? 0.0 : kNegInf;
  const double kd = static_cast<double>(k);
  const double rest = static_cast<double>(n - k);
  return log_choose(n, k) + kd * std::log(p) + rest * std::log1p(-p);
}

std::pair<std::int64_t, std::int64_t> binomial_support(std::int64_t n, double p,
                                                       double tail_mass) {
  if (p <= 0.0) return {0, 0};
  if (p >= 1.0) return {n, n};
  const std::int64_t mode =
      std::min<std::int64_t>(n, static_cast<std::int64_t>(std::floor((n + 1) * p)));
  const double log_half_tail = std::log(tail_mass / 2.0);
  const double odds = p / (1.0 - p);

  std::int64_t hi = mode;
  double lp = log_binomial_pmf(n, mode, p);
  while (hi < n) {
    // pmf(b+1)/pmf(b); decreasing in b, so past the mode the tail is geometric
    const double r = static_cast<double>(n - hi) / static_cast<double>(hi + 1) * odds;
    if (r < 1.0 && lp + std::log(r / (1.0 - r)) < log_half_tail) break;
    lp += std::log(r);
    ++hi;
  }

  std::int64_t lo = mode;
  lp = log_binomial_pmf(n, mode, p);
  while (lo > 0) {
    const double r = static_cast<double>(lo) / static_cast<double>(n - lo + 1) / odds;
    if (r < 1.0 && lp + std::log(r / (1.0 - r)) < log_half_tail) break;
    lp += std::log(r);
    --lo;
  }
  return {lo, hi};
}

double log_binomial_interval(std::int64_t n, double p, std::int64_t lo, std::int64_t hi) {
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min<std::int64_t>(hi, n);
  if (lo > hi) return kNegInf;
  if (p <= 0.0) return lo == 0 ? 0.0 : kNegInf;
  if (p >= 1.0) return hi == n ? 0.0 : kNegInf;

  const std::int64_t mode =
      std::min<std::int64_t>(n, static_cast<std::int64_t>(std::floor((n + 1) * p)));
  const std::int64_t start = std::clamp(mode, lo, hi);
  const double lead = log_binomial_pmf(n, start, p);
  double acc = 1.0;
  // pmf is unimodal, so terms only shrink walking away from start
  for (std::int64_t b = start + 1; b <= hi; ++b) {
    const double t = log_binomial_pmf(n, b, p) - lead;
    if (t < -kDropLog) break;
    acc += std::exp(t);
  }
  for (std::int64_t b = start - 1; b >= lo; --b) {
    const double t = log_binomial_pmf(n, b, p) - lead;
    if (t < -kDropLog) break;
    acc += std::exp(t);
  }
  return lead + std::log(acc);
}

double laplace_cdf(double x, double scale) {
  if (x < 0.0) return 0.5 * std::exp(x / scale);
  return 1.0 - 0.5 * std::exp(-x / scale);
}

double log_laplace_interval(double a, double b, double scale) {
  if (b <= 0.0) {
    return std::log(0.5) + b / scale + std::log1p(-std::exp((a - b) / scale));
  }
  if (a >= 0.0) {
    return std::log(0.5) - a / scale + std::log1p(-std::exp(-(b - a) / scale));
  }
  return std::log(-0.5 * std::expm1(-b / scale) - 0.5 * std::expm1(a / scale));
}

double ppyy_pad_constant(double epsilon, std::int64_t n_keywords) {
  return 2.0 * (std::log(static_cast<double>(n_keywords)) + 64.0 * std::numbers::ln2) / epsilon;
}

}  // namespace sapleak
