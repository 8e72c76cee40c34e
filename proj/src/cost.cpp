#include "sapleak/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "sapleak/numeric.hpp"

namespace sapleak {

namespace {

double finite_cost(double c) { return std::isfinite(c) ? std::min(c, kMaxCost) : kMaxCost; }

void check_volumes(std::span<const double> volumes, std::size_t n_docs) {
  if (n_docs == 0) throw std::invalid_argument("N_D must be at least 1");
  for (double v : volumes) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(fmt::format("volume {} outside [0, 1]", v));
  }
}

// Shared by the plain and CLRZ builders: probabilities are already final.
CostMatrix binomial_volume_cost(std::span<const double> volumes, std::size_t n_docs,
                                const std::vector<double>& probs) {
  const auto n = static_cast<std::int64_t>(probs.size());
  const std::size_t m = volumes.size();
  const double nd = static_cast<double>(n_docs);
  CostMatrix out{Matrix(probs.size(), m), CostKind::Volume};
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const double log_p = std::log(probs[i]);
    const double log_q = std::log1p(-probs[i]);
    for (std::size_t j = 0; j < m; ++j) {
      out.values(i, j) = finite_cost(-(nd * volumes[j] * log_p + nd * (1.0 - volumes[j]) * log_q));
    }
  }
  return out;
}

}  // namespace

void AttackConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (!(p_min > 0.0 && p_min <= 1e-3)) throw std::invalid_argument("p_min must lie in (0, 1e-3]");
  if (!(v_clamp > 0.0 && v_clamp <= 0.5)) throw std::invalid_argument("v_clamp must lie in (0, 0.5]");
  if (!(tail_mass > 0.0 && tail_mass < 1.0)) throw std::invalid_argument("tail_mass must lie in (0, 1)");
}

double clamp_volume(double v, std::size_t n_docs, double v_clamp) {
  const double lo = v_clamp / static_cast<double>(n_docs);
  return std::clamp(v, lo, 1.0 - lo);
}

CostMatrix cost_freq(const Matrix& freq_obs, std::span<const std::int64_t> counts,
                     const Matrix& freq_aux, double p_min) {
  const std::size_t m = freq_obs.rows();
  const std::size_t rho = freq_obs.cols();
  if (freq_aux.cols() != rho || counts.size() != rho) {
    throw std::invalid_argument("frequency matrices disagree on the number of intervals");
  }
  const auto n = static_cast<std::int64_t>(freq_aux.rows());

  // eta_k * f_jk, the per-interval query count of each tag
  Matrix weight(m, rho);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < rho; ++k) {
      weight(j, k) = static_cast<double>(counts[k]) * freq_obs(j, k);
    }
  }

  CostMatrix out{Matrix(freq_aux.rows(), m), CostKind::Frequency};
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    std::vector<double> log_aux(rho);
    for (std::size_t k = 0; k < rho; ++k) log_aux[k] = std::log(std::max(freq_aux(i, k), p_min));
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < rho; ++k) {
        if (weight(j, k) != 0.0) acc += weight(j, k) * log_aux[k];
      }
      out.values(i, j) = finite_cost(-acc);
    }
  }
  return out;
}

CostMatrix cost_vol_plain(std::span<const double> volumes, std::size_t n_docs,
                          std::span<const double> aux_volumes, double v_clamp) {
  check_volumes(volumes, n_docs);
  std::vector<double> probs(aux_volumes.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = clamp_volume(aux_volumes[i], n_docs, v_clamp);
  }
  return binomial_volume_cost(volumes, n_docs, probs);
}

CostMatrix cost_vol_clrz(std::span<const double> volumes, std::size_t n_docs,
                         std::span<const double> aux_volumes, double tpr, double fpr,
                         double v_clamp) {
  check_volumes(volumes, n_docs);
  if (!(fpr >= 0.0 && fpr < tpr && tpr <= 1.0)) throw std::invalid_argument("clrz needs 0 <= fpr < tpr <= 1");
  std::vector<double> probs(aux_volumes.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double q = aux_volumes[i] * tpr + (1.0 - aux_volumes[i]) * fpr;
    probs[i] = clamp_volume(q, n_docs, v_clamp);
  }
  return binomial_volume_cost(volumes, n_docs, probs);
}

double ppyy_log_pmf(std::int64_t observed, std::size_t n_docs, double p, double epsilon,
                    std::size_t n, double tail_mass) {
  const auto nd = static_cast<std::int64_t>(n_docs);
  const double shift = ppyy_pad_constant(epsilon, static_cast<std::int64_t>(n));
  const double scale = 2.0 / epsilon;
  const auto [lo, hi] = binomial_support(nd, p, tail_mass);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t b = lo; b <= hi; ++b) {
    terms.push_back(log_binomial_pmf(nd, b, p) + log_disc_laplace(observed - b, shift, scale));
  }
  return log_sum_exp(terms);
}

CostMatrix cost_vol_ppyy(std::span<const std::int64_t> raw_volumes, std::size_t n_docs,
                         std::span<const double> aux_volumes, double epsilon, std::size_t n,
                         double tail_mass, double v_clamp) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("ppyy epsilon must be positive");
  if (n_docs == 0) throw std::invalid_argument("N_D must be at least 1");
  const auto nd = static_cast<std::int64_t>(n_docs);
  const double shift = ppyy_pad_constant(epsilon, static_cast<std::int64_t>(n));
  const double scale = 2.0 / epsilon;
  const auto n_kw = static_cast<std::int64_t>(aux_volumes.size());
  const std::size_t m = raw_volumes.size();

  CostMatrix out{Matrix(aux_volumes.size(), m), CostKind::Volume};
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n_kw; ++i) {
    const double p = clamp_volume(aux_volumes[i], n_docs, v_clamp);
    const auto [lo, hi] = binomial_support(nd, p, tail_mass);
    std::vector<double> log_pmf(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t b = lo; b <= hi; ++b) log_pmf[b - lo] = log_binomial_pmf(nd, b, p);
    std::vector<double> terms(log_pmf.size());
    for (std::size_t j = 0; j < m; ++j) {
      for (std::int64_t b = lo; b <= hi; ++b) {
        terms[b - lo] = log_pmf[b - lo] + log_disc_laplace(raw_volumes[j] - b, shift, scale);
      }
      out.values(i, j) = finite_cost(-log_sum_exp(terms));
    }
  }
  return out;
}

int seal_bucket(std::int64_t padded_volume, std::int64_t pad_base) {
  if (pad_base < 2) throw std::invalid_argument("seal pad base must be >= 2");
  int k = 0;
  std::int64_t p = 1;
  while (p < padded_volume) {
    p *= pad_base;
    ++k;
  }
  if (p != padded_volume) {
    throw std::invalid_argument(
        fmt::format("observed volume {} is not a power of {}", padded_volume, pad_base));
  }
  return k;
}

double seal_bucket_log_prob(int bucket, std::size_t n_docs, double p, std::int64_t pad_base) {
  const auto nd = static_cast<std::int64_t>(n_docs);
  if (bucket == 0) return log_binomial_interval(nd, p, 0, 1);
  std::int64_t lower = 1;  // x^(k-1)
  for (int k = 1; k < bucket; ++k) {
    lower *= pad_base;
    if (lower >= nd) return -std::numeric_limits<double>::infinity();
  }
  return log_binomial_interval(nd, p, lower + 1, lower * pad_base);
}

CostMatrix cost_vol_seal(std::span<const std::int64_t> padded_volumes, std::size_t n_docs,
                         std::span<const double> aux_volumes, std::int64_t pad_base,
                         double v_clamp) {
  if (n_docs == 0) throw std::invalid_argument("N_D must be at least 1");
  std::vector<int> bucket_of(padded_volumes.size());
  std::map<int, std::size_t> slot;
  for (std::size_t j = 0; j < padded_volumes.size(); ++j) {
    bucket_of[j] = seal_bucket(padded_volumes[j], pad_base);
    slot.emplace(bucket_of[j], 0);
  }
  std::vector<int> buckets;
  for (auto& [k, s] : slot) {
    s = buckets.size();
    buckets.push_back(k);
  }

  const auto n_kw = static_cast<std::int64_t>(aux_volumes.size());
  CostMatrix out{Matrix(aux_volumes.size(), padded_volumes.size()), CostKind::Volume};
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n_kw; ++i) {
    const double p = clamp_volume(aux_volumes[i], n_docs, v_clamp);
    std::vector<double> cost(buckets.size());
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      cost[b] = finite_cost(-seal_bucket_log_prob(buckets[b], n_docs, p, pad_base));
    }
    for (std::size_t j = 0; j < padded_volumes.size(); ++j) {
      out.values(i, j) = cost[slot.at(bucket_of[j])];
    }
  }
  return out;
}

CostMatrix combine(const CostMatrix& volume, const CostMatrix& frequency, double alpha) {
  if (volume.values.rows() != frequency.values.rows() ||
      volume.values.cols() != frequency.values.cols()) {
    throw std::invalid_argument("cost matrices have different shapes");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  CostMatrix out{Matrix(volume.values.rows(), volume.values.cols()), CostKind::Combined};
  auto& dst = out.values.data();
  const auto& cv = volume.values.data();
  const auto& cf = frequency.values.data();
  for (std::size_t e = 0; e < dst.size(); ++e) dst[e] = (1.0 - alpha) * cv[e] + alpha * cf[e];
  return out;
}

}  // namespace sapleak
