#include <algorithm>
#include <cmath>
#include <limits>

#include "sapleak/numeric.hpp"
#include "sapleak/reference.hpp"

namespace sapleak::reference {

namespace {

double clamp_p(double v, std::size_t n_docs, double v_clamp) {
  const double lo = v_clamp / static_cast<double>(n_docs);
  return std::min(std::max(v, lo), 1.0 - lo);
}

double capped(double c) { return std::isfinite(c) ? std::min(c, kMaxCost) : kMaxCost; }

}  // namespace

Matrix cost_freq(const Matrix& freq_obs, std::span<const std::int64_t> counts,
                 const Matrix& freq_aux, double p_min) {
  Matrix out(freq_aux.rows(), freq_obs.rows());
  for (std::size_t i = 0; i < freq_aux.rows(); ++i) {
    for (std::size_t j = 0; j < freq_obs.rows(); ++j) {
      double c = 0.0;
      for (std::size_t k = 0; k < freq_obs.cols(); ++k) {
        if (freq_obs(j, k) == 0.0) continue;
        c -= static_cast<double>(counts[k]) * freq_obs(j, k) * std::log(std::max(freq_aux(i, k), p_min));
      }
      out(i, j) = capped(c);
    }
  }
  return out;
}

Matrix cost_vol_plain(std::span<const double> volumes, std::size_t n_docs,
                      std::span<const double> aux_volumes, double v_clamp) {
  Matrix out(aux_volumes.size(), volumes.size());
  const double nd = static_cast<double>(n_docs);
  for (std::size_t i = 0; i < aux_volumes.size(); ++i) {
    const double p = clamp_p(aux_volumes[i], n_docs, v_clamp);
    for (std::size_t j = 0; j < volumes.size(); ++j) {
      out(i, j) = capped(-(nd * volumes[j] * std::log(p) + nd * (1.0 - volumes[j]) * std::log(1.0 - p)));
    }
  }
  return out;
}

Matrix cost_vol_clrz(std::span<const double> volumes, std::size_t n_docs,
                     std::span<const double> aux_volumes, double tpr, double fpr, double v_clamp) {
  std::vector<double> q(aux_volumes.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = aux_volumes[i] * tpr + (1.0 - aux_volumes[i]) * fpr;
  return cost_vol_plain(volumes, n_docs, q, v_clamp);
}

Matrix cost_vol_ppyy(std::span<const std::int64_t> raw_volumes, std::size_t n_docs,
                     std::span<const double> aux_volumes, double epsilon, std::size_t n,
                     double v_clamp) {
  const auto nd = static_cast<std::int64_t>(n_docs);
  const double shift = ppyy_pad_constant(epsilon, static_cast<std::int64_t>(n));
  const double scale = 2.0 / epsilon;
  Matrix out(aux_volumes.size(), raw_volumes.size());
  for (std::size_t i = 0; i < aux_volumes.size(); ++i) {
    const double p = clamp_p(aux_volumes[i], n_docs, v_clamp);
    std::vector<double> pmf(static_cast<std::size_t>(nd + 1));
    for (std::int64_t b = 0; b <= nd; ++b) pmf[b] = std::exp(log_binomial_pmf(nd, b, p));
    for (std::size_t j = 0; j < raw_volumes.size(); ++j) {
      double total = 0.0;
      for (std::int64_t b = 0; b <= nd; ++b) {
        const double hi = static_cast<double>(raw_volumes[j] - b) - shift;
        total += pmf[b] * (laplace_cdf(hi, scale) - laplace_cdf(hi - 1.0, scale));
      }
      out(i, j) = capped(-std::log(total));
    }
  }
  return out;
}

Matrix cost_vol_seal(std::span<const std::int64_t> padded_volumes, std::size_t n_docs,
                     std::span<const double> aux_volumes, std::int64_t pad_base, double v_clamp) {
  const auto nd = static_cast<std::int64_t>(n_docs);
  Matrix out(aux_volumes.size(), padded_volumes.size());
  for (std::size_t i = 0; i < aux_volumes.size(); ++i) {
    const double p = clamp_p(aux_volumes[i], n_docs, v_clamp);
    for (std::size_t j = 0; j < padded_volumes.size(); ++j) {
      const std::int64_t v = padded_volumes[j];
      const std::int64_t lo = v == 1 ? 0 : v / pad_base + 1;
      double total = 0.0;
      for (std::int64_t b = lo; b <= std::min(v, nd); ++b) total += std::exp(log_binomial_pmf(nd, b, p));
      out(i, j) = capped(-std::log(total));
    }
  }
  return out;
}

std::vector<std::uint32_t> liu_attack(const Matrix& freq_obs, const Matrix& freq_aux) {
  std::vector<std::uint32_t> out;
  for (std::size_t j = 0; j < freq_obs.rows(); ++j) {
    std::vector<double> dist;
    for (std::size_t i = 0; i < freq_aux.rows(); ++i) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < freq_obs.cols(); ++k) {
        d2 += (freq_obs(j, k) - freq_aux(i, k)) * (freq_obs(j, k) - freq_aux(i, k));
      }
      dist.push_back(std::sqrt(d2));
    }
    out.push_back(static_cast<std::uint32_t>(std::min_element(dist.begin(), dist.end()) - dist.begin()));
  }
  return out;
}

}  // namespace sapleak::reference
