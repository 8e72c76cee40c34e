#include <algorithm>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "sapleak/attack.hpp"

namespace sapleak {

Assignment sap_attack(const TagTable& tags, const AuxKnowledge& aux, const TrendMatrix& trends_aux,
                      const DefenseConfig& defense, const AttackConfig& cfg) {
  cfg.validate();
  const std::size_t n = aux.volumes.size();
  if (trends_aux.n_keywords() != n) {
    throw std::invalid_argument(fmt::format("trend rows ({}) != auxiliary volumes ({})",
                                            trends_aux.n_keywords(), n));
  }
  if (trends_aux.n_intervals() != tags.n_intervals) {
    throw std::invalid_argument("auxiliary trends and observations cover different intervals");
  }
  if (tags.m > n) throw std::invalid_argument("more tags than keywords");

  const CostMatrix freq_cost = cost_freq(tags.freq, tags.counts, trends_aux.freq, cfg.p_min);

  CostMatrix vol_cost;
  if (!cfg.defense_aware || defense.kind == DefenseKind::None) {
    // a defense-unaware adversary still sees padded volumes, possibly above N_D
    std::vector<double> v(tags.volumes.size());
    std::transform(tags.volumes.begin(), tags.volumes.end(), v.begin(),
                   [](double x) { return std::clamp(x, 0.0, 1.0); });
    vol_cost = cost_vol_plain(v, tags.n_docs, aux.volumes, cfg.v_clamp);
  } else {
    switch (defense.kind) {
      case DefenseKind::Clrz:
        vol_cost = cost_vol_clrz(tags.volumes, tags.n_docs, aux.volumes, defense.clrz.tpr,
                                 defense.clrz.fpr, cfg.v_clamp);
        break;
      case DefenseKind::Ppyy:
        vol_cost = cost_vol_ppyy(tags.raw_volumes, tags.n_docs, aux.volumes,
                                 defense.ppyy.epsilon, n, cfg.tail_mass, cfg.v_clamp);
        break;
      case DefenseKind::Seal:
        vol_cost = cost_vol_seal(tags.raw_volumes, tags.n_docs, aux.volumes,
                                 defense.seal.pad_base, cfg.v_clamp);
        break;
      case DefenseKind::None: break;
    }
  }
  return solve_assignment(combine(vol_cost, freq_cost, cfg.alpha));
}

std::vector<std::uint32_t> liu_attack(const Matrix& freq_obs, const Matrix& freq_aux) {
  if (freq_obs.cols() != freq_aux.cols()) {
    throw std::invalid_argument("frequency matrices disagree on the number of intervals");
  }
  if (freq_aux.rows() == 0) throw std::invalid_argument("no keywords to match against");
  const auto m = static_cast<std::int64_t>(freq_obs.rows());
  const std::size_t rho = freq_obs.cols();
  std::vector<std::uint32_t> out(freq_obs.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < m; ++j) {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t arg = 0;
    for (std::size_t i = 0; i < freq_aux.rows(); ++i) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < rho; ++k) {
        const double diff = freq_obs(j, k) - freq_aux(i, k);
        d2 += diff * diff;
      }
      if (d2 < best) {
        best = d2;
        arg = static_cast<std::uint32_t>(i);
      }
    }
    out[j] = arg;
  }
  return out;
}

}  // namespace sapleak
