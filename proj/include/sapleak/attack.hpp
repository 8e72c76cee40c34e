#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sapleak/corpus.hpp"
#include "sapleak/leakage.hpp"
#include "sapleak/matrix.hpp"
#include "sapleak/trends.hpp"

namespace sapleak {

enum class CostKind { Frequency, Volume, Combined };

/// n x m negative log-likelihood terms; row = keyword, column = tag.
struct CostMatrix {
  Matrix values;
  CostKind kind = CostKind::Combined;

  std::size_t n_keywords() const { return values.rows(); }
  std::size_t n_tags() const { return values.cols(); }
};

struct AttackConfig {
  double alpha = 0.5;          // weight of the frequency term
  bool defense_aware = true;
  double p_min = 1e-6;         // floor on auxiliary query frequencies
  double v_clamp = 0.5;        // auxiliary volumes kept v_clamp/N_D away from {0, 1}
  double tail_mass = 1e-12;    // binomial mass dropped by the PPYY convolution

  void validate() const;
};

/// Injective tag -> keyword map.
struct Assignment {
  std::vector<std::uint32_t> keyword_of;
  double objective = 0.0;
};

/// Cost entries above this are clamped so every matrix stays finite.
inline constexpr double kMaxCost = 1e12;

/// -sum_k eta_k f_jk log max(aux_ik, p_min), with 0 log 0 = 0.
CostMatrix cost_freq(const Matrix& freq_obs, std::span<const std::int64_t> counts,
                     const Matrix& freq_aux, double p_min);

/// Binomial volume log-likelihood with auxiliary volumes clamped into
/// [v_clamp/N_D, 1 - v_clamp/N_D].
CostMatrix cost_vol_plain(std::span<const double> volumes, std::size_t n_docs,
                          std::span<const double> aux_volumes, double v_clamp);

/// cost_vol_plain with aux_i replaced by aux_i * tpr + (1 - aux_i) * fpr.
CostMatrix cost_vol_clrz(std::span<const double> volumes, std::size_t n_docs,
                         std::span<const double> aux_volumes, double tpr, double fpr,
                         double v_clamp);

/// -log of Bino(N_D, aux_i) convolved with the ceiled, shifted Laplace pad,
/// evaluated at each observed padded volume.
CostMatrix cost_vol_ppyy(std::span<const std::int64_t> raw_volumes, std::size_t n_docs,
                         std::span<const double> aux_volumes, double epsilon, std::size_t n,
                         double tail_mass, double v_clamp);

/// -log Pr[Bino(N_D, aux_i) lands in the padding bucket of v_obs_j]. Bucket k
/// covers (x^(k-1), x^k]; bucket 0 is [0, 1].
CostMatrix cost_vol_seal(std::span<const std::int64_t> padded_volumes, std::size_t n_docs,
                         std::span<const double> aux_volumes, std::int64_t pad_base,
                         double v_clamp);

/// Exponent k with x^k == v; throws when v is not a power of x.
int seal_bucket(std::int64_t padded_volume, std::int64_t pad_base);

/// log Prob(k, i) for one auxiliary volume.
double seal_bucket_log_prob(int bucket, std::size_t n_docs, double p, std::int64_t pad_base);

/// log Pr[observed PPYY volume = d] for a keyword with match probability p.
double ppyy_log_pmf(std::int64_t observed, std::size_t n_docs, double p, double epsilon,
                    std::size_t n, double tail_mass);

double clamp_volume(double v, std::size_t n_docs, double v_clamp);

CostMatrix combine(const CostMatrix& volume, const CostMatrix& frequency, double alpha);

/// Minimum-cost injective tag -> keyword map (Hungarian, rectangular). Ties
/// are pushed toward the lexicographically smallest keyword_of vector.
Assignment solve_assignment(const CostMatrix& cost);

Assignment sap_attack(const TagTable& tags, const AuxKnowledge& aux, const TrendMatrix& trends_aux,
                      const DefenseConfig& defense, const AttackConfig& cfg);

/// Nearest auxiliary trend row per tag in Euclidean distance; not injective.
std::vector<std::uint32_t> liu_attack(const Matrix& freq_obs, const Matrix& freq_aux);

}  // namespace sapleak
