#pragma once

// Straight-line serial versions of the parallel kernels. They follow the
// textbook formulas (probability space, full supports, dense bitmaps) and
// exist to check the production kernels and to benchmark against them.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sapleak/attack.hpp"
#include "sapleak/leakage.hpp"
#include "sapleak/matrix.hpp"

namespace sapleak::reference {

Matrix cost_freq(const Matrix& freq_obs, std::span<const std::int64_t> counts,
                 const Matrix& freq_aux, double p_min);

Matrix cost_vol_plain(std::span<const double> volumes, std::size_t n_docs,
                      std::span<const double> aux_volumes, double v_clamp);

Matrix cost_vol_clrz(std::span<const double> volumes, std::size_t n_docs,
                     std::span<const double> aux_volumes, double tpr, double fpr, double v_clamp);

/// Full binomial support, pmf and Laplace CDF differences in linear space.
Matrix cost_vol_ppyy(std::span<const std::int64_t> raw_volumes, std::size_t n_docs,
                     std::span<const double> aux_volumes, double epsilon, std::size_t n,
                     double v_clamp);

/// Bucket probabilities summed term by term in linear space.
Matrix cost_vol_seal(std::span<const std::int64_t> padded_volumes, std::size_t n_docs,
                     std::span<const double> aux_volumes, std::int64_t pad_base, double v_clamp);

std::vector<std::uint32_t> liu_attack(const Matrix& freq_obs, const Matrix& freq_aux);

Matrix tag_cooccurrence(std::span<const std::shared_ptr<const AccessPattern>> patterns,
                        std::size_t n_docs);

}  // namespace sapleak::reference
