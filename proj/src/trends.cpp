#include "sapleak/trends.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace sapleak {

const std::size_t* TrendTable::find(const std::string& keyword) const {
  auto it = lookup_.find(keyword);
  return it == lookup_.end() ? nullptr : &it->second;
}

void TrendTable::rebuild_lookup() {
  lookup_.clear();
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    if (!lookup_.emplace(keywords[i], i).second) {
      throw std::invalid_argument(fmt::format("duplicate trend row for '{}'", keywords[i]));
    }
  }
}

void normalize_columns(Matrix& m, ZeroColumnPolicy policy) {
  for (std::size_t k = 0; k < m.cols(); ++k) {
    double total = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) total += m(i, k);
    if (total > 0.0) {
      for (std::size_t i = 0; i < m.rows(); ++i) m(i, k) /= total;
    } else if (policy == ZeroColumnPolicy::Uniform) {
      const double u = 1.0 / static_cast<double>(m.rows());
      for (std::size_t i = 0; i < m.rows(); ++i) m(i, k) = u;
    } else {
      throw std::invalid_argument(fmt::format("trend column {} is all zero", k));
    }
  }
}

TrendMatrix load_trends(const TrendTable& table, const std::vector<std::string>& universe,
                        IntervalRange window, ZeroColumnPolicy policy) {
  if (window.begin >= window.end || window.end > table.n_weeks()) {
    throw std::out_of_range(fmt::format("trend window [{}, {}) outside table of {} weeks",
                                        window.begin, window.end, table.n_weeks()));
  }
  TrendMatrix out{Matrix(universe.size(), window.width())};
  for (std::size_t i = 0; i < universe.size(); ++i) {
    const std::size_t* row = table.find(universe[i]);
    if (row == nullptr) {
      throw std::invalid_argument(fmt::format("no trend row for keyword '{}'", universe[i]));
    }
    for (std::size_t k = 0; k < window.width(); ++k) {
      const double v = table.popularity(*row, window.begin + k);
      if (v < 0.0) throw std::invalid_argument("negative trend popularity");
      out.freq(i, k) = v;
    }
  }
  normalize_columns(out.freq, policy);
  return out;
}

TrendMatrix offset_view(const TrendTable& table, const std::vector<std::string>& universe,
                        IntervalRange window, std::size_t tau, ZeroColumnPolicy policy) {
  if (tau > window.begin) {
    throw std::out_of_range(
        fmt::format("offset {} moves window starting at week {} before the table", tau,
                    window.begin));
  }
  return load_trends(table, universe, {window.begin - tau, window.end - tau}, policy);
}

QueryLog generate_queries(const TrendMatrix& trends, const QueryRate& rate, Rng& rng) {
  if (!(rate.avg_per_interval > 0.0)) throw std::invalid_argument("query rate must be positive");
  QueryLog log;
  log.n_intervals = trends.n_intervals();
  for (std::size_t k = 0; k < trends.n_intervals(); ++k) {
    for (std::size_t i = 0; i < trends.n_keywords(); ++i) {
      const auto count = sample_poisson(rng, rate.avg_per_interval * trends.freq(i, k));
      for (std::int64_t c = 0; c < count; ++c) {
        log.queries.push_back({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(i)});
      }
    }
  }
  return log;
}

TrendMatrix synth_trends(std::size_t n, std::size_t rho, double concentration, double spread,
                         Rng& rng) {
  if (n == 0 || rho == 0) throw std::invalid_argument("trend matrix needs n, rho >= 1");
  if (!(concentration > 0.0)) throw std::invalid_argument("concentration must be positive");
  if (!(spread >= 0.0)) throw std::invalid_argument("spread must be non-negative");
  TrendMatrix out{Matrix(n, rho)};
  std::vector<double> base(n, 1.0);
  if (spread > 0.0) {
    std::lognormal_distribution<double> lognormal(0.0, spread);
    for (double& b : base) b = lognormal(rng);
  }
  std::gamma_distribution<double> gamma(concentration, 1.0);
  for (std::size_t k = 0; k < rho; ++k) {
    for (std::size_t i = 0; i < n; ++i) out.freq(i, k) = base[i] * gamma(rng);
  }
  normalize_columns(out.freq, ZeroColumnPolicy::Uniform);
  return out;
}

TrendTable synth_trend_table(const std::vector<std::string>& keywords, std::size_t n_weeks,
                             double concentration, double spread, Rng& rng) {
  TrendTable table;
  table.keywords = keywords;
  for (std::size_t w = 0; w < n_weeks; ++w) table.week_labels.push_back(fmt::format("w{}", w));
  table.popularity = synth_trends(keywords.size(), n_weeks, concentration, spread, rng).freq;
  table.rebuild_lookup();
  return table;
}

}  // namespace sapleak
