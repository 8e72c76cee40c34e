#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sapleak/matrix.hpp"
#include "sapleak/rng.hpp"

namespace sapleak {

/// Raw keyword popularity over time, as read from a trend file.
struct TrendTable {
  std::vector<std::string> week_labels;
  std::vector<std::string> keywords;
  Matrix popularity;  // keywords x weeks

  std::size_t n_weeks() const { return week_labels.size(); }
  const std::size_t* find(const std::string& keyword) const;
  void rebuild_lookup();

 private:
  std::unordered_map<std::string, std::size_t> lookup_;
};

/// n x rho query probabilities; every column sums to one.
struct TrendMatrix {
  Matrix freq;

  std::size_t n_keywords() const { return freq.rows(); }
  std::size_t n_intervals() const { return freq.cols(); }
};

/// Half-open week range [begin, end).
struct IntervalRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t width() const { return end - begin; }
};

enum class ZeroColumnPolicy { Uniform, Error };

struct QueryRate {
  double avg_per_interval = 5.0;  // eta-bar
  std::size_t offset_weeks = 5;   // tau
};

struct QueryRecord {
  std::uint32_t interval = 0;
  std::uint32_t keyword = 0;

  bool operator==(const QueryRecord&) const = default;
};

struct QueryLog {
  std::vector<QueryRecord> queries;
  std::size_t n_intervals = 0;
};

/// Rescales every column to sum to one. All-zero columns become uniform, or
/// throw under ZeroColumnPolicy::Error.
void normalize_columns(Matrix& m, ZeroColumnPolicy policy = ZeroColumnPolicy::Uniform);

TrendMatrix load_trends(const TrendTable& table, const std::vector<std::string>& universe,
                        IntervalRange window,
                        ZeroColumnPolicy policy = ZeroColumnPolicy::Uniform);

/// The same window moved tau weeks into the past.
TrendMatrix offset_view(const TrendTable& table, const std::vector<std::string>& universe,
                        IntervalRange window, std::size_t tau,
                        ZeroColumnPolicy policy = ZeroColumnPolicy::Uniform);

/// Independent Poisson(eta * f_ik) counts per (keyword, interval). Records are
/// ordered by interval, then keyword.
QueryLog generate_queries(const TrendMatrix& trends, const QueryRate& rate, Rng& rng);

/// Entry (i, k) is b_i * Gamma(concentration, 1), columns normalized. The
/// per-keyword base b_i is LogNormal(0, spread), or 1 when spread is 0, so a
/// positive spread gives popularity that persists from week to week.
TrendMatrix synth_trends(std::size_t n, std::size_t rho, double concentration, double spread,
                         Rng& rng);

/// A synthetic trend table over the given keyword names.
TrendTable synth_trend_table(const std::vector<std::string>& keywords, std::size_t n_weeks,
                             double concentration, double spread, Rng& rng);

}  // namespace sapleak
