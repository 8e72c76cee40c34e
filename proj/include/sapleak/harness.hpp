#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "sapleak/config.hpp"
#include "sapleak/corpus.hpp"
#include "sapleak/leakage.hpp"
#include "sapleak/trends.hpp"

namespace sapleak {

inline constexpr int kResultSchema = 1;

struct RunResult {
  std::uint64_t seed = 0;
  double weighted_accuracy = 0.0;
  double unweighted_accuracy = 0.0;
  double overhead_percent = 0.0;
  std::size_t m = 0;
  std::int64_t total_queries = 0;
  double attack_runtime_seconds = 0.0;
};

/// Everything a run reads but never mutates.
struct Dataset {
  Corpus corpus;
  TrendTable trends;
  std::vector<double> generating;  // per vocabulary entry; synthetic corpora only
};

std::shared_ptr<const Dataset> load_dataset(const ExperimentConfig& cfg);

/// Loads each distinct (corpus, trends) source once; safe to share across threads.
class DatasetCache {
 public:
  std::shared_ptr<const Dataset> get(const ExperimentConfig& cfg);

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Dataset>> cache_;
};

/// Intermediate products of one run, for debugging dumps.
struct RunTrace {
  QueryLog queries;
  ObservationSequence observations;
  TagTable tags;
  std::vector<std::uint32_t> keyword_of;
};

RunResult run_once(const ExperimentConfig& cfg, const Dataset& data, std::uint64_t seed,
                   RunTrace* trace = nullptr);

double weighted_accuracy(std::span<const std::uint32_t> keyword_of, const TagTable& tags);
double unweighted_accuracy(std::span<const std::uint32_t> keyword_of, const TagTable& tags);

struct MetricSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Sample mean, sample standard deviation and mean +- 1.96 standard errors.
MetricSummary aggregate(std::span<const double> values);

struct RunSummary {
  MetricSummary weighted;
  MetricSummary unweighted;
  MetricSummary overhead;
  MetricSummary runtime;
  MetricSummary tags;
  MetricSummary queries;
};

RunSummary aggregate(std::span<const RunResult> results);

struct ResultRecord {
  std::string config_hash;
  RunResult result;
  std::map<std::string, std::string> config;
};

std::string to_json_line(const ResultRecord& rec);
ResultRecord parse_result_line(const std::string& line);

/// Throws if the file is unreadable or holds no records.
std::vector<ResultRecord> read_results(const std::filesystem::path& path);

struct SuiteOutcome {
  std::size_t written = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
};

/// Runs configs x repetitions on up to `jobs` threads, appending one record per
/// finished run. Records already present for a (config hash, seed) pair are
/// skipped, so an interrupted suite resumes where it stopped.
SuiteOutcome run_suite(const std::vector<ExperimentConfig>& configs, std::size_t repetitions,
                       std::size_t jobs, const std::filesystem::path& results,
                       std::ostream& log);

}  // namespace sapleak
