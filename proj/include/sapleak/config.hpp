#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sapleak/attack.hpp"
#include "sapleak/leakage.hpp"

namespace sapleak {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CorpusKind { Synthetic, Cache };
enum class TrendKind { Synthetic, File };
/// Where the adversary's volumes come from: the held-out half of the corpus,
/// or (synthetic corpora only) the probabilities that generated it.
enum class AuxSource { Split, Generating };
enum class AttackKind { Sap, Liu };

struct CorpusSource {
  CorpusKind kind = CorpusKind::Synthetic;
  std::string path;
  std::size_t n_docs = 30000;
  std::size_t n_keywords = 3000;
  double zipf_exponent = 1.0;
  std::uint64_t seed = 1;
};

struct TrendSource {
  TrendKind kind = TrendKind::Synthetic;
  std::string path;
  std::size_t n_weeks = 260;
  double concentration = 1.0;
  double spread = 0.0;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  CorpusSource corpus;
  TrendSource trends;
  std::size_t pool_size = 3000;
  std::size_t n = 500;
  std::size_t rho = 50;
  double eta = 5.0;
  std::size_t tau = 5;
  AuxSource aux = AuxSource::Split;
  DefenseConfig defense;
  AttackKind attack_kind = AttackKind::Sap;
  AttackConfig attack;
  std::uint64_t base_seed = 0;

  void validate() const;

  /// Every setting as dotted key -> canonical text, defaults included.
  std::map<std::string, std::string> key_values() const;

  /// FNV-1a over the canonical key=value listing, as 16 hex digits.
  std::string hash() const;
};

/// Sets one dotted key (e.g. "defense.clrz.fpr"). Throws ConfigError naming
/// the key when it is unknown or the value does not parse.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

std::vector<std::string> experiment_keys();

struct SuiteConfig {
  std::string name = "suite";
  std::uint64_t base_seed = 0;
  std::size_t repetitions = 30;
  std::size_t jobs = 1;
  std::string results;
  std::vector<std::pair<std::string, std::string>> base;
  std::vector<std::pair<std::string, std::vector<std::string>>> grid;
  std::map<std::string, std::string> ingest;
  std::map<std::string, std::string> report;
  std::map<std::string, std::string> trend_table;

  /// Cross product of the grid axes applied over the base settings; the first
  /// axis varies slowest.
  std::vector<ExperimentConfig> expand() const;
};

SuiteConfig parse_suite_config(std::string_view yaml_text, std::string_view source_name = "config");
SuiteConfig load_suite_config(const std::filesystem::path& path);

}  // namespace sapleak
