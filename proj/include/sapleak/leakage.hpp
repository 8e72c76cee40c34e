#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sapleak/corpus.hpp"
#include "sapleak/matrix.hpp"
#include "sapleak/rng.hpp"
#include "sapleak/trends.hpp"

namespace sapleak {

enum class DefenseKind { None, Clrz, Ppyy, Seal };

std::string_view to_string(DefenseKind kind);
DefenseKind parse_defense_kind(std::string_view name);

struct ClrzParams {
  double tpr = 0.999;
  double fpr = 0.05;
};

struct PpyyParams {
  double epsilon = 0.2;
};

struct SealParams {
  std::optional<int> oram_exponent;  // unset: ceil(log2 N_D), one document per block
  std::int64_t pad_base = 2;
};

/// Only the block matching `kind` is read.
struct DefenseConfig {
  DefenseKind kind = DefenseKind::None;
  ClrzParams clrz;
  PpyyParams ppyy;
  SealParams seal;

  void validate() const;
};

enum class PatternKind : std::uint8_t { DocIds, Token, Blocks };

/// What the server sees for one query. `ids` holds document positions (DocIds)
/// or ORAM block indices (Blocks); `token` is only set for Token patterns.
/// `volume` is the number of documents returned.
struct AccessPattern {
  PatternKind kind = PatternKind::DocIds;
  std::vector<std::uint32_t> ids;
  std::uint64_t token = 0;
  std::int64_t volume = 0;

  bool operator==(const AccessPattern&) const = default;
};

std::uint64_t hash_pattern(const AccessPattern& p);

struct Observation {
  std::uint32_t interval = 0;
  std::shared_ptr<const AccessPattern> pattern;
  std::uint32_t keyword = 0;  // ground truth, only used for scoring
};

struct ObservationSequence {
  std::vector<Observation> records;
  std::size_t n_docs = 0;
  std::size_t n_intervals = 0;
  std::size_t ppyy_loss_events = 0;
};

struct TagTable {
  std::size_t m = 0;
  std::size_t n_docs = 0;
  std::size_t n_intervals = 0;
  std::vector<std::shared_ptr<const AccessPattern>> patterns;
  std::vector<std::int64_t> raw_volumes;
  std::vector<double> volumes;          // raw_volumes / N_D
  Matrix freq;                          // m x rho, f_jk
  std::vector<std::int64_t> counts;     // eta_k per interval
  std::vector<std::int64_t> tag_counts; // queries per tag over the whole log
  std::optional<Matrix> cooccurrence;   // only for document-id patterns
  std::vector<std::uint32_t> truth;     // first keyword seen with each tag
  std::vector<std::int64_t> truth_counts;  // queries of a tag issued for truth[j]
};

struct PpyyVolumes {
  std::vector<std::int64_t> padded;
  std::size_t loss_events = 0;
};

/// Flips each 0 to 1 with probability fpr and each 1 to 0 with probability
/// 1 - tpr. Every column draws from its own stream, so the result does not
/// depend on the thread count.
InvertedIndex obfuscate_index_clrz(const InvertedIndex& index, double tpr, double fpr, Rng& rng);

/// One Laplace draw per keyword; the ceiled pad is clamped at zero, counting a
/// loss event whenever that happens.
PpyyVolumes setup_ppyy_volumes(const InvertedIndex& index, double epsilon, std::size_t n,
                               Rng& rng);

/// Smallest power of x that is >= max(volume, 1).
std::int64_t seal_padded_volume(std::int64_t volume, std::int64_t pad_base);

int default_oram_exponent(std::size_t n_docs);

AccessPattern seal_pattern(std::span<const std::uint32_t> doc_ids, std::size_t n_docs,
                           int oram_exponent, std::int64_t pad_base);

ObservationSequence simulate(const QueryLog& queries, const InvertedIndex& index,
                             const DefenseConfig& defense, Rng& rng);

/// The tag co-occurrence matrix is only filled for document-id patterns and
/// only on request; the attacks here do not read it.
TagTable tag_observations(const ObservationSequence& obs, bool with_cooccurrence = false);

/// |a_i ∩ a_j| / N_D over document-id patterns.
Matrix tag_cooccurrence(std::span<const std::shared_ptr<const AccessPattern>> patterns,
                        std::size_t n_docs);

/// Total documents returned over the observation sequence.
std::int64_t returned_documents(const ObservationSequence& obs);

/// Documents the undefended index would return for the same queries.
std::int64_t clean_documents(const QueryLog& queries, const InvertedIndex& index);

double overhead_percent(std::int64_t returned, std::int64_t clean_returned);

}  // namespace sapleak
