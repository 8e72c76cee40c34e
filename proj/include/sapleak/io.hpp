#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "sapleak/attack.hpp"
#include "sapleak/corpus.hpp"
#include "sapleak/leakage.hpp"
#include "sapleak/trends.hpp"

namespace sapleak {

inline constexpr int kCacheSchema = 1;

// Preprocessed corpus: a vocabulary header line, then one {"id", "keywords"}
// record per document, all JSON.
void write_corpus_cache(const Corpus& corpus, std::ostream& out);
void write_corpus_cache(const Corpus& corpus, const std::filesystem::path& path);
Corpus read_corpus_cache(std::istream& in);
Corpus read_corpus_cache(const std::filesystem::path& path);

// Trend table: `keyword,<week labels...>` header, then `keyword,v1,...` rows.
void write_trend_table(const TrendTable& table, std::ostream& out);
TrendTable read_trend_table(std::istream& in);
TrendTable read_trend_table(const std::filesystem::path& path);

// One `interval,keyword_index` line per query.
void write_query_log(const QueryLog& log, std::ostream& out);
QueryLog read_query_log(std::istream& in, std::size_t n_intervals);

// JSON lines: a header with N_D and rho, then one record per observation.
void write_observations(const ObservationSequence& obs, std::ostream& out);
ObservationSequence read_observations(std::istream& in);

void write_tag_table(const TagTable& tags, std::ostream& out);

// Whitespace-separated grid, one keyword per line.
void write_cost_matrix(const CostMatrix& cost, std::ostream& out);
CostMatrix read_cost_matrix(std::istream& in);

// One `tag_index,keyword_index` line per tag.
void write_assignment(std::span<const std::uint32_t> keyword_of, std::ostream& out);

}  // namespace sapleak
