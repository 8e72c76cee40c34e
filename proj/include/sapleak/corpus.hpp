#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sapleak/matrix.hpp"
#include "sapleak/rng.hpp"

namespace sapleak {

/// Index into a corpus vocabulary.
using KeywordId = std::uint32_t;

struct Document {
  std::uint64_t id = 0;
  std::vector<KeywordId> keywords;  // sorted, unique

  bool operator==(const Document&) const = default;
};

struct Corpus {
  std::vector<Document> documents;
  std::vector<std::string> vocabulary;  // sorted, unique

  std::size_t size() const { return documents.size(); }
};

/// Ordered keyword universe; position i in `keywords` is keyword w_i.
struct KeywordUniverse {
  std::vector<KeywordId> keywords;

  std::size_t size() const { return keywords.size(); }
};

/// Binary document x keyword incidence, stored by column: column i holds the
/// sorted positions of the documents that contain universe keyword i.
struct InvertedIndex {
  std::size_t n_docs = 0;
  std::vector<std::vector<std::uint32_t>> columns;

  std::size_t n_keywords() const { return columns.size(); }
  std::size_t column_weight(std::size_t kw) const { return columns[kw].size(); }
  bool contains(std::size_t doc, std::size_t kw) const;

  bool operator==(const InvertedIndex&) const = default;
};

struct AuxKnowledge {
  std::vector<double> volumes;  // fraction of documents holding each keyword
  Matrix cooccurrence;          // n x n; empty when not requested
};

using WordSet = std::unordered_set<std::string>;

std::set<std::string> extract_keywords(std::string_view raw_text, const WordSet& dictionary,
                                       const WordSet& stopwords);

/// One word per line, lowercased; blank lines ignored.
WordSet load_word_list(const std::filesystem::path& path);

/// Builds a corpus from (id, text) pairs. The vocabulary is the sorted union of
/// every extracted keyword.
Corpus corpus_from_texts(const std::vector<std::pair<std::uint64_t, std::string>>& texts,
                         const WordSet& dictionary, const WordSet& stopwords);

/// Reads a directory of .txt files (ids follow sorted file names) or a
/// line-delimited JSON file with `id` and `text` fields.
std::vector<std::pair<std::uint64_t, std::string>> read_raw_texts(
    const std::filesystem::path& input);

/// Document frequency of every vocabulary entry.
std::vector<std::size_t> document_frequencies(const Corpus& corpus);

/// The pool_size most frequent keywords; ties go to the lexicographically
/// smaller keyword.
std::vector<KeywordId> top_keywords(const Corpus& corpus, std::size_t pool_size);

KeywordUniverse build_universe(const Corpus& corpus, std::size_t pool_size, std::size_t n,
                               Rng& rng);

/// Client gets ceil(N/2) documents, the adversary the rest. Both halves keep
/// the original document order.
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, Rng& rng);

InvertedIndex build_index(const Corpus& corpus, const KeywordUniverse& universe);

AuxKnowledge compute_aux(const Corpus& corpus, const KeywordUniverse& universe,
                         bool with_cooccurrence = true);

/// Per-rank inclusion probabilities 0.5 * rank^-exponent clamped to [0.001, 0.5].
std::vector<double> zipf_probabilities(std::size_t n_keywords, double exponent);

/// Each document holds keyword k independently with zipf_probabilities()[k].
/// Vocabulary entries are zero-padded ranks, so lexicographic order is rank order.
Corpus synth_corpus(std::size_t n_docs, std::size_t n_keywords, double zipf_exponent, Rng& rng);

}  // namespace sapleak
