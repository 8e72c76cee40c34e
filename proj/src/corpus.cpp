#include "sapleak/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace sapleak {

namespace fs = std::filesystem;

bool InvertedIndex::contains(std::size_t doc, std::size_t kw) const {
  const auto& col = columns.at(kw);
  return std::binary_search(col.begin(), col.end(), static_cast<std::uint32_t>(doc));
}

std::set<std::string> extract_keywords(std::string_view raw_text, const WordSet& dictionary,
                                       const WordSet& stopwords) {
  std::set<std::string> out;
  std::string token;
  auto flush = [&] {
    if (!token.empty() && dictionary.contains(token) && !stopwords.contains(token)) {
      out.insert(token);
    }
    token.clear();
  };
  for (char ch : raw_text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalpha(c)) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

WordSet load_word_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read word list {}", path.string()));
  WordSet words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w;
    for (char ch : line) {
      const auto c = static_cast<unsigned char>(ch);
      if (!std::isspace(c)) w.push_back(static_cast<char>(std::tolower(c)));
    }
    if (!w.empty()) words.insert(std::move(w));
  }
  return words;
}

Corpus corpus_from_texts(const std::vector<std::pair<std::uint64_t, std::string>>& texts,
                         const WordSet& dictionary, const WordSet& stopwords) {
  std::vector<std::set<std::string>> extracted;
  extracted.reserve(texts.size());
  std::set<std::string> all;
  std::set<std::uint64_t> seen_ids;
  for (const auto& [id, text] : texts) {
    if (!seen_ids.insert(id).second) {
      throw std::invalid_argument(fmt::format("duplicate document id {}", id));
    }
    extracted.push_back(extract_keywords(text, dictionary, stopwords));
    all.insert(extracted.back().begin(), extracted.back().end());
  }

  Corpus corpus;
  corpus.vocabulary.assign(all.begin(), all.end());
  std::map<std::string_view, KeywordId> lookup;
  for (KeywordId k = 0; k < corpus.vocabulary.size(); ++k) lookup.emplace(corpus.vocabulary[k], k);

  corpus.documents.reserve(texts.size());
  for (std::size_t d = 0; d < texts.size(); ++d) {
    Document doc{texts[d].first, {}};
    for (const auto& w : extracted[d]) doc.keywords.push_back(lookup.at(w));
    // std::set iteration is sorted and so is the vocabulary
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

std::vector<std::pair<std::uint64_t, std::string>> read_raw_texts(const fs::path& input) {
  std::vector<std::pair<std::uint64_t, std::string>> texts;
  if (fs::is_directory(input)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(input)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (std::size_t i = 0; i < files.size(); ++i) {
      std::ifstream in(files[i], std::ios::binary);
      if (!in) throw std::runtime_error(fmt::format("cannot read {}", files[i].string()));
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      texts.emplace_back(i, std::move(text));
    }
    return texts;
  }

  std::ifstream in(input);
  if (!in) throw std::runtime_error(fmt::format("cannot read corpus input {}", input.string()));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto rec = nlohmann::json::parse(line);
      texts.emplace_back(rec.at("id").get<std::uint64_t>(), rec.at("text").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(
          fmt::format("{}:{}: bad corpus record: {}", input.string(), line_no, e.what()));
    }
  }
  return texts;
}

std::vector<std::size_t> document_frequencies(const Corpus& corpus) {
  std::vector<std::size_t> freq(corpus.vocabulary.size(), 0);
  for (const auto& doc : corpus.documents) {
    for (KeywordId k : doc.keywords) ++freq.at(k);
  }
  return freq;
}

std::vector<KeywordId> top_keywords(const Corpus& corpus, std::size_t pool_size) {
  if (pool_size > corpus.vocabulary.size()) {
    throw std::invalid_argument(fmt::format("pool size {} exceeds vocabulary size {}", pool_size,
                                            corpus.vocabulary.size()));
  }
  const auto freq = document_frequencies(corpus);
  std::vector<KeywordId> order(corpus.vocabulary.size());
  std::iota(order.begin(), order.end(), 0);
  // vocabulary is sorted, so index order is lexicographic order
  std::stable_sort(order.begin(), order.end(),
                   [&](KeywordId a, KeywordId b) { return freq[a] > freq[b]; });
  order.resize(pool_size);
  return order;
}

KeywordUniverse build_universe(const Corpus& corpus, std::size_t pool_size, std::size_t n,
                               Rng& rng) {
  if (n > pool_size) {
    throw std::invalid_argument(
        fmt::format("universe size {} exceeds pool size {}", n, pool_size));
  }
  auto pool = top_keywords(corpus, pool_size);
  // partial Fisher-Yates: the first n slots become a uniform n-subset
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(n);
  return KeywordUniverse{std::move(pool)};
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, Rng& rng) {
  const std::size_t n = corpus.size();
  if (n < 2) throw std::invalid_argument("cannot split a corpus with fewer than 2 documents");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  const std::size_t n_client = (n + 1) / 2;
  std::vector<std::size_t> client_pos(order.begin(), order.begin() + n_client);
  std::vector<std::size_t> adv_pos(order.begin() + n_client, order.end());
  std::sort(client_pos.begin(), client_pos.end());
  std::sort(adv_pos.begin(), adv_pos.end());

  auto take = [&](const std::vector<std::size_t>& pos) {
    Corpus part;
    part.vocabulary = corpus.vocabulary;
    part.documents.reserve(pos.size());
    for (std::size_t p : pos) part.documents.push_back(corpus.documents[p]);
    return part;
  };
  return {take(client_pos), take(adv_pos)};
}

namespace {

std::vector<std::int64_t> universe_position(const Corpus& corpus, const KeywordUniverse& universe) {
  std::vector<std::int64_t> pos(corpus.vocabulary.size(), -1);
  for (std::size_t i = 0; i < universe.size(); ++i) {
    const KeywordId k = universe.keywords[i];
    if (k >= pos.size()) {
      throw std::invalid_argument(fmt::format("universe keyword {} not in vocabulary", k));
    }
    pos[k] = static_cast<std::int64_t>(i);
  }
  return pos;
}

}  // namespace

InvertedIndex build_index(const Corpus& corpus, const KeywordUniverse& universe) {
  const auto pos = universe_position(corpus, universe);
  InvertedIndex index;
  index.n_docs = corpus.size();
  index.columns.resize(universe.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (KeywordId k : corpus.documents[d].keywords) {
      if (pos[k] >= 0) index.columns[pos[k]].push_back(static_cast<std::uint32_t>(d));
    }
  }
  return index;
}

AuxKnowledge compute_aux(const Corpus& corpus, const KeywordUniverse& universe,
                         bool with_cooccurrence) {
  if (corpus.size() == 0) throw std::invalid_argument("auxiliary corpus is empty");
  const auto pos = universe_position(corpus, universe);
  const std::size_t n = universe.size();
  const double n_docs = static_cast<double>(corpus.size());

  std::vector<std::size_t> counts(n, 0);
  Matrix co;
  if (with_cooccurrence) co = Matrix(n, n, 0.0);
  std::vector<std::size_t> present;
  for (const auto& doc : corpus.documents) {
    present.clear();
    for (KeywordId k : doc.keywords) {
      if (pos[k] >= 0) present.push_back(static_cast<std::size_t>(pos[k]));
    }
    for (std::size_t a : present) ++counts[a];
    if (with_cooccurrence) {
      for (std::size_t a : present) {
        for (std::size_t b : present) co(a, b) += 1.0;
      }
    }
  }

  AuxKnowledge aux;
  aux.volumes.resize(n);
  for (std::size_t i = 0; i < n; ++i) aux.volumes[i] = static_cast<double>(counts[i]) / n_docs;
  if (with_cooccurrence) {
    for (double& v : co.data()) v /= n_docs;
    aux.cooccurrence = std::move(co);
  }
  return aux;
}

std::vector<double> zipf_probabilities(std::size_t n_keywords, double exponent) {
  std::vector<double> p(n_keywords);
  for (std::size_t k = 0; k < n_keywords; ++k) {
    const double w = 0.5 * std::pow(static_cast<double>(k + 1), -exponent);
    p[k] = std::clamp(w, 0.001, 0.5);
  }
  return p;
}

Corpus synth_corpus(std::size_t n_docs, std::size_t n_keywords, double zipf_exponent, Rng& rng) {
  if (n_docs == 0 || n_keywords == 0) {
    throw std::invalid_argument("synthetic corpus needs at least one document and keyword");
  }
  if (zipf_exponent < 0.0) throw std::invalid_argument("zipf exponent must be non-negative");

  Corpus corpus;
  const std::size_t width = fmt::format("{}", n_keywords).size();
  corpus.vocabulary.reserve(n_keywords);
  for (std::size_t k = 0; k < n_keywords; ++k) {
    corpus.vocabulary.push_back(fmt::format("kw{:0{}}", k + 1, width));
  }
  corpus.documents.resize(n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) corpus.documents[d].id = d;

  const auto probs = zipf_probabilities(n_keywords, zipf_exponent);
  const std::uint64_t base = rng();
  for (std::size_t k = 0; k < n_keywords; ++k) {
    Rng col_rng(derive_seed(base, k, "synth_corpus"));
    std::geometric_distribution<std::int64_t> gap(probs[k]);
    // skip over documents without the keyword
    for (std::int64_t d = gap(col_rng); d < static_cast<std::int64_t>(n_docs);
         d += 1 + gap(col_rng)) {
      corpus.documents[static_cast<std::size_t>(d)].keywords.push_back(static_cast<KeywordId>(k));
    }
  }
  return corpus;
}

}  // namespace sapleak
