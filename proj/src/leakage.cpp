#include "sapleak/leakage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "sapleak/numeric.hpp"

namespace sapleak {

std::string_view to_string(DefenseKind kind) {
  switch (kind) {
    case DefenseKind::None: return "none";
    case DefenseKind::Clrz: return "clrz";
    case DefenseKind::Ppyy: return "ppyy";
    case DefenseKind::Seal: return "seal";
  }
  return "?";
}

DefenseKind parse_defense_kind(std::string_view name) {
  if (name == "none") return DefenseKind::None;
  if (name == "clrz") return DefenseKind::Clrz;
  if (name == "ppyy") return DefenseKind::Ppyy;
  if (name == "seal") return DefenseKind::Seal;
  throw std::invalid_argument(fmt::format("unknown defense '{}'", name));
}

void DefenseConfig::validate() const {
  switch (kind) {
    case DefenseKind::None: break;
    case DefenseKind::Clrz:
      if (!(clrz.fpr >= 0.0 && clrz.fpr < clrz.tpr && clrz.tpr <= 1.0)) {
        throw std::invalid_argument(
            fmt::format("clrz needs 0 <= fpr < tpr <= 1 (got tpr={}, fpr={})", clrz.tpr, clrz.fpr));
      }
      break;
    case DefenseKind::Ppyy:
      if (!(ppyy.epsilon > 0.0)) throw std::invalid_argument("ppyy epsilon must be positive");
      break;
    case DefenseKind::Seal:
      if (seal.pad_base < 2) throw std::invalid_argument("seal pad base must be >= 2");
      if (seal.oram_exponent && *seal.oram_exponent < 0) {
        throw std::invalid_argument("seal oram exponent must be >= 0");
      }
      break;
  }
}

std::uint64_t hash_pattern(const AccessPattern& p) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(p.kind));
  h = mix64(h ^ p.token);
  h = mix64(h ^ static_cast<std::uint64_t>(p.volume));
  for (std::uint32_t id : p.ids) h = mix64(h ^ id);
  return h;
}

InvertedIndex obfuscate_index_clrz(const InvertedIndex& index, double tpr, double fpr, Rng& rng) {
  if (!(fpr >= 0.0 && fpr < tpr && tpr <= 1.0)) {
    throw std::invalid_argument("clrz needs 0 <= fpr < tpr <= 1");
  }
  InvertedIndex out;
  out.n_docs = index.n_docs;
  out.columns.resize(index.n_keywords());
  const std::uint64_t base = rng();
  const auto n_docs = static_cast<std::int64_t>(index.n_docs);
  const auto n_cols = static_cast<std::int64_t>(index.n_keywords());

#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t kw = 0; kw < n_cols; ++kw) {
    Rng col_rng(derive_seed(base, static_cast<std::uint64_t>(kw), "clrz"));
    const auto& ones = index.columns[kw];
    std::vector<std::uint32_t> kept;
    kept.reserve(ones.size());
    if (tpr >= 1.0) {
      kept = ones;
    } else {
      std::bernoulli_distribution keep(tpr);
      for (std::uint32_t d : ones) {
        if (keep(col_rng)) kept.push_back(d);
      }
    }

    std::vector<std::uint32_t> added;
    if (fpr > 0.0) {
      // walk the zero entries of the column with geometric gaps
      std::geometric_distribution<std::int64_t> gap(fpr);
      std::size_t oi = 0;
      std::int64_t doc = -1;
      std::int64_t zero_rank = -1;
      for (std::int64_t target = gap(col_rng);; target += 1 + gap(col_rng)) {
        while (zero_rank < target && doc < n_docs) {
          ++doc;
          if (doc >= n_docs) break;
          while (oi < ones.size() && ones[oi] < doc) ++oi;
          if (oi < ones.size() && ones[oi] == doc) continue;
          ++zero_rank;
        }
        if (doc >= n_docs) break;
        added.push_back(static_cast<std::uint32_t>(doc));
      }
    }

    auto& col = out.columns[kw];
    col.resize(kept.size() + added.size());
    std::merge(kept.begin(), kept.end(), added.begin(), added.end(), col.begin());
  }
  return out;
}

PpyyVolumes setup_ppyy_volumes(const InvertedIndex& index, double epsilon, std::size_t n,
                               Rng& rng) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("ppyy epsilon must be positive");
  if (n == 0) throw std::invalid_argument("ppyy needs n >= 1");
  const double shift = ppyy_pad_constant(epsilon, static_cast<std::int64_t>(n));
  const double scale = 2.0 / epsilon;
  PpyyVolumes out;
  out.padded.resize(index.n_keywords());
  for (std::size_t kw = 0; kw < index.n_keywords(); ++kw) {
    auto pad = static_cast<std::int64_t>(std::ceil(sample_laplace(rng, scale) + shift));
    if (pad < 0) {
      ++out.loss_events;
      pad = 0;
    }
    out.padded[kw] = static_cast<std::int64_t>(index.column_weight(kw)) + pad;
  }
  return out;
}

std::int64_t seal_padded_volume(std::int64_t volume, std::int64_t pad_base) {
  if (pad_base < 2) throw std::invalid_argument("seal pad base must be >= 2");
  const std::int64_t target = std::max<std::int64_t>(volume, 1);
  std::int64_t p = 1;
  while (p < target) p *= pad_base;
  return p;
}

int default_oram_exponent(std::size_t n_docs) {
  int a = 0;
  while ((std::size_t{1} << a) < n_docs) ++a;
  return a;
}

AccessPattern seal_pattern(std::span<const std::uint32_t> doc_ids, std::size_t n_docs,
                           int oram_exponent, std::int64_t pad_base) {
  if (oram_exponent < 0 || oram_exponent > default_oram_exponent(n_docs)) {
    throw std::invalid_argument(fmt::format("oram exponent {} outside [0, {}]", oram_exponent,
                                            default_oram_exponent(n_docs)));
  }
  const std::size_t n_blocks = std::size_t{1} << oram_exponent;
  const std::size_t block_size = std::max<std::size_t>(1, (n_docs + n_blocks - 1) / n_blocks);
  AccessPattern p;
  p.kind = PatternKind::Blocks;
  for (std::uint32_t id : doc_ids) p.ids.push_back(static_cast<std::uint32_t>(id / block_size));
  std::sort(p.ids.begin(), p.ids.end());
  p.ids.erase(std::unique(p.ids.begin(), p.ids.end()), p.ids.end());
  p.volume = seal_padded_volume(static_cast<std::int64_t>(doc_ids.size()), pad_base);
  return p;
}

ObservationSequence simulate(const QueryLog& queries, const InvertedIndex& index,
                             const DefenseConfig& defense, Rng& rng) {
  defense.validate();
  ObservationSequence obs;
  obs.n_docs = index.n_docs;
  obs.n_intervals = queries.n_intervals;

  const InvertedIndex* source = &index;
  InvertedIndex obfuscated;
  PpyyVolumes ppyy;
  std::uint64_t token_base = 0;
  int oram_exponent = 0;
  switch (defense.kind) {
    case DefenseKind::None: break;
    case DefenseKind::Clrz:
      obfuscated = obfuscate_index_clrz(index, defense.clrz.tpr, defense.clrz.fpr, rng);
      source = &obfuscated;
      break;
    case DefenseKind::Ppyy:
      ppyy = setup_ppyy_volumes(index, defense.ppyy.epsilon, index.n_keywords(), rng);
      obs.ppyy_loss_events = ppyy.loss_events;
      token_base = rng();
      break;
    case DefenseKind::Seal:
      oram_exponent = defense.seal.oram_exponent.value_or(default_oram_exponent(index.n_docs));
      break;
  }

  std::vector<std::shared_ptr<const AccessPattern>> cache(index.n_keywords());
  auto pattern_for = [&](std::uint32_t kw) -> std::shared_ptr<const AccessPattern> {
    if (cache.at(kw)) return cache[kw];
    AccessPattern p;
    switch (defense.kind) {
      case DefenseKind::None:
      case DefenseKind::Clrz:
        p.kind = PatternKind::DocIds;
        p.ids = source->columns[kw];
        p.volume = static_cast<std::int64_t>(p.ids.size());
        break;
      case DefenseKind::Ppyy:
        p.kind = PatternKind::Token;
        // mix64 is a bijection, so distinct keywords get distinct tokens
        p.token = mix64(token_base ^ kw);
        p.volume = ppyy.padded[kw];
        break;
      case DefenseKind::Seal:
        p = seal_pattern(index.columns[kw], index.n_docs, oram_exponent, defense.seal.pad_base);
        break;
    }
    cache[kw] = std::make_shared<const AccessPattern>(std::move(p));
    return cache[kw];
  };

  obs.records.reserve(queries.queries.size());
  for (const auto& q : queries.queries) {
    if (q.interval >= queries.n_intervals) throw std::out_of_range("query interval out of range");
    obs.records.push_back({q.interval, pattern_for(q.keyword), q.keyword});
  }
  return obs;
}

namespace {

struct DerefHash {
  std::size_t operator()(const AccessPattern* p) const { return hash_pattern(*p); }
};
struct DerefEq {
  bool operator()(const AccessPattern* a, const AccessPattern* b) const { return *a == *b; }
};

}  // namespace

TagTable tag_observations(const ObservationSequence& obs, bool with_cooccurrence) {
  if (obs.records.empty()) throw std::invalid_argument("empty observation sequence");
  TagTable t;
  t.n_docs = obs.n_docs;
  t.n_intervals = obs.n_intervals;
  t.counts.assign(obs.n_intervals, 0);

  std::unordered_map<const AccessPattern*, std::size_t> by_pointer;
  std::unordered_map<const AccessPattern*, std::size_t, DerefHash, DerefEq> by_content;
  std::vector<std::vector<std::int64_t>> per_interval;

  for (const auto& rec : obs.records) {
    const AccessPattern* key = rec.pattern.get();
    std::size_t tag;
    if (auto it = by_pointer.find(key); it != by_pointer.end()) {
      tag = it->second;
    } else {
      auto [cit, inserted] = by_content.emplace(key, t.patterns.size());
      tag = cit->second;
      if (inserted) {
        t.patterns.push_back(rec.pattern);
        t.truth.push_back(rec.keyword);
        t.truth_counts.push_back(0);
        t.tag_counts.push_back(0);
        per_interval.emplace_back(obs.n_intervals, 0);
      }
      by_pointer.emplace(key, tag);
    }
    ++per_interval[tag].at(rec.interval);
    ++t.counts[rec.interval];
    ++t.tag_counts[tag];
    if (t.truth[tag] == rec.keyword) ++t.truth_counts[tag];
  }

  t.m = t.patterns.size();
  t.freq = Matrix(t.m, t.n_intervals, 0.0);
  for (std::size_t j = 0; j < t.m; ++j) {
    for (std::size_t k = 0; k < t.n_intervals; ++k) {
      if (t.counts[k] > 0) {
        t.freq(j, k) = static_cast<double>(per_interval[j][k]) / static_cast<double>(t.counts[k]);
      }
    }
    t.raw_volumes.push_back(t.patterns[j]->volume);
    t.volumes.push_back(static_cast<double>(t.patterns[j]->volume) /
                        static_cast<double>(t.n_docs));
  }
  if (with_cooccurrence && t.patterns.front()->kind == PatternKind::DocIds) {
    t.cooccurrence = tag_cooccurrence(t.patterns, t.n_docs);
  }
  return t;
}

Matrix tag_cooccurrence(std::span<const std::shared_ptr<const AccessPattern>> patterns,
                        std::size_t n_docs) {
  const auto m = static_cast<std::int64_t>(patterns.size());
  Matrix out(patterns.size(), patterns.size(), 0.0);
  const double denom = static_cast<double>(n_docs);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < m; ++i) {
    const auto& a = patterns[i]->ids;
    for (std::int64_t j = i; j < m; ++j) {
      const auto& b = patterns[j]->ids;
      std::size_t common = 0;
      auto ia = a.begin();
      auto ib = b.begin();
      while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
          ++ia;
        } else if (*ib < *ia) {
          ++ib;
        } else {
          ++common;
          ++ia;
          ++ib;
        }
      }
      out(i, j) = out(j, i) = static_cast<double>(common) / denom;
    }
  }
  return out;
}

std::int64_t returned_documents(const ObservationSequence& obs) {
  std::int64_t total = 0;
  for (const auto& rec : obs.records) total += rec.pattern->volume;
  return total;
}

std::int64_t clean_documents(const QueryLog& queries, const InvertedIndex& index) {
  std::int64_t total = 0;
  for (const auto& q : queries.queries) {
    total += static_cast<std::int64_t>(index.column_weight(q.keyword));
  }
  return total;
}

double overhead_percent(std::int64_t returned, std::int64_t clean_returned) {
  if (clean_returned <= 0) {
    throw std::invalid_argument("overhead undefined when the undefended volume is zero");
  }
  return (static_cast<double>(returned) / static_cast<double>(clean_returned) - 1.0) * 100.0;
}

}  // namespace sapleak
