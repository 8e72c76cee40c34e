#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "sapleak/leakage.hpp"
#include "sapleak/numeric.hpp"
#include "test_helpers.hpp"

using namespace sapleak;

namespace {

InvertedIndex index_of(std::size_t n_docs, std::vector<std::vector<std::uint32_t>> cols) {
  InvertedIndex idx;
  idx.n_docs = n_docs;
  idx.columns = std::move(cols);
  return idx;
}

std::shared_ptr<const AccessPattern> ids_pattern(std::vector<std::uint32_t> ids) {
  AccessPattern p;
  p.ids = std::move(ids);
  p.volume = static_cast<std::int64_t>(p.ids.size());
  return std::make_shared<const AccessPattern>(std::move(p));
}

ObservationSequence obs_of(std::size_t n_docs, std::size_t n_intervals,
                           std::vector<std::pair<std::uint32_t, std::shared_ptr<const AccessPattern>>> recs,
                           std::vector<std::uint32_t> truth = {}) {
  ObservationSequence obs;
  obs.n_docs = n_docs;
  obs.n_intervals = n_intervals;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    obs.records.push_back({recs[i].first, recs[i].second, truth.empty() ? 0u : truth[i]});
  }
  return obs;
}

InvertedIndex random_index(std::size_t n_docs, std::size_t n_kw, std::uint64_t seed) {
  Rng g(seed);
  const auto corpus = synth_corpus(n_docs, n_kw, 0.7, g);
  KeywordUniverse u;
  for (KeywordId k = 0; k < n_kw; ++k) u.keywords.push_back(k);
  return build_index(corpus, u);
}

}  // namespace

TEST(Clrz, IdentityWhenNoFlips) {
  const auto idx = random_index(300, 20, 1);
  Rng rng(2);
  EXPECT_EQ(obfuscate_index_clrz(idx, 1.0, 0.0, rng), idx);
}

TEST(Clrz, ZeroColumnWeightFollowsBinomial) {
  const auto idx = index_of(20000, {{}});
  Rng rng(3);
  const auto out = obfuscate_index_clrz(idx, 0.999, 0.05, rng);
  const double sigma = std::sqrt(20000 * 0.05 * 0.95);
  EXPECT_NEAR(static_cast<double>(out.column_weight(0)), 1000.0, 3 * sigma);
}

TEST(Clrz, FlipRatesMatch) {
  const auto idx = random_index(4000, 40, 4);
  Rng rng(5);
  const double tpr = 0.9, fpr = 0.1;
  const auto out = obfuscate_index_clrz(idx, tpr, fpr, rng);
  double ones = 0, kept = 0, zeros = 0, added = 0;
  for (std::size_t k = 0; k < idx.n_keywords(); ++k) {
    std::set<std::uint32_t> before(idx.columns[k].begin(), idx.columns[k].end());
    for (std::uint32_t d : out.columns[k]) {
      if (before.contains(d)) {
        ++kept;
      } else {
        ++added;
      }
    }
    ones += static_cast<double>(before.size());
    zeros += static_cast<double>(idx.n_docs - before.size());
    EXPECT_TRUE(std::is_sorted(out.columns[k].begin(), out.columns[k].end()));
  }
  EXPECT_NEAR(kept / ones, tpr, 5 * std::sqrt(tpr * (1 - tpr) / ones));
  EXPECT_NEAR(added / zeros, fpr, 5 * std::sqrt(fpr * (1 - fpr) / zeros));
}

TEST(Clrz, InvalidRatesRejected) {
  const auto idx = index_of(10, {{1}});
  Rng rng(1);
  EXPECT_THROW(obfuscate_index_clrz(idx, 0.1, 0.2, rng), std::invalid_argument);
}

TEST(Ppyy, PadsAtLeastTrueVolumeAndCountsNoLosses) {
  const auto idx = random_index(500, 50, 6);
  Rng rng(7);
  const auto v = setup_ppyy_volumes(idx, 1.0, 1000, rng);
  EXPECT_EQ(v.loss_events, 0u);
  for (std::size_t k = 0; k < idx.n_keywords(); ++k) {
    EXPECT_GE(v.padded[k], static_cast<std::int64_t>(idx.column_weight(k)));
  }
}

TEST(Ppyy, SmallerEpsilonPadsMore) {
  // pads at eps/2 stochastically dominate the pads at eps
  const auto idx = index_of(10, std::vector<std::vector<std::uint32_t>>(4000));
  Rng a(8), b(9);
  const auto v1 = setup_ppyy_volumes(idx, 0.2, 1000, a);
  const auto v2 = setup_ppyy_volumes(idx, 0.1, 1000, b);
  auto s1 = v1.padded, s2 = v2.padded;
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const auto i = static_cast<std::size_t>(q * 4000);
    EXPECT_GT(s2[i], s1[i]);
  }
}

TEST(Seal, PaddedVolumeExamples) {
  EXPECT_EQ(seal_padded_volume(5, 2), 8);
  EXPECT_EQ(seal_padded_volume(17, 4), 64);
  EXPECT_EQ(seal_padded_volume(16, 4), 16);
  EXPECT_EQ(seal_padded_volume(0, 3), 1);
  EXPECT_EQ(seal_padded_volume(1, 3), 1);
  EXPECT_THROW(seal_padded_volume(4, 1), std::invalid_argument);
}

TEST(Seal, PaddingBoundsProperty) {
  for (std::int64_t x : {2, 3, 5}) {
    for (std::int64_t v = 0; v <= 3000; ++v) {
      const auto p = seal_padded_volume(v, x);
      EXPECT_GE(p, v);
      EXPECT_LT(p, x * std::max<std::int64_t>(v, 1));
    }
  }
}

TEST(Seal, BlocksQuantizeIds) {
  const std::vector<std::uint32_t> ids{0, 1, 5, 6, 99};
  // 100 docs, 2^2 blocks of 25
  const auto p = seal_pattern(ids, 100, 2, 2);
  EXPECT_EQ(p.kind, PatternKind::Blocks);
  EXPECT_EQ(p.ids, (std::vector<std::uint32_t>{0, 3}));
  EXPECT_EQ(p.volume, 8);
  // one document per block at the default exponent
  EXPECT_EQ(default_oram_exponent(100), 7);
  EXPECT_EQ(seal_pattern(ids, 100, 7, 2).ids, ids);
  EXPECT_THROW(seal_pattern(ids, 100, 8, 2), std::invalid_argument);
}

TEST(Simulate, NoDefenseRepeatsPatterns) {
  const auto idx = index_of(6, {{0, 1}, {2}, {0, 1}});
  QueryLog log{{{0, 0}, {0, 1}, {1, 0}, {1, 2}}, 2};
  Rng rng(1);
  const auto obs = simulate(log, idx, {}, rng);
  ASSERT_EQ(obs.records.size(), 4u);
  EXPECT_EQ(*obs.records[0].pattern, *obs.records[2].pattern);
  // keywords 0 and 2 share a document set and so a tag
  EXPECT_EQ(*obs.records[0].pattern, *obs.records[3].pattern);
  const auto tags = tag_observations(obs);
  EXPECT_EQ(tags.m, 2u);
  EXPECT_EQ(tags.tag_counts, (std::vector<std::int64_t>{3, 1}));
  EXPECT_EQ(tags.truth, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(tags.truth_counts, (std::vector<std::int64_t>{2, 1}));
}

TEST(Simulate, PpyyTokensDistinctEvenWithEqualVolumes) {
  // no documents: equal true volumes, tokens still differ
  const auto idx = index_of(10, std::vector<std::vector<std::uint32_t>>(200));
  QueryLog log;
  log.n_intervals = 1;
  for (std::uint32_t k = 0; k < 200; ++k) log.queries.push_back({0, k});
  Rng rng(2);
  DefenseConfig d;
  d.kind = DefenseKind::Ppyy;
  d.ppyy.epsilon = 50.0;  // tiny noise, so padded volumes collide
  const auto obs = simulate(log, idx, d, rng);
  std::set<std::uint64_t> tokens;
  std::set<std::int64_t> volumes;
  for (const auto& r : obs.records) {
    tokens.insert(r.pattern->token);
    volumes.insert(r.pattern->volume);
  }
  EXPECT_EQ(tokens.size(), 200u);
  EXPECT_LT(volumes.size(), 200u);
  EXPECT_EQ(tag_observations(obs).m, 200u);
}

TEST(Simulate, EveryDefenseRepeatsPatternPerKeyword) {
  const auto idx = random_index(400, 30, 9);
  QueryLog log;
  log.n_intervals = 3;
  for (std::uint32_t k = 0; k < 3; ++k) {
    for (std::uint32_t i = 0; i < 30; ++i) log.queries.push_back({k, i});
  }
  for (auto kind : {DefenseKind::None, DefenseKind::Clrz, DefenseKind::Ppyy, DefenseKind::Seal}) {
    DefenseConfig d;
    d.kind = kind;
    Rng rng(10);
    const auto obs = simulate(log, idx, d, rng);
    for (std::size_t q = 0; q < 30; ++q) {
      EXPECT_EQ(*obs.records[q].pattern, *obs.records[q + 30].pattern);
      EXPECT_EQ(*obs.records[q].pattern, *obs.records[q + 60].pattern);
    }
  }
}

TEST(Simulate, NoDefenseVolumesEqualColumnSums) {
  const auto idx = random_index(600, 40, 11);
  QueryLog log;
  log.n_intervals = 1;
  for (std::uint32_t i = 0; i < 40; ++i) log.queries.push_back({0, i});
  Rng rng(1);
  const auto tags = tag_observations(simulate(log, idx, {}, rng));
  for (std::size_t j = 0; j < tags.m; ++j) {
    EXPECT_EQ(tags.raw_volumes[j], static_cast<std::int64_t>(idx.column_weight(tags.truth[j])));
    EXPECT_DOUBLE_EQ(tags.volumes[j], static_cast<double>(tags.raw_volumes[j]) / 600.0);
  }
}

TEST(Tagging, FirstAppearanceOrderAndCounts) {
  const auto a = ids_pattern({1, 2});
  const auto b = ids_pattern({2, 3});
  const auto tags = tag_observations(obs_of(4, 1, {{0, a}, {0, b}, {0, a}}), true);
  EXPECT_EQ(tags.m, 2u);
  EXPECT_EQ(tags.tag_counts, (std::vector<std::int64_t>{2, 1}));
  ASSERT_TRUE(tags.cooccurrence);
  EXPECT_DOUBLE_EQ((*tags.cooccurrence)(0, 1), 0.25);
  EXPECT_DOUBLE_EQ((*tags.cooccurrence)(0, 0), 0.5);
}

TEST(Tagging, EqualContentDifferentObjectsShareATag) {
  const auto a = ids_pattern({1, 2});
  const auto a2 = ids_pattern({1, 2});
  EXPECT_EQ(tag_observations(obs_of(4, 1, {{0, a}, {0, a2}})).m, 1u);
}

TEST(Tagging, FrequencyColumn) {
  const auto a = ids_pattern({1});
  const auto b = ids_pattern({2});
  const auto tags = tag_observations(obs_of(4, 1, {{0, a}, {0, a}, {0, b}, {0, a}}));
  EXPECT_EQ(tags.counts, (std::vector<std::int64_t>{4}));
  EXPECT_DOUBLE_EQ(tags.freq(0, 0), 0.75);
  EXPECT_DOUBLE_EQ(tags.freq(1, 0), 0.25);
}

TEST(Tagging, EmptyIntervalsGiveZeroColumns) {
  const auto a = ids_pattern({1});
  const auto b = ids_pattern({2});
  const auto tags = tag_observations(obs_of(4, 3, {{0, a}, {2, b}, {2, a}}));
  EXPECT_EQ(tags.counts, (std::vector<std::int64_t>{1, 0, 2}));
  for (std::size_t j = 0; j < tags.m; ++j) EXPECT_EQ(tags.freq(j, 1), 0.0);
  for (std::size_t k : {0u, 2u}) EXPECT_NEAR(tags.freq(0, k) + tags.freq(1, k), 1.0, 1e-12);
}

TEST(Tagging, CooccurrenceOnlyForDocIds) {
  AccessPattern p;
  p.kind = PatternKind::Token;
  p.token = 5;
  p.volume = 3;
  const auto tags = tag_observations(obs_of(4, 1, {{0, std::make_shared<const AccessPattern>(p)}}), true);
  EXPECT_FALSE(tags.cooccurrence.has_value());
}

TEST(Tagging, EmptyRejected) {
  EXPECT_THROW(tag_observations(ObservationSequence{}), std::invalid_argument);
}

TEST(Overhead, Formula) {
  EXPECT_EQ(overhead_percent(10, 10), 0.0);
  EXPECT_DOUBLE_EQ(overhead_percent(50, 10), 400.0);
  EXPECT_THROW(overhead_percent(5, 0), std::invalid_argument);
}

TEST(Overhead, NoDefenseIsZero) {
  const auto idx = random_index(300, 20, 12);
  QueryLog log{{{0, 1}, {0, 2}, {1, 1}}, 2};
  Rng rng(1);
  const auto obs = simulate(log, idx, {}, rng);
  EXPECT_EQ(returned_documents(obs), clean_documents(log, idx));
}

TEST(DefenseConfig, Validation) {
  DefenseConfig d;
  d.kind = DefenseKind::Clrz;
  d.clrz = {0.1, 0.1};
  EXPECT_THROW(d.validate(), std::invalid_argument);
  d.kind = DefenseKind::Ppyy;
  d.ppyy.epsilon = 0.0;
  EXPECT_THROW(d.validate(), std::invalid_argument);
  d.kind = DefenseKind::Seal;
  d.seal.pad_base = 1;
  EXPECT_THROW(d.validate(), std::invalid_argument);
  EXPECT_EQ(parse_defense_kind("seal"), DefenseKind::Seal);
  EXPECT_EQ(to_string(DefenseKind::Clrz), "clrz");
  EXPECT_THROW(parse_defense_kind("oram"), std::invalid_argument);
}
