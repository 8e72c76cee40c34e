#include <sstream>

#include <gtest/gtest.h>

#include "sapleak/report.hpp"

using namespace sapleak;

namespace {

ResultRecord record(const std::string& n, const std::string& alpha, std::uint64_t seed, double acc,
                    const std::string& defense = "none") {
  ExperimentConfig cfg;
  apply_setting(cfg, "experiment.n", n);
  apply_setting(cfg, "experiment.pool_size", "3000");
  apply_setting(cfg, "attack.alpha", alpha);
  apply_setting(cfg, "defense.kind", defense);
  ResultRecord rec;
  rec.config = cfg.key_values();
  rec.config_hash = cfg.hash();
  rec.result = {seed, acc, acc / 2, defense == "none" ? 0.0 : 40.0, 20, 250, 0.01};
  return rec;
}

std::vector<ResultRecord> alpha_sweep() {
  std::vector<ResultRecord> recs;
  // deliberately out of order; alpha spelled as the config would print it
  for (const char* n : {"500", "100"}) {
    for (const char* a : {"1", "0.25", "0", "0.75", "0.5"}) {
      for (std::uint64_t s = 0; s < 3; ++s) recs.push_back(record(n, a, 2 - s, 0.1 * s + 0.05));
    }
  }
  return recs;
}

std::string csv(const std::vector<ResultRecord>& recs, Figure f) {
  std::ostringstream out;
  write_report_csv(build_report(recs, f), f, out);
  return out.str();
}

}  // namespace

TEST(Report, FigureNames) {
  for (const char* name : {"attcomp", "clrz", "ppyy", "seal", "alpha", "offset"}) {
    EXPECT_EQ(to_string(parse_figure(name)), name);
  }
  EXPECT_THROW(parse_figure("fig7"), std::invalid_argument);
}

TEST(Report, AlphaSweepGivesFiveRowsPerN) {
  const auto rows = build_report(alpha_sweep(), Figure::Alpha);
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0].series[0], "100");
  EXPECT_EQ(rows[5].series[0], "500");
  const char* xs[] = {"0", "0.25", "0.5", "0.75", "1"};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(rows[i].x, xs[i]);
  for (const auto& r : rows) {
    EXPECT_EQ(r.summary.weighted.count, 3u);
    EXPECT_NEAR(r.summary.weighted.mean, 0.15, 1e-12);
    EXPECT_LT(r.summary.weighted.ci_low, r.summary.weighted.mean);
  }
}

TEST(Report, CsvHeaderAndRowCount) {
  const auto text = csv(alpha_sweep(), Figure::Alpha);
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("figure,experiment.n,attack.kind,attack.alpha,runs,mean,ci_low,ci_high", 0), 0u) << header;
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 10u);
}

TEST(Report, BytesIndependentOfRecordOrder) {
  auto recs = alpha_sweep();
  const auto a = csv(recs, Figure::Alpha);
  std::reverse(recs.begin(), recs.end());
  EXPECT_EQ(csv(recs, Figure::Alpha), a);
  EXPECT_EQ(csv(recs, Figure::Alpha), a);
}

TEST(Report, DefenseFigureFiltersAndFailsWhenEmpty) {
  auto recs = alpha_sweep();
  EXPECT_THROW(build_report(recs, Figure::Clrz), std::runtime_error);
  recs.push_back(record("100", "0.5", 0, 0.3, "clrz"));
  recs.push_back(record("100", "0.5", 1, 0.5, "clrz"));
  const auto rows = build_report(recs, Figure::Clrz);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].summary.weighted.count, 2u);
  EXPECT_EQ(rows[0].summary.overhead.mean, 40.0);
  EXPECT_THROW(build_report({}, Figure::Alpha), std::runtime_error);
}

TEST(Report, MissingKeyIsAnError) {
  auto recs = alpha_sweep();
  recs[0].config.erase("attack.alpha");
  EXPECT_THROW(build_report(recs, Figure::Alpha), std::runtime_error);
}
