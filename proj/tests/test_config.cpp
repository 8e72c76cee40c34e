#include <filesystem>
#include <set>

#include <gtest/gtest.h>

#include "sapleak/config.hpp"
#include "test_helpers.hpp"

using namespace sapleak;
using testing_helpers::fixture;

TEST(Config, ParsesMinimalSuite) {
  const auto suite = load_suite_config(fixture("suite_min.yaml"));
  EXPECT_EQ(suite.name, "minimal");
  EXPECT_EQ(suite.repetitions, 3u);
  const auto cfgs = suite.expand();
  ASSERT_EQ(cfgs.size(), 1u);
  const auto& c = cfgs[0];
  EXPECT_EQ(c.base_seed, 42u);
  EXPECT_EQ(c.corpus.n_docs, 2000u);
  EXPECT_EQ(c.trends.n_weeks, 60u);
  EXPECT_EQ(c.trends.concentration, 10.0);
  EXPECT_EQ(c.n, 50u);
  EXPECT_EQ(c.rho, 20u);
  EXPECT_EQ(c.eta, 20.0);
  EXPECT_EQ(c.tau, 0u);
  // untouched keys keep their defaults
  EXPECT_EQ(c.attack.alpha, 0.5);
  EXPECT_EQ(c.defense.kind, DefenseKind::None);
}

TEST(Config, Defaults) {
  const ExperimentConfig c;
  EXPECT_EQ(c.pool_size, 3000u);
  EXPECT_EQ(c.rho, 50u);
  EXPECT_EQ(c.tau, 5u);
  EXPECT_EQ(SuiteConfig{}.repetitions, 30u);
}

TEST(Config, GridExpandsInOrder) {
  const auto cfgs = load_suite_config(fixture("suite_grid.yaml")).expand();
  ASSERT_EQ(cfgs.size(), 4u);
  EXPECT_EQ(cfgs[0].defense.kind, DefenseKind::None);
  EXPECT_EQ(cfgs[0].n, 30u);
  EXPECT_EQ(cfgs[1].defense.kind, DefenseKind::None);
  EXPECT_EQ(cfgs[1].n, 60u);
  EXPECT_EQ(cfgs[2].defense.kind, DefenseKind::Clrz);
  EXPECT_EQ(cfgs[2].n, 30u);
  std::set<std::string> hashes;
  for (const auto& c : cfgs) hashes.insert(c.hash());
  EXPECT_EQ(hashes.size(), 4u);
}

TEST(Config, UnknownKeyNamedWithLine) {
  const char* text = "name: x\nexperiment:\n  n: 10\n  bogus: 3\n";
  try {
    parse_suite_config(text, "cfg.yaml");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("experiment.bogus"), std::string::npos) << msg;
    EXPECT_NE(msg.find("cfg.yaml:4"), std::string::npos) << msg;
  }
  EXPECT_THROW(parse_suite_config("whatever: 1\n"), ConfigError);
  EXPECT_THROW(parse_suite_config("grid:\n  attack.nope: [1, 2]\n"), ConfigError);
}

TEST(Config, BadValuesRejected) {
  EXPECT_THROW(parse_suite_config("experiment:\n  n: -3\n"), ConfigError);
  EXPECT_THROW(parse_suite_config("defense:\n  kind: rot13\n"), ConfigError);
  EXPECT_THROW(parse_suite_config("attack:\n  defense_aware: maybe\n"), ConfigError);
  EXPECT_THROW(parse_suite_config("repetitions: 0\n"), ConfigError);
  EXPECT_THROW(parse_suite_config("grid:\n  experiment.n: []\n"), ConfigError);
  EXPECT_THROW(parse_suite_config("experiment: [1\n"), ConfigError);
}

TEST(Config, ValidationOnExpand) {
  auto suite = parse_suite_config("experiment:\n  n: 400\n  pool_size: 300\n");
  EXPECT_THROW(suite.expand(), ConfigError);
  suite = parse_suite_config("experiment:\n  aux: generating\ncorpus:\n  kind: cache\n  path: x\n");
  EXPECT_THROW(suite.expand(), ConfigError);
  suite = parse_suite_config("experiment:\n  rho: 50\n  tau: 5\ntrends:\n  n_weeks: 40\n");
  EXPECT_THROW(suite.expand(), ConfigError);
}

TEST(Config, HashIsStableAndSensitive) {
  ExperimentConfig a;
  ExperimentConfig b;
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  apply_setting(b, "defense.clrz.fpr", "0.1");
  EXPECT_NE(a.hash(), b.hash());
  apply_setting(b, "defense.clrz.fpr", "0.05");
  EXPECT_EQ(a.hash(), b.hash());
  // spelling of a number does not matter
  apply_setting(b, "experiment.eta", "5.000");
  EXPECT_EQ(a.hash(), b.hash());
}

TEST(Config, EveryKeyRoundTrips) {
  const ExperimentConfig base;
  const auto kv = base.key_values();
  for (const auto& key : experiment_keys()) {
    ASSERT_TRUE(kv.contains(key)) << key;
    ExperimentConfig c;
    apply_setting(c, key, kv.at(key));
    EXPECT_EQ(c.key_values(), kv) << key;
  }
  ExperimentConfig scratch;
  EXPECT_THROW(apply_setting(scratch, "nope", "1"), ConfigError);
}

TEST(Config, SideSections) {
  const auto suite = parse_suite_config(
      "ingest:\n  input: raw\n  output: c.jsonl\nreport:\n  figure: alpha\n");
  EXPECT_EQ(suite.ingest.at("input"), "raw");
  EXPECT_EQ(suite.report.at("figure"), "alpha");
  EXPECT_THROW(parse_suite_config("ingest:\n  colour: red\n"), ConfigError);
}

TEST(Config, ShippedSuitesExpand) {
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(SAPLEAK_CONFIG_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    ++seen;
    SCOPED_TRACE(entry.path().string());
    const auto suite = load_suite_config(entry.path());
    EXPECT_FALSE(suite.expand().empty());
  }
  EXPECT_GE(seen, 10u);
}
