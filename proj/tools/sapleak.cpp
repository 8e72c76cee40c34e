// sapleak: corpus ingestion, trend tables, experiment suites and reports.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sapleak/config.hpp"
#include "sapleak/corpus.hpp"
#include "sapleak/harness.hpp"
#include "sapleak/io.hpp"
#include "sapleak/report.hpp"
#include "sapleak/trends.hpp"

namespace fs = std::filesystem;
using namespace sapleak;

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

// Raised for problems the user fixes by changing flags or the config file.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  // ingest
  std::string input, dictionary, stopwords, output;
  // trends
  std::string cache;
  std::optional<std::size_t> keywords, weeks;
  std::optional<double> concentration, spread;
  std::optional<std::uint64_t> trend_seed;
  // run
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs, repetitions;
  std::string results, dump;
  // report
  std::string figure;
};

SuiteConfig load_optional_config(const std::string& path) {
  if (path.empty()) return {};
  return load_suite_config(path);
}

// Flag value if given, otherwise the config value, otherwise an error.
std::string pick(const std::string& flag, const std::map<std::string, std::string>& section,
                 const std::string& key, const std::string& flag_name) {
  if (!flag.empty()) return flag;
  if (auto it = section.find(key); it != section.end()) return it->second;
  throw UsageError(fmt::format("{} is required", flag_name));
}

std::string pick_or(const std::string& flag, const std::map<std::string, std::string>& section,
                    const std::string& key, std::string fallback) {
  if (!flag.empty()) return flag;
  if (auto it = section.find(key); it != section.end()) return it->second;
  return fallback;
}

template <typename T>
T number_or(const std::optional<T>& flag, const std::map<std::string, std::string>& section,
            const std::string& key, T fallback) {
  if (flag) return *flag;
  auto it = section.find(key);
  if (it == section.end()) return fallback;
  try {
    if constexpr (std::is_floating_point_v<T>) {
      return static_cast<T>(std::stod(it->second));
    } else {
      return static_cast<T>(std::stoull(it->second));
    }
  } catch (const std::exception&) {
    throw UsageError(fmt::format("bad value '{}' for {}", it->second, key));
  }
}

fs::path default_results(const std::string& name) {
  const char* dir = std::getenv("SAPLEAK_RESULTS_DIR");
  return fs::path(dir && *dir ? dir : "results") / (name + ".jsonl");
}

int cmd_ingest(const Options& opt) {
  const SuiteConfig suite = load_optional_config(opt.config);
  const fs::path input = pick(opt.input, suite.ingest, "input", "--input");
  const fs::path dict_path = pick(opt.dictionary, suite.ingest, "dictionary", "--dictionary");
  const std::string stop_path = pick_or(opt.stopwords, suite.ingest, "stopwords", "");
  const fs::path output = pick(opt.output, suite.ingest, "output", "--output");

  const WordSet dictionary = load_word_list(dict_path);
  const WordSet stopwords = stop_path.empty() ? WordSet{} : load_word_list(stop_path);
  const auto texts = read_raw_texts(input);
  if (texts.empty()) throw std::runtime_error(fmt::format("no documents found in {}", input.string()));
  const Corpus corpus = corpus_from_texts(texts, dictionary, stopwords);
  if (corpus.vocabulary.empty()) throw std::runtime_error("corpus has no dictionary keywords");
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  write_corpus_cache(corpus, output);
  std::cout << fmt::format("documents: {}\nvocabulary: {}\n", corpus.size(), corpus.vocabulary.size());
  return 0;
}

void check_trend_table(const TrendTable& table) {
  if (table.keywords.empty() || table.n_weeks() == 0) throw std::runtime_error("trend table is empty");
  const Matrix& p = table.popularity;
  for (std::size_t r = 0; r < p.rows(); ++r) {
    for (double v : p.row(r)) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::runtime_error(fmt::format("keyword '{}' has an invalid popularity value",
                                             table.keywords[r]));
      }
    }
  }
}

int cmd_trends(const Options& opt) {
  const SuiteConfig suite = load_optional_config(opt.config);
  const auto& sec = suite.trend_table;
  const std::string input = pick_or(opt.input, sec, "input", "");
  const std::string cache = pick_or(opt.cache, sec, "cache", "");

  if (!input.empty()) {
    const TrendTable table = read_trend_table(fs::path(input));
    check_trend_table(table);
    std::size_t missing = 0;
    if (!cache.empty()) {
      const Corpus corpus = read_corpus_cache(fs::path(cache));
      for (const auto& w : corpus.vocabulary) missing += table.find(w) == nullptr;
    }
    std::cout << fmt::format("keywords: {}\nweeks: {}\n", table.keywords.size(), table.n_weeks());
    if (!cache.empty()) std::cout << fmt::format("missing corpus keywords: {}\n", missing);
    return 0;
  }

  if (cache.empty()) throw UsageError("trends needs --input to check a table or --cache to synthesize one");
  const fs::path output = pick(opt.output, sec, "output", "--output");
  const Corpus corpus = read_corpus_cache(fs::path(cache));
  const std::size_t n_kw = number_or(opt.keywords, sec, "keywords", corpus.vocabulary.size());
  const std::size_t n_weeks = number_or(opt.weeks, sec, "weeks", std::size_t{260});
  const double concentration = number_or(opt.concentration, sec, "concentration", 1.0);
  const double spread = number_or(opt.spread, sec, "spread", 0.0);
  const std::uint64_t seed = number_or(opt.trend_seed, sec, "seed", std::uint64_t{1});

  std::vector<std::string> names;
  for (KeywordId k : top_keywords(corpus, std::min(n_kw, corpus.vocabulary.size()))) {
    names.push_back(corpus.vocabulary[k]);
  }
  std::sort(names.begin(), names.end());
  Rng rng(derive_seed(seed, 0, "synthetic_trends"));
  const TrendTable table = synth_trend_table(names, n_weeks, concentration, spread, rng);
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  std::ofstream out(output);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", output.string()));
  write_trend_table(table, out);
  std::cout << fmt::format("keywords: {}\nweeks: {}\n", table.keywords.size(), table.n_weeks());
  return 0;
}

void dump_trace(const ExperimentConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  DatasetCache cache;
  RunTrace trace;
  const RunResult r = run_once(cfg, *cache.get(cfg), 0, &trace);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", (dir / name).string()));
    return out;
  };
  {
    auto out = open("queries.csv");
    write_query_log(trace.queries, out);
  }
  {
    auto out = open("observations.jsonl");
    write_observations(trace.observations, out);
  }
  {
    auto out = open("tags.jsonl");
    write_tag_table(trace.tags, out);
  }
  {
    auto out = open("assignment.csv");
    write_assignment(trace.keyword_of, out);
  }
  std::cout << fmt::format("dump: seed 0 weighted accuracy {:.4f} over {} tags\n",
                           r.weighted_accuracy, r.m);
}

int cmd_run(const Options& opt) {
  if (opt.config.empty()) throw UsageError("run needs --config");
  SuiteConfig suite = load_suite_config(opt.config);
  if (opt.seed) {
    suite.base_seed = *opt.seed;
  }
  if (opt.repetitions) suite.repetitions = *opt.repetitions;
  if (opt.jobs) suite.jobs = *opt.jobs;
  if (suite.repetitions == 0) throw UsageError("repetitions must be at least 1");
  if (suite.jobs == 0) throw UsageError("jobs must be at least 1");
  const std::vector<ExperimentConfig> configs = suite.expand();
  const fs::path results = !opt.results.empty()   ? fs::path(opt.results)
                           : !suite.results.empty() ? fs::path(suite.results)
                                                    : default_results(suite.name);

  if (!opt.dump.empty()) dump_trace(configs.front(), opt.dump);
  const SuiteOutcome outcome = run_suite(configs, suite.repetitions, suite.jobs, results, std::cerr);
  std::cout << fmt::format("configs: {}\nwritten: {}\nskipped: {}\nfailed: {}\nresults: {}\n",
                           configs.size(), outcome.written, outcome.skipped, outcome.failed,
                           results.string());
  return outcome.failed == 0 ? 0 : kRuntimeError;
}

int cmd_report(const Options& opt) {
  const SuiteConfig suite = load_optional_config(opt.config);
  std::string results = pick_or(opt.results, suite.report, "results", "");
  if (results.empty() && !opt.config.empty()) {
    results = suite.results.empty() ? default_results(suite.name).string() : suite.results;
  }
  if (results.empty()) throw UsageError("--results is required");
  const std::string figure_name = pick(opt.figure, suite.report, "figure", "--figure");
  const fs::path output = pick(opt.output, suite.report, "output", "--output");

  Figure figure;
  try {
    figure = parse_figure(figure_name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto rows = build_report(read_results(results), figure);
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  std::ofstream out(output);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", output.string()));
  write_report_csv(rows, figure, out);
  std::cout << fmt::format("rows: {}\n", rows.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SSE leakage lab: simulate defenses and run query-recovery attacks"};
  app.require_subcommand(1, 1);
  Options opt;

  auto* ingest = app.add_subcommand("ingest", "Preprocess raw documents into a corpus cache");
  ingest->add_option("--config", opt.config, "Suite config file (ingest section)");
  ingest->add_option("--input", opt.input, "Directory of .txt files or a JSONL file");
  ingest->add_option("--dictionary", opt.dictionary, "Allowed words, one per line");
  ingest->add_option("--stopwords", opt.stopwords, "Excluded words, one per line (optional)");
  ingest->add_option("--output", opt.output, "Corpus cache to write");

  auto* trends = app.add_subcommand("trends", "Check or synthesize a keyword trend table");
  trends->add_option("--config", opt.config, "Suite config file (trend_table section)");
  trends->add_option("--input", opt.input, "Trend table CSV to check");
  trends->add_option("--cache", opt.cache, "Corpus cache supplying keyword names");
  trends->add_option("--output", opt.output, "Trend table CSV to write");
  trends->add_option("--keywords", opt.keywords, "Number of most frequent keywords to cover");
  trends->add_option("--weeks", opt.weeks, "Number of weeks");
  trends->add_option("--concentration", opt.concentration, "Gamma shape of weekly popularity");
  trends->add_option("--spread", opt.spread, "Log-normal sigma of per-keyword base popularity");
  trends->add_option("--seed", opt.trend_seed, "Seed for synthesis");

  auto* run = app.add_subcommand("run", "Run an experiment suite");
  run->add_option("--config", opt.config, "Suite config file")->required();
  run->add_option("--seed", opt.seed, "Base seed, overriding the config");
  run->add_option("--jobs", opt.jobs, "Concurrent runs");
  run->add_option("--repetitions", opt.repetitions, "Runs per configuration");
  run->add_option("--results", opt.results, "Results file (JSONL)");
  run->add_option("--dump", opt.dump, "Directory for intermediate files of the first run");

  auto* report = app.add_subcommand("report", "Aggregate results into a figure table");
  report->add_option("--config", opt.config, "Suite config file (report section)");
  report->add_option("--results", opt.results, "Results file (JSONL)");
  report->add_option("--figure", opt.figure, "attcomp, clrz, ppyy, seal, alpha or offset");
  report->add_option("--output", opt.output, "CSV table to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (*ingest) return cmd_ingest(opt);
    if (*trends) return cmd_trends(opt);
    if (*run) return cmd_run(opt);
    return cmd_report(opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
