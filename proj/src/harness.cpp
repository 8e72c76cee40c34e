#include "sapleak/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <omp.h>

#include "sapleak/attack.hpp"
#include "sapleak/io.hpp"

namespace sapleak {

namespace fs = std::filesystem;
using nlohmann::json;

std::shared_ptr<const Dataset> load_dataset(const ExperimentConfig& cfg) {
  auto data = std::make_shared<Dataset>();
  if (cfg.corpus.kind == CorpusKind::Synthetic) {
    Rng rng(derive_seed(cfg.corpus.seed, 0, "synthetic_corpus"));
    data->corpus = synth_corpus(cfg.corpus.n_docs, cfg.corpus.n_keywords,
                                cfg.corpus.zipf_exponent, rng);
    data->generating = zipf_probabilities(cfg.corpus.n_keywords, cfg.corpus.zipf_exponent);
  } else {
    data->corpus = read_corpus_cache(cfg.corpus.path);
  }
  if (cfg.trends.kind == TrendKind::Synthetic) {
    Rng rng(derive_seed(cfg.trends.seed, 0, "synthetic_trends"));
    data->trends = synth_trend_table(data->corpus.vocabulary, cfg.trends.n_weeks,
                                     cfg.trends.concentration, cfg.trends.spread, rng);
  } else {
    data->trends = read_trend_table(cfg.trends.path);
  }
  return data;
}

std::shared_ptr<const Dataset> DatasetCache::get(const ExperimentConfig& cfg) {
  const auto kv = cfg.key_values();
  std::string key;
  for (const auto& [k, v] : kv) {
    if (k.starts_with("corpus.") || k.starts_with("trends.")) key += k + "=" + v + ";";
  }
  std::lock_guard lock(mu_);
  auto& slot = cache_[key];
  if (!slot) slot = load_dataset(cfg);
  return slot;
}

RunResult run_once(const ExperimentConfig& cfg, const Dataset& data, std::uint64_t seed,
                   RunTrace* trace) {
  cfg.validate();
  const Corpus& corpus = data.corpus;

  Rng universe_rng = make_rng(cfg.base_seed, seed, "universe");
  const KeywordUniverse universe = build_universe(corpus, cfg.pool_size, cfg.n, universe_rng);
  std::vector<std::string> names;
  names.reserve(universe.size());
  for (KeywordId k : universe.keywords) names.push_back(corpus.vocabulary[k]);

  InvertedIndex index;
  AuxKnowledge aux;
  if (cfg.aux == AuxSource::Split) {
    Rng split_rng = make_rng(cfg.base_seed, seed, "split");
    auto [client, adversary] = split_corpus(corpus, split_rng);
    index = build_index(client, universe);
    aux = compute_aux(adversary, universe, /*with_cooccurrence=*/false);
  } else {
    if (data.generating.size() != corpus.vocabulary.size()) {
      throw std::invalid_argument("generating probabilities are only known for synthetic corpora");
    }
    index = build_index(corpus, universe);
    for (KeywordId k : universe.keywords) aux.volumes.push_back(data.generating[k]);
  }

  const std::size_t weeks = data.trends.n_weeks();
  if (cfg.rho > weeks) throw std::invalid_argument("rho exceeds the trend table length");
  const IntervalRange window{weeks - cfg.rho, weeks};
  const TrendMatrix truth_trends = load_trends(data.trends, names, window);
  const TrendMatrix aux_trends = offset_view(data.trends, names, window, cfg.tau);

  Rng query_rng = make_rng(cfg.base_seed, seed, "queries");
  QueryLog queries = generate_queries(truth_trends, {cfg.eta, cfg.tau}, query_rng);
  if (queries.queries.empty()) throw std::runtime_error("run generated zero queries");

  Rng defense_rng = make_rng(cfg.base_seed, seed, "defense");
  ObservationSequence obs = simulate(queries, index, cfg.defense, defense_rng);
  TagTable tags = tag_observations(obs);

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::uint32_t> keyword_of;
  if (cfg.attack_kind == AttackKind::Sap) {
    keyword_of = sap_attack(tags, aux, aux_trends, cfg.defense, cfg.attack).keyword_of;
  } else {
    keyword_of = liu_attack(tags.freq, aux_trends.freq);
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  RunResult r;
  r.seed = seed;
  r.weighted_accuracy = weighted_accuracy(keyword_of, tags);
  r.unweighted_accuracy = unweighted_accuracy(keyword_of, tags);
  r.overhead_percent = overhead_percent(returned_documents(obs), clean_documents(queries, index));
  r.m = tags.m;
  r.total_queries = static_cast<std::int64_t>(queries.queries.size());
  r.attack_runtime_seconds = elapsed.count();

  if (trace) {
    trace->queries = std::move(queries);
    trace->observations = std::move(obs);
    trace->tags = std::move(tags);
    trace->keyword_of = std::move(keyword_of);
  }
  return r;
}

double weighted_accuracy(std::span<const std::uint32_t> keyword_of, const TagTable& tags) {
  if (keyword_of.size() != tags.m) throw std::invalid_argument("one keyword per tag expected");
  std::int64_t total = 0;
  std::int64_t hit = 0;
  for (std::size_t j = 0; j < tags.m; ++j) {
    total += tags.tag_counts[j];
    if (keyword_of[j] == tags.truth[j]) hit += tags.truth_counts[j];
  }
  if (total == 0) throw std::invalid_argument("accuracy undefined without queries");
  return static_cast<double>(hit) / static_cast<double>(total);
}

double unweighted_accuracy(std::span<const std::uint32_t> keyword_of, const TagTable& tags) {
  if (keyword_of.size() != tags.m) throw std::invalid_argument("one keyword per tag expected");
  if (tags.m == 0) throw std::invalid_argument("accuracy undefined without tags");
  std::size_t hit = 0;
  for (std::size_t j = 0; j < tags.m; ++j) hit += keyword_of[j] == tags.truth[j];
  return static_cast<double>(hit) / static_cast<double>(tags.m);
}

MetricSummary aggregate(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("nothing to aggregate");
  MetricSummary s;
  s.count = values.size();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) {
    // rounding in the sum would otherwise leave a sliver of width
    s.mean = s.ci_low = s.ci_high = *lo;
    return s;
  }
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  const double half = 1.96 * s.sd / std::sqrt(static_cast<double>(s.count));
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

RunSummary aggregate(std::span<const RunResult> results) {
  if (results.empty()) throw std::invalid_argument("nothing to aggregate");
  auto metric = [&](auto field) {
    std::vector<double> v;
    v.reserve(results.size());
    for (const auto& r : results) v.push_back(static_cast<double>(field(r)));
    return aggregate(v);
  };
  RunSummary s;
  s.weighted = metric([](const RunResult& r) { return r.weighted_accuracy; });
  s.unweighted = metric([](const RunResult& r) { return r.unweighted_accuracy; });
  s.overhead = metric([](const RunResult& r) { return r.overhead_percent; });
  s.runtime = metric([](const RunResult& r) { return r.attack_runtime_seconds; });
  s.tags = metric([](const RunResult& r) { return r.m; });
  s.queries = metric([](const RunResult& r) { return r.total_queries; });
  return s;
}

std::string to_json_line(const ResultRecord& rec) {
  const RunResult& r = rec.result;
  json j{{"schema", kResultSchema},
         {"config_hash", rec.config_hash},
         {"seed", r.seed},
         {"weighted_accuracy", r.weighted_accuracy},
         {"unweighted_accuracy", r.unweighted_accuracy},
         {"overhead_percent", r.overhead_percent},
         {"m", r.m},
         {"total_queries", r.total_queries},
         {"attack_runtime_seconds", r.attack_runtime_seconds},
         {"config", rec.config}};
  return j.dump();
}

ResultRecord parse_result_line(const std::string& line) {
  try {
    const auto j = json::parse(line);
    if (j.at("schema").get<int>() != kResultSchema) throw std::runtime_error("unsupported result schema");
    ResultRecord rec;
    rec.config_hash = j.at("config_hash").get<std::string>();
    rec.result.seed = j.at("seed").get<std::uint64_t>();
    rec.result.weighted_accuracy = j.at("weighted_accuracy").get<double>();
    rec.result.unweighted_accuracy = j.at("unweighted_accuracy").get<double>();
    rec.result.overhead_percent = j.at("overhead_percent").get<double>();
    rec.result.m = j.at("m").get<std::size_t>();
    rec.result.total_queries = j.at("total_queries").get<std::int64_t>();
    rec.result.attack_runtime_seconds = j.at("attack_runtime_seconds").get<double>();
    rec.config = j.at("config").get<std::map<std::string, std::string>>();
    return rec;
  } catch (const json::exception& e) {
    throw std::runtime_error(fmt::format("bad result record: {}", e.what()));
  }
}

std::vector<ResultRecord> read_results(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read results {}", path.string()));
  std::vector<ResultRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_result_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  if (out.empty()) throw std::runtime_error(fmt::format("{} holds no result records", path.string()));
  return out;
}

namespace {

// Keeps the well-formed records of an existing results file, rewriting the
// file when a torn or corrupt line has to be dropped.
std::set<std::pair<std::string, std::uint64_t>> existing_records(const fs::path& path,
                                                                 std::ostream& log) {
  std::set<std::pair<std::string, std::uint64_t>> done;
  std::ifstream in(path);
  if (!in) return done;
  std::vector<std::string> keep;
  bool dirty = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto rec = parse_result_line(line);
      done.emplace(rec.config_hash, rec.result.seed);
      keep.push_back(line);
    } catch (const std::exception&) {
      dirty = true;
    }
  }
  in.close();
  if (dirty) {
    log << fmt::format("dropping malformed records from {}\n", path.string());
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      for (const auto& l : keep) out << l << '\n';
    }
    fs::rename(tmp, path);
  }
  return done;
}

}  // namespace

SuiteOutcome run_suite(const std::vector<ExperimentConfig>& configs, std::size_t repetitions,
                       std::size_t jobs, const fs::path& results, std::ostream& log) {
  if (results.has_parent_path()) fs::create_directories(results.parent_path());
  const auto done = existing_records(results, log);

  struct Task {
    std::size_t config;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  std::vector<std::string> hashes;
  SuiteOutcome outcome;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    hashes.push_back(configs[c].hash());
    for (std::uint64_t r = 0; r < repetitions; ++r) {
      if (done.contains({hashes[c], r})) {
        ++outcome.skipped;
      } else {
        tasks.push_back({c, r});
      }
    }
  }

  DatasetCache datasets;
  std::vector<std::shared_ptr<const Dataset>> data(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    try {
      data[c] = datasets.get(configs[c]);
    } catch (const std::exception& e) {
      log << fmt::format("config {}: cannot load data: {}\n", hashes[c], e.what());
    }
  }

  std::ofstream out(results, std::ios::app);
  if (!out) throw std::runtime_error(fmt::format("cannot open results file {}", results.string()));

  const auto n_tasks = static_cast<std::int64_t>(tasks.size());
  std::size_t written = 0;
  std::size_t failed = 0;
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(std::max<std::size_t>(jobs, 1)))
  for (std::int64_t t = 0; t < n_tasks; ++t) {
    const Task task = tasks[t];
    std::string line;
    std::string error;
    try {
      if (!data[task.config]) throw std::runtime_error("dataset unavailable");
      ResultRecord rec{hashes[task.config], run_once(configs[task.config], *data[task.config], task.seed),
                       configs[task.config].key_values()};
      line = to_json_line(rec);
    } catch (const std::exception& e) {
      error = e.what();
    }
#pragma omp critical(sapleak_results_writer)
    {
      if (!error.empty()) {
        ++failed;
        log << fmt::format("config {} seed {}: {}\n", hashes[task.config], task.seed, error);
      } else {
        out << line << '\n';
        out.flush();
        if (out) {
          ++written;
        } else {
          ++failed;
          out.clear();
          log << fmt::format("config {} seed {}: write to {} failed\n", hashes[task.config],
                             task.seed, results.string());
        }
      }
    }
  }
  outcome.written = written;
  outcome.failed = failed;
  return outcome;
}

}  // namespace sapleak
