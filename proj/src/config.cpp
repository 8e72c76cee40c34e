#include "sapleak/config.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "sapleak/rng.hpp"

namespace sapleak {

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  std::uint64_t out = 0;
  try {
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw ConfigError(fmt::format("key '{}': expected a non-negative integer, got '{}'", key, v));
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw ConfigError(fmt::format("key '{}': expected a number, got '{}'", key, v));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(fmt::format("key '{}': expected true/false, got '{}'", key, v));
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"corpus.kind",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "synthetic") c.corpus.kind = CorpusKind::Synthetic;
         else if (v == "cache") c.corpus.kind = CorpusKind::Cache;
         else throw ConfigError(fmt::format("key '{}': expected synthetic|cache, got '{}'", k, v));
       }},
      {"corpus.path", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.corpus.path = v; }},
      {"corpus.n_docs", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.corpus.n_docs = parse_u64(k, v); }},
      {"corpus.n_keywords", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.corpus.n_keywords = parse_u64(k, v); }},
      {"corpus.zipf_exponent", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.corpus.zipf_exponent = parse_double(k, v); }},
      {"corpus.seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.corpus.seed = parse_u64(k, v); }},
      {"trends.kind",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "synthetic") c.trends.kind = TrendKind::Synthetic;
         else if (v == "file") c.trends.kind = TrendKind::File;
         else throw ConfigError(fmt::format("key '{}': expected synthetic|file, got '{}'", k, v));
       }},
      {"trends.path", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.trends.path = v; }},
      {"trends.n_weeks", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trends.n_weeks = parse_u64(k, v); }},
      {"trends.concentration", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trends.concentration = parse_double(k, v); }},
      {"trends.spread", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trends.spread = parse_double(k, v); }},
      {"trends.seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.trends.seed = parse_u64(k, v); }},
      {"experiment.pool_size", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.pool_size = parse_u64(k, v); }},
      {"experiment.n", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.n = parse_u64(k, v); }},
      {"experiment.rho", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.rho = parse_u64(k, v); }},
      {"experiment.eta", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.eta = parse_double(k, v); }},
      {"experiment.tau", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.tau = parse_u64(k, v); }},
      {"experiment.aux",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "split") c.aux = AuxSource::Split;
         else if (v == "generating") c.aux = AuxSource::Generating;
         else throw ConfigError(fmt::format("key '{}': expected split|generating, got '{}'", k, v));
       }},
      {"defense.kind",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         try {
           c.defense.kind = parse_defense_kind(v);
         } catch (const std::invalid_argument&) {
           throw ConfigError(fmt::format("key '{}': expected none|clrz|ppyy|seal, got '{}'", k, v));
         }
       }},
      {"defense.clrz.tpr", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.defense.clrz.tpr = parse_double(k, v); }},
      {"defense.clrz.fpr", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.defense.clrz.fpr = parse_double(k, v); }},
      {"defense.ppyy.epsilon", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.defense.ppyy.epsilon = parse_double(k, v); }},
      {"defense.seal.oram_exponent",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "auto") c.defense.seal.oram_exponent.reset();
         else c.defense.seal.oram_exponent = static_cast<int>(parse_u64(k, v));
       }},
      {"defense.seal.pad_base", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.defense.seal.pad_base = static_cast<std::int64_t>(parse_u64(k, v)); }},
      {"attack.kind",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "sap") c.attack_kind = AttackKind::Sap;
         else if (v == "liu") c.attack_kind = AttackKind::Liu;
         else throw ConfigError(fmt::format("key '{}': expected sap|liu, got '{}'", k, v));
       }},
      {"attack.alpha", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.attack.alpha = parse_double(k, v); }},
      {"attack.defense_aware", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.attack.defense_aware = parse_bool(k, v); }},
      {"attack.p_min", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.attack.p_min = parse_double(k, v); }},
      {"attack.v_clamp", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.attack.v_clamp = parse_double(k, v); }},
      {"attack.tail_mass", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.attack.tail_mass = parse_double(k, v); }},
      {"base_seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.base_seed = parse_u64(k, v); }},
  };
  return table;
}

}  // namespace

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError(fmt::format("unknown config key '{}'", key));
  it->second(cfg, key, value);
}

std::vector<std::string> experiment_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, s] : setters()) keys.push_back(k);
  return keys;
}

void ExperimentConfig::validate() const {
  if (n == 0) throw ConfigError("experiment.n must be at least 1");
  if (n > pool_size) throw ConfigError(fmt::format("experiment.n ({}) exceeds pool_size ({})", n, pool_size));
  if (rho == 0) throw ConfigError("experiment.rho must be at least 1");
  if (!(eta > 0.0)) throw ConfigError("experiment.eta must be positive");
  if (corpus.kind == CorpusKind::Cache && corpus.path.empty()) throw ConfigError("corpus.path is required for cache corpora");
  if (trends.kind == TrendKind::File && trends.path.empty()) throw ConfigError("trends.path is required for file trends");
  if (corpus.kind == CorpusKind::Synthetic) {
    if (corpus.n_docs == 0 || corpus.n_keywords == 0) throw ConfigError("synthetic corpus needs n_docs, n_keywords >= 1");
    if (pool_size > corpus.n_keywords) {
      throw ConfigError(fmt::format("experiment.pool_size ({}) exceeds corpus.n_keywords ({})", pool_size, corpus.n_keywords));
    }
  }
  if (trends.kind == TrendKind::Synthetic) {
    if (!(trends.concentration > 0.0)) throw ConfigError("trends.concentration must be positive");
    if (!(trends.spread >= 0.0)) throw ConfigError("trends.spread must be non-negative");
  }
  if (aux == AuxSource::Generating && corpus.kind != CorpusKind::Synthetic) {
    throw ConfigError("experiment.aux=generating needs a synthetic corpus");
  }
  if (trends.kind == TrendKind::Synthetic && rho + tau > trends.n_weeks) {
    throw ConfigError(fmt::format("rho + tau ({}) exceeds trends.n_weeks ({})", rho + tau, trends.n_weeks));
  }
  try {
    defense.validate();
    attack.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::map<std::string, std::string> ExperimentConfig::key_values() const {
  std::map<std::string, std::string> kv;
  kv["corpus.kind"] = corpus.kind == CorpusKind::Synthetic ? "synthetic" : "cache";
  kv["corpus.path"] = corpus.path;
  kv["corpus.n_docs"] = fmt::format("{}", corpus.n_docs);
  kv["corpus.n_keywords"] = fmt::format("{}", corpus.n_keywords);
  kv["corpus.zipf_exponent"] = fmt_double(corpus.zipf_exponent);
  kv["corpus.seed"] = fmt::format("{}", corpus.seed);
  kv["trends.kind"] = trends.kind == TrendKind::Synthetic ? "synthetic" : "file";
  kv["trends.path"] = trends.path;
  kv["trends.n_weeks"] = fmt::format("{}", trends.n_weeks);
  kv["trends.concentration"] = fmt_double(trends.concentration);
  kv["trends.spread"] = fmt_double(trends.spread);
  kv["trends.seed"] = fmt::format("{}", trends.seed);
  kv["experiment.pool_size"] = fmt::format("{}", pool_size);
  kv["experiment.n"] = fmt::format("{}", n);
  kv["experiment.rho"] = fmt::format("{}", rho);
  kv["experiment.eta"] = fmt_double(eta);
  kv["experiment.tau"] = fmt::format("{}", tau);
  kv["experiment.aux"] = aux == AuxSource::Split ? "split" : "generating";
  kv["defense.kind"] = std::string(to_string(defense.kind));
  kv["defense.clrz.tpr"] = fmt_double(defense.clrz.tpr);
  kv["defense.clrz.fpr"] = fmt_double(defense.clrz.fpr);
  kv["defense.ppyy.epsilon"] = fmt_double(defense.ppyy.epsilon);
  kv["defense.seal.oram_exponent"] =
      defense.seal.oram_exponent ? fmt::format("{}", *defense.seal.oram_exponent) : "auto";
  kv["defense.seal.pad_base"] = fmt::format("{}", defense.seal.pad_base);
  kv["attack.kind"] = attack_kind == AttackKind::Sap ? "sap" : "liu";
  kv["attack.alpha"] = fmt_double(attack.alpha);
  kv["attack.defense_aware"] = attack.defense_aware ? "true" : "false";
  kv["attack.p_min"] = fmt_double(attack.p_min);
  kv["attack.v_clamp"] = fmt_double(attack.v_clamp);
  kv["attack.tail_mass"] = fmt_double(attack.tail_mass);
  kv["base_seed"] = fmt::format("{}", base_seed);
  return kv;
}

std::string ExperimentConfig::hash() const {
  std::string canon;
  for (const auto& [k, v] : key_values()) canon += k + "=" + v + "\n";
  return fmt::format("{:016x}", fnv1a64(canon));
}

std::vector<ExperimentConfig> SuiteConfig::expand() const {
  ExperimentConfig base_cfg;
  base_cfg.base_seed = base_seed;
  for (const auto& [k, v] : base) apply_setting(base_cfg, k, v);

  std::vector<ExperimentConfig> out{base_cfg};
  for (const auto& [key, values] : grid) {
    std::vector<ExperimentConfig> next;
    for (const auto& cfg : out) {
      for (const auto& v : values) {
        auto c = cfg;
        apply_setting(c, key, v);
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  for (const auto& c : out) c.validate();
  return out;
}

namespace {

std::string where(std::string_view source, const YAML::Node& node) {
  return fmt::format("{}:{}", source, node.Mark().line + 1);
}

std::string scalar(std::string_view source, const std::string& key, const YAML::Node& node) {
  if (!node.IsScalar()) {
    throw ConfigError(fmt::format("{}: key '{}' must be a scalar", where(source, node), key));
  }
  return node.as<std::string>();
}

void flatten(std::string_view source, const std::string& prefix, const YAML::Node& node,
             std::vector<std::pair<std::string, std::string>>& out) {
  for (const auto& item : node) {
    const std::string key = prefix + "." + item.first.as<std::string>();
    if (item.second.IsMap()) {
      flatten(source, key, item.second, out);
    } else {
      ExperimentConfig scratch;
      try {
        apply_setting(scratch, key, scalar(source, key, item.second));
      } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", where(source, item.first), e.what()));
      }
      out.emplace_back(key, item.second.as<std::string>());
    }
  }
}

std::map<std::string, std::string> section(std::string_view source, const std::string& name,
                                           const YAML::Node& node,
                                           const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(fmt::format("{}: '{}' must be a map", where(source, node), name));
  std::map<std::string, std::string> out;
  for (const auto& item : node) {
    const auto key = item.first.as<std::string>();
    if (!allowed.contains(key)) {
      throw ConfigError(fmt::format("{}: unknown config key '{}.{}'", where(source, item.first), name, key));
    }
    out[key] = scalar(source, name + "." + key, item.second);
  }
  return out;
}

}  // namespace

SuiteConfig parse_suite_config(std::string_view yaml_text, std::string_view source_name) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("{}:{}: {}", source_name, e.mark.line + 1, e.msg));
  }
  SuiteConfig suite;
  if (root.IsNull()) return suite;
  if (!root.IsMap()) throw ConfigError(fmt::format("{}: top level must be a map", source_name));

  static const std::set<std::string> kSections = {"corpus", "trends", "experiment", "defense", "attack"};
  for (const auto& item : root) {
    const auto key = item.first.as<std::string>();
    const YAML::Node& val = item.second;
    if (key == "name") {
      suite.name = scalar(source_name, key, val);
    } else if (key == "base_seed") {
      suite.base_seed = parse_u64(key, scalar(source_name, key, val));
    } else if (key == "repetitions") {
      suite.repetitions = parse_u64(key, scalar(source_name, key, val));
      if (suite.repetitions == 0) throw ConfigError(fmt::format("{}: repetitions must be >= 1", where(source_name, val)));
    } else if (key == "jobs") {
      suite.jobs = parse_u64(key, scalar(source_name, key, val));
    } else if (key == "results") {
      suite.results = scalar(source_name, key, val);
    } else if (kSections.contains(key)) {
      if (!val.IsMap()) throw ConfigError(fmt::format("{}: '{}' must be a map", where(source_name, val), key));
      flatten(source_name, key, val, suite.base);
    } else if (key == "grid") {
      if (!val.IsMap()) throw ConfigError(fmt::format("{}: 'grid' must be a map", where(source_name, val)));
      for (const auto& axis : val) {
        const auto axis_key = axis.first.as<std::string>();
        if (!axis.second.IsSequence() || axis.second.size() == 0) {
          throw ConfigError(fmt::format("{}: grid axis '{}' must be a non-empty list", where(source_name, axis.first), axis_key));
        }
        std::vector<std::string> values;
        for (const auto& v : axis.second) {
          ExperimentConfig scratch;
          try {
            apply_setting(scratch, axis_key, scalar(source_name, axis_key, v));
          } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{}: {}", where(source_name, v), e.what()));
          }
          values.push_back(v.as<std::string>());
        }
        suite.grid.emplace_back(axis_key, std::move(values));
      }
    } else if (key == "ingest") {
      suite.ingest = section(source_name, key, val, {"input", "dictionary", "stopwords", "output"});
    } else if (key == "report") {
      suite.report = section(source_name, key, val, {"results", "figure", "output"});
    } else if (key == "trend_table") {
      suite.trend_table = section(source_name, key, val,
                                  {"input", "output", "cache", "keywords", "weeks", "concentration", "spread", "seed"});
    } else {
      throw ConfigError(fmt::format("{}: unknown config key '{}'", where(source_name, item.first), key));
    }
  }
  return suite;
}

SuiteConfig load_suite_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_suite_config(ss.str(), path.string());
}

}  // namespace sapleak
