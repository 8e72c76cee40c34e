#include "sapleak/io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace sapleak {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string_view pattern_kind_name(PatternKind k) {
  switch (k) {
    case PatternKind::DocIds: return "docs";
    case PatternKind::Token: return "token";
    case PatternKind::Blocks: return "blocks";
  }
  return "?";
}

PatternKind parse_pattern_kind(const std::string& s) {
  if (s == "docs") return PatternKind::DocIds;
  if (s == "token") return PatternKind::Token;
  if (s == "blocks") return PatternKind::Blocks;
  throw std::runtime_error(fmt::format("unknown pattern kind '{}'", s));
}

}  // namespace

void write_corpus_cache(const Corpus& corpus, std::ostream& out) {
  out << json{{"schema", kCacheSchema}, {"vocabulary", corpus.vocabulary}}.dump() << '\n';
  for (const auto& doc : corpus.documents) {
    out << json{{"id", doc.id}, {"keywords", doc.keywords}}.dump() << '\n';
  }
}

void write_corpus_cache(const Corpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  write_corpus_cache(corpus, out);
  if (!out) throw std::runtime_error(fmt::format("write failed for {}", path.string()));
}

Corpus read_corpus_cache(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto rec = json::parse(line);
      if (!have_header) {
        if (rec.at("schema").get<int>() != kCacheSchema) {
          throw std::runtime_error("unsupported corpus cache schema");
        }
        corpus.vocabulary = rec.at("vocabulary").get<std::vector<std::string>>();
        have_header = true;
        continue;
      }
      Document doc{rec.at("id").get<std::uint64_t>(),
                   rec.at("keywords").get<std::vector<KeywordId>>()};
      for (KeywordId k : doc.keywords) {
        if (k >= corpus.vocabulary.size()) throw std::runtime_error("keyword index out of range");
      }
      corpus.documents.push_back(std::move(doc));
    } catch (const json::exception& e) {
      throw std::runtime_error(fmt::format("corpus cache line {}: {}", line_no, e.what()));
    }
  }
  if (!have_header) throw std::runtime_error("corpus cache has no header");
  return corpus;
}

Corpus read_corpus_cache(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  return read_corpus_cache(in);
}

void write_trend_table(const TrendTable& table, std::ostream& out) {
  out << "keyword";
  for (const auto& w : table.week_labels) out << ',' << w;
  out << '\n';
  for (std::size_t i = 0; i < table.keywords.size(); ++i) {
    out << table.keywords[i];
    for (std::size_t k = 0; k < table.n_weeks(); ++k) out << ',' << fmt::format("{}", table.popularity(i, k));
    out << '\n';
  }
}

TrendTable read_trend_table(std::istream& in) {
  TrendTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trend table is empty");
  auto header = split_csv(line);
  if (header.size() < 2) throw std::runtime_error("trend table header has no weeks");
  table.week_labels.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error(fmt::format("trend table line {}: expected {} fields, got {}",
                                           line_no, header.size(), cells.size()));
    }
    table.keywords.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      try {
        row.push_back(std::stod(cells[c]));
      } catch (const std::exception&) {
        throw std::runtime_error(
            fmt::format("trend table line {}: bad number '{}'", line_no, cells[c]));
      }
    }
    rows.push_back(std::move(row));
  }
  table.popularity = Matrix(rows.size(), table.week_labels.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) table.popularity(i, k) = rows[i][k];
  }
  table.rebuild_lookup();
  return table;
}

TrendTable read_trend_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  return read_trend_table(in);
}

void write_query_log(const QueryLog& log, std::ostream& out) {
  for (const auto& q : log.queries) out << q.interval << ',' << q.keyword << '\n';
}

QueryLog read_query_log(std::istream& in, std::size_t n_intervals) {
  QueryLog log;
  log.n_intervals = n_intervals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != 2) throw std::runtime_error(fmt::format("bad query record '{}'", line));
    QueryRecord q{static_cast<std::uint32_t>(std::stoul(cells[0])),
                  static_cast<std::uint32_t>(std::stoul(cells[1]))};
    if (q.interval >= n_intervals) throw std::runtime_error("query interval out of range");
    log.queries.push_back(q);
  }
  return log;
}

void write_observations(const ObservationSequence& obs, std::ostream& out) {
  out << json{{"n_docs", obs.n_docs}, {"n_intervals", obs.n_intervals},
              {"ppyy_loss_events", obs.ppyy_loss_events}}.dump()
      << '\n';
  for (const auto& rec : obs.records) {
    const auto& p = *rec.pattern;
    out << json{{"interval", rec.interval}, {"kind", pattern_kind_name(p.kind)},
                {"ids", p.ids}, {"token", p.token}, {"volume", p.volume},
                {"keyword", rec.keyword}}.dump()
        << '\n';
  }
}

ObservationSequence read_observations(std::istream& in) {
  ObservationSequence obs;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("observation stream is empty");
  const auto header = json::parse(line);
  obs.n_docs = header.at("n_docs").get<std::size_t>();
  obs.n_intervals = header.at("n_intervals").get<std::size_t>();
  obs.ppyy_loss_events = header.value("ppyy_loss_events", std::size_t{0});
  // identical records share one pattern object, as they do after simulate()
  std::map<std::pair<std::uint32_t, std::uint64_t>, std::shared_ptr<const AccessPattern>> shared;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto rec = json::parse(line);
    AccessPattern p;
    p.kind = parse_pattern_kind(rec.at("kind").get<std::string>());
    p.ids = rec.at("ids").get<std::vector<std::uint32_t>>();
    p.token = rec.at("token").get<std::uint64_t>();
    p.volume = rec.at("volume").get<std::int64_t>();
    const auto kw = rec.at("keyword").get<std::uint32_t>();
    auto& slot = shared[{kw, hash_pattern(p)}];
    if (!slot || !(*slot == p)) slot = std::make_shared<const AccessPattern>(std::move(p));
    obs.records.push_back({rec.at("interval").get<std::uint32_t>(), slot, kw});
  }
  return obs;
}

void write_tag_table(const TagTable& tags, std::ostream& out) {
  out << json{{"m", tags.m}, {"n_docs", tags.n_docs}, {"n_intervals", tags.n_intervals},
              {"counts", tags.counts}, {"has_cooccurrence", tags.cooccurrence.has_value()}}.dump()
      << '\n';
  for (std::size_t j = 0; j < tags.m; ++j) {
    json rec{{"tag", j},
             {"raw_volume", tags.raw_volumes[j]},
             {"volume", tags.volumes[j]},
             {"count", tags.tag_counts[j]},
             {"truth", tags.truth[j]},
             {"freq", std::vector<double>(tags.freq.row(j).begin(), tags.freq.row(j).end())}};
    if (tags.cooccurrence) {
      const auto row = tags.cooccurrence->row(j);
      rec["cooccurrence"] = std::vector<double>(row.begin(), row.end());
    }
    out << rec.dump() << '\n';
  }
}

void write_cost_matrix(const CostMatrix& cost, std::ostream& out) {
  for (std::size_t i = 0; i < cost.values.rows(); ++i) {
    for (std::size_t j = 0; j < cost.values.cols(); ++j) {
      if (j) out << ' ';
      out << fmt::format("{}", cost.values(i, j));
    }
    out << '\n';
  }
}

CostMatrix read_cost_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged cost matrix");
    }
    rows.push_back(std::move(row));
  }
  CostMatrix cost{Matrix(rows.size(), rows.empty() ? 0 : rows.front().size())};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) cost.values(i, j) = rows[i][j];
  }
  return cost;
}

void write_assignment(std::span<const std::uint32_t> keyword_of, std::ostream& out) {
  for (std::size_t j = 0; j < keyword_of.size(); ++j) out << j << ',' << keyword_of[j] << '\n';
}

}  // namespace sapleak
