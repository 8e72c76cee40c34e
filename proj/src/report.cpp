#include "sapleak/report.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace sapleak {

namespace {

struct FigureName {
  Figure figure;
  std::string_view name;
};

constexpr FigureName kFigures[] = {
    {Figure::AttackComparison, "attcomp"}, {Figure::Clrz, "clrz"},   {Figure::Ppyy, "ppyy"},
    {Figure::Seal, "seal"},                {Figure::Alpha, "alpha"}, {Figure::Offset, "offset"},
};

// Numbers sort by value and before any non-numeric text.
bool value_less(const std::string& a, const std::string& b) {
  double x = 0.0;
  double y = 0.0;
  const auto ra = std::from_chars(a.data(), a.data() + a.size(), x);
  const auto rb = std::from_chars(b.data(), b.data() + b.size(), y);
  const bool na = ra.ec == std::errc{} && ra.ptr == a.data() + a.size();
  const bool nb = rb.ec == std::errc{} && rb.ptr == b.data() + b.size();
  if (na && nb && x != y) return x < y;
  if (na != nb) return na;
  return a < b;
}

bool keys_less(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (value_less(a[i], b[i])) return true;
    if (value_less(b[i], a[i])) return false;
  }
  return a.size() < b.size();
}

std::string lookup(const ResultRecord& rec, const std::string& key) {
  const auto it = rec.config.find(key);
  if (it == rec.config.end()) throw std::runtime_error(fmt::format("result record lacks '{}'", key));
  return it->second;
}

}  // namespace

Figure parse_figure(std::string_view name) {
  for (const auto& f : kFigures) {
    if (f.name == name) return f.figure;
  }
  throw std::invalid_argument(fmt::format("unknown figure '{}'", name));
}

std::string_view to_string(Figure figure) {
  for (const auto& f : kFigures) {
    if (f.figure == figure) return f.name;
  }
  return "?";
}

FigureLayout figure_layout(Figure figure) {
  switch (figure) {
    case Figure::AttackComparison:
      return {"experiment.n", {"attack.kind", "attack.alpha", "defense.kind"}, ""};
    case Figure::Clrz:
      return {"defense.clrz.fpr", {"experiment.n", "attack.defense_aware", "defense.clrz.tpr"}, "clrz"};
    case Figure::Ppyy:
      return {"defense.ppyy.epsilon", {"experiment.n", "attack.defense_aware"}, "ppyy"};
    case Figure::Seal:
      return {"defense.seal.pad_base",
              {"experiment.n", "attack.defense_aware", "defense.seal.oram_exponent"},
              "seal"};
    case Figure::Alpha:
      return {"attack.alpha", {"experiment.n", "attack.kind"}, ""};
    case Figure::Offset:
      return {"experiment.tau", {"experiment.n", "experiment.eta", "attack.kind"}, ""};
  }
  throw std::logic_error("unhandled figure");
}

std::vector<ReportRow> build_report(const std::vector<ResultRecord>& records, Figure figure) {
  const FigureLayout layout = figure_layout(figure);
  std::vector<std::pair<std::vector<std::string>, std::vector<RunResult>>> groups;
  std::map<std::vector<std::string>, std::size_t> slot;
  for (const auto& rec : records) {
    if (!layout.defense.empty() && lookup(rec, "defense.kind") != layout.defense) continue;
    std::vector<std::string> key;
    for (const auto& k : layout.series_keys) key.push_back(lookup(rec, k));
    key.push_back(lookup(rec, layout.x_key));
    auto [it, fresh] = slot.try_emplace(key, groups.size());
    if (fresh) groups.emplace_back(key, std::vector<RunResult>{});
    groups[it->second].second.push_back(rec.result);
  }
  if (groups.empty()) {
    throw std::runtime_error(fmt::format("no results match figure '{}'", to_string(figure)));
  }
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return keys_less(a.first, b.first); });

  std::vector<ReportRow> rows;
  for (auto& [key, results] : groups) {
    // Seeds in a stable order so the sums below are reproducible byte for byte.
    std::sort(results.begin(), results.end(),
              [](const RunResult& a, const RunResult& b) { return a.seed < b.seed; });
    ReportRow row;
    row.x = key.back();
    row.series.assign(key.begin(), key.end() - 1);
    row.summary = aggregate(results);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_report_csv(const std::vector<ReportRow>& rows, Figure figure, std::ostream& out) {
  const FigureLayout layout = figure_layout(figure);
  out << "figure";
  for (const auto& k : layout.series_keys) out << ',' << k;
  out << ',' << layout.x_key
      << ",runs,mean,ci_low,ci_high,unweighted_mean,unweighted_ci_low,unweighted_ci_high,"
         "overhead,mean_tags,mean_queries,runtime_seconds\n";
  for (const auto& row : rows) {
    const RunSummary& s = row.summary;
    out << to_string(figure);
    for (const auto& v : row.series) out << ',' << v;
    out << ',' << row.x;
    out << fmt::format(",{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.4f},{:.2f},{:.2f},{:.6f}\n",
                       s.weighted.count, s.weighted.mean, s.weighted.ci_low, s.weighted.ci_high,
                       s.unweighted.mean, s.unweighted.ci_low, s.unweighted.ci_high,
                       s.overhead.mean, s.tags.mean, s.queries.mean, s.runtime.mean);
  }
}

}  // namespace sapleak
