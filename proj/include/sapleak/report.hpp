#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sapleak/harness.hpp"

namespace sapleak {

enum class Figure { AttackComparison, Clrz, Ppyy, Seal, Alpha, Offset };

Figure parse_figure(std::string_view name);
std::string_view to_string(Figure figure);

struct FigureLayout {
  std::string x_key;
  std::vector<std::string> series_keys;
  std::string defense;  // required defense.kind, empty for any
};

FigureLayout figure_layout(Figure figure);

struct ReportRow {
  std::vector<std::string> series;
  std::string x;
  RunSummary summary;
};

/// Groups matching records by (series, x), sorted numerically where possible.
/// Throws when no record belongs to the figure.
std::vector<ReportRow> build_report(const std::vector<ResultRecord>& records, Figure figure);

void write_report_csv(const std::vector<ReportRow>& rows, Figure figure, std::ostream& out);

}  // namespace sapleak
