#pragma once

// CSV and JSON writers for indicator tables, rank comparisons and yearly
// series, plus the run manifest. CSV is canonical; JSON carries the same
// columns and the same (rounded) values.

#include <charconv>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "noai/analysis.hpp"
#include "noai/csv.hpp"
#include "noai/engine.hpp"
#include "noai/ingest.hpp"
#include "noai/model.hpp"

namespace noai::report {

enum class Format { Csv, Json };

inline std::optional<Format> parse_format(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  return std::nullopt;
}

/// Fixed-point text with '.' as separator regardless of locale.
inline std::string fixed(double v, int decimals) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  std::string s(buf, res.ptr);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

/// A cell is either text, a rounded number or missing.
struct Cell {
  enum class Kind { Text, Number, Integer, Missing } kind = Kind::Missing;
  std::string text;

  static Cell str(std::string s) { return {Kind::Text, std::move(s)}; }
  static Cell num(std::optional<double> v, int decimals) {
    if (!v) return {};
    return {Kind::Number, fixed(*v, decimals)};
  }
  static Cell integer(std::size_t v) { return {Kind::Integer, std::to_string(v)}; }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, nlohmann::ordered_json>> summary;  // trailing notes
};

inline void write_csv(std::ostream& out, const Table& t) {
  out << csv::join(t.columns) << '\n';
  for (const auto& row : t.rows) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (const auto& c : row) cells.push_back(c.kind == Cell::Kind::Missing ? "" : c.text);
    out << csv::join(cells) << '\n';
  }
  for (const auto& [key, value] : t.summary) {
    out << "# " << key << ',' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  }
}

inline nlohmann::ordered_json to_json(const Table& t) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      const auto& c = row[i];
      switch (c.kind) {
        case Cell::Kind::Text: obj[t.columns[i]] = c.text; break;
        case Cell::Kind::Number: obj[t.columns[i]] = std::stod(c.text); break;
        case Cell::Kind::Integer: obj[t.columns[i]] = std::stoll(c.text); break;
        case Cell::Kind::Missing: obj[t.columns[i]] = nullptr; break;
      }
    }
    rows.push_back(std::move(obj));
  }
  nlohmann::ordered_json doc;
  doc["columns"] = t.columns;
  doc["rows"] = std::move(rows);
  if (!t.summary.empty()) {
    nlohmann::ordered_json s = nlohmann::ordered_json::object();
    for (const auto& [key, value] : t.summary) s[key] = value;
    doc["summary"] = std::move(s);
  }
  return doc;
}

inline void write(std::ostream& out, const Table& t, Format f) {
  if (f == Format::Csv) {
    write_csv(out, t);
  } else {
    out << to_json(t).dump(2) << '\n';
  }
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& indicator_columns() {
  static const std::vector<std::string> cols{
      "actor",          "display_name",     "x_total",           "oa_share",
      "noai_subject_category", "noai_ost_discipline", "oa_gold_share", "oa_bronze_share",
      "oa_green_share", "n_oa_whole"};
  return cols;
}

/// Per-actor indicator table. `with_erc` appends a noai_erc_subfield column.
inline Table indicator_table(const IndicatorTable& t, int decimals = 2, bool with_erc = false) {
  Table out;
  out.columns = indicator_columns();
  if (with_erc) out.columns.emplace_back("noai_erc_subfield");
  for (const auto& r : t.rows) {
    std::vector<Cell> row{
        Cell::str(r.actor),
        Cell::str(r.display_name),
        Cell::num(r.x_total, decimals),
        Cell::num(r.oa_share, decimals),
        Cell::num(r.noai_at(Level::SubjectCategory), decimals),
        Cell::num(r.noai_at(Level::OstDiscipline), decimals),
        Cell::num(r.oa_share ? std::optional<double>(r.gold_share) : std::nullopt, decimals),
        Cell::num(r.oa_share ? std::optional<double>(r.bronze_share) : std::nullopt, decimals),
        Cell::num(r.oa_share ? std::optional<double>(r.green_share) : std::nullopt, decimals),
        Cell::integer(r.n_oa_whole),
    };
    if (with_erc) row.push_back(Cell::num(r.noai_at(Level::ErcSubfield), decimals));
    out.rows.push_back(std::move(row));
  }
  return out;
}

struct LevelComparison {
  Level level;
  RankTable share_ranks;
  RankTable noai_ranks;
  std::vector<RankShift> shifts;
  double rho = 0.0;
};

/// Per-actor share rank, NOAI rank and shift at each compared level, with
/// Spearman rho per level as summary entries. Shift sign: noai_rank minus
/// share_rank.
inline Table comparison_table(const IndicatorTable& t, const std::vector<LevelComparison>& levels,
                              int decimals = 2) {
  Table out;
  out.columns = {"actor", "display_name", "x_total", "oa_share", "n_oa_whole", "oa_fractional",
                 "share_rank"};
  for (const auto& lc : levels) {
    const std::string suffix(to_string(noai_metric(lc.level)));
    out.columns.push_back(suffix);
    out.columns.push_back(suffix + "_rank");
    out.columns.push_back(suffix + "_delta");
  }
  if (levels.empty()) return out;
  for (const auto& sr : levels.front().share_ranks.rows) {
    const IndicatorRow* row = nullptr;
    for (const auto& r : t.rows) {
      if (r.actor == sr.actor) {
        row = &r;
        break;
      }
    }
    if (row == nullptr) continue;
    std::vector<Cell> cells{Cell::str(row->actor),
                            Cell::str(row->display_name),
                            Cell::num(row->x_total, decimals),
                            Cell::num(row->oa_share, decimals),
                            Cell::integer(row->n_oa_whole),
                            Cell::num(row->oa_total, decimals),
                            Cell::integer(static_cast<std::size_t>(sr.display_rank))};
    for (const auto& lc : levels) {
      cells.push_back(Cell::num(row->noai_at(lc.level), decimals));
      const RankShift* shift = nullptr;
      for (const auto& s : lc.shifts) {
        if (s.actor == row->actor) shift = &s;
      }
      cells.push_back(shift ? Cell::integer(static_cast<std::size_t>(shift->noai_rank)) : Cell{});
      cells.push_back(shift ? Cell{Cell::Kind::Integer, std::to_string(shift->delta)} : Cell{});
    }
    out.rows.push_back(std::move(cells));
  }
  for (const auto& lc : levels) {
    out.summary.emplace_back("spearman_rho_" + std::string(to_string(lc.level)),
                             std::stod(fixed(lc.rho, 6)));
  }
  out.summary.emplace_back("rank_order", levels.front().share_ranks.convention ==
                                                 RankConvention::Ascending
                                             ? "ascending: rank 1 = lowest value"
                                             : "descending: rank 1 = highest value");
  out.summary.emplace_back("delta", "noai_rank - share_rank");
  return out;
}

inline Table series_table(const Series& s, int decimals = 2) {
  Table out;
  out.columns = {"year", "total_share", "gold", "bronze", "green"};
  for (const auto& f : s.fields) out.columns.push_back(f);
  for (const auto& r : s.rows) {
    std::vector<Cell> cells{Cell{Cell::Kind::Integer, std::to_string(r.year)},
                            Cell::num(r.total, decimals), Cell::num(r.gold, decimals),
                            Cell::num(r.bronze, decimals), Cell::num(r.green, decimals)};
    for (const auto& v : r.field_share) cells.push_back(Cell::num(v, decimals));
    out.rows.push_back(std::move(cells));
  }
  return out;
}

inline Table diagnostics_table(const std::vector<Diagnostic>& diags) {
  Table out;
  out.columns = {"record_id", "unknown_categories"};
  for (const auto& d : diags) {
    std::string joined;
    for (std::size_t i = 0; i < d.unknown_categories.size(); ++i) {
      if (i) joined += ';';
      joined += d.unknown_categories[i];
    }
    out.rows.push_back({Cell::str(d.record_id), Cell::str(joined)});
  }
  return out;
}

inline nlohmann::ordered_json stats_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  j["records_read"] = s.records_read;
  j["records_accepted"] = s.records_accepted;
  j["records_rejected"] = s.records_rejected;
  nlohmann::ordered_json reasons = nlohmann::ordered_json::object();
  for (const auto& [k, v] : s.rejection_reasons) reasons[k] = v;
  j["rejection_reasons"] = std::move(reasons);
  if (s.year_range) {
    j["year_range"] = {s.year_range->first, s.year_range->last};
  } else {
    j["year_range"] = nullptr;
  }
  return j;
}

}  // namespace noai::report
