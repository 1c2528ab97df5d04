#pragma once

// Rankings over an indicator table, rank shifts between two rankings,
// tie-aware Spearman correlation and actor filters.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "noai/engine.hpp"
#include "noai/error.hpp"
#include "noai/model.hpp"

namespace noai {

enum class Metric { XTotal, OaShare, NoaiSubjectCategory, NoaiOstDiscipline, NoaiErcSubfield };

inline Metric noai_metric(Level level) {
  switch (level) {
    case Level::SubjectCategory: return Metric::NoaiSubjectCategory;
    case Level::OstDiscipline: return Metric::NoaiOstDiscipline;
    case Level::ErcSubfield: return Metric::NoaiErcSubfield;
  }
  return Metric::NoaiOstDiscipline;
}

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::XTotal: return "x_total";
    case Metric::OaShare: return "oa_share";
    case Metric::NoaiSubjectCategory: return "noai_subject_category";
    case Metric::NoaiOstDiscipline: return "noai_ost_discipline";
    case Metric::NoaiErcSubfield: return "noai_erc_subfield";
  }
  return "oa_share";
}

inline std::optional<double> metric_value(const IndicatorRow& row, Metric m) {
  switch (m) {
    case Metric::XTotal: return row.x_total;
    case Metric::OaShare: return row.oa_share;
    case Metric::NoaiSubjectCategory: return row.noai_at(Level::SubjectCategory);
    case Metric::NoaiOstDiscipline: return row.noai_at(Level::OstDiscipline);
    case Metric::NoaiErcSubfield: return row.noai_at(Level::ErcSubfield);
  }
  return std::nullopt;
}

/// Ascending: rank 1 is the lowest value (least open). Descending: rank 1 is
/// the highest.
enum class RankConvention { Ascending, Descending };

struct RankRow {
  std::string actor;
  double value = 0.0;
  int display_rank = 0;       // competition ranking, ties share the minimum
  double average_rank = 0.0;  // ties share the mean of their positions
};

struct RankTable {
  Metric metric = Metric::OaShare;
  RankConvention convention = RankConvention::Ascending;
  std::vector<RankRow> rows;          // in rank order, ties by actor id
  std::vector<std::string> excluded;  // actors whose metric is undefined

  const RankRow* find(std::string_view actor) const {
    for (const auto& r : rows) {
      if (r.actor == actor) return &r;
    }
    return nullptr;
  }
};

/// Ranks plain (actor, value) pairs.
inline RankTable rank_values(std::vector<std::pair<std::string, double>> values,
                             RankConvention convention = RankConvention::Ascending) {
  if (values.empty()) throw EmptyTable("nothing to rank");
  std::sort(values.begin(), values.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) {
      return convention == RankConvention::Ascending ? a.second < b.second : a.second > b.second;
    }
    return a.first < b.first;
  });
  RankTable t;
  t.convention = convention;
  t.rows.reserve(values.size());
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j + 1 < values.size() && values[j + 1].second == values[i].second) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      t.rows.push_back({values[k].first, values[k].second, static_cast<int>(i + 1), avg});
    }
    i = j + 1;
  }
  return t;
}

inline RankTable rank(const IndicatorTable& table, Metric metric,
                      RankConvention convention = RankConvention::Ascending) {
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::string> excluded;
  for (const auto& row : table.rows) {
    auto v = metric_value(row, metric);
    if (v && std::isfinite(*v)) {
      values.emplace_back(row.actor, *v);
    } else {
      excluded.push_back(row.actor);
    }
  }
  if (values.empty()) {
    throw EmptyTable("no actor has a defined " + std::string(to_string(metric)));
  }
  auto t = rank_values(std::move(values), convention);
  t.metric = metric;
  t.excluded = std::move(excluded);
  return t;
}

namespace detail {

/// Average ranks of `b` aligned to the actor order of `a`.
inline std::vector<double> aligned_ranks(const RankTable& a, const RankTable& b) {
  if (a.rows.size() != b.rows.size()) {
    throw MismatchedActorSets("rank tables cover " + std::to_string(a.rows.size()) + " and " +
                              std::to_string(b.rows.size()) + " actors");
  }
  std::unordered_map<std::string_view, double> lookup;
  for (const auto& r : b.rows) lookup.emplace(r.actor, r.average_rank);
  std::vector<double> out;
  out.reserve(a.rows.size());
  for (const auto& r : a.rows) {
    auto it = lookup.find(r.actor);
    if (it == lookup.end()) {
      throw MismatchedActorSets("actor '" + r.actor + "' missing from second ranking");
    }
    out.push_back(it->second);
  }
  return out;
}

}  // namespace detail

/// Spearman's rho as the Pearson correlation of average ranks, which handles
/// ties.
inline double spearman(const RankTable& a, const RankTable& b) {
  const auto rb = detail::aligned_ranks(a, b);
  const auto n = a.rows.size();
  if (n < 2) throw DegenerateInput("Spearman correlation needs at least two actors");
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a.rows[i].average_rank;
    mb += rb[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a.rows[i].average_rank - ma;
    const double db = rb[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateInput("zero rank variance");
  const double rho = sab / std::sqrt(saa * sbb);
  return std::clamp(rho, -1.0, 1.0);
}

struct RankShift {
  std::string actor;
  int share_rank = 0;
  int noai_rank = 0;
  int delta = 0;  // noai_rank - share_rank
};

/// Per-actor change of display rank. Under the ascending convention a
/// positive delta means the actor moves toward the open end once
/// normalized.
inline std::vector<RankShift> rank_shift(const RankTable& share_ranks, const RankTable& noai_ranks) {
  if (share_ranks.rows.size() != noai_ranks.rows.size()) {
    throw MismatchedActorSets("rank tables cover different numbers of actors");
  }
  std::unordered_map<std::string_view, int> lookup;
  for (const auto& r : noai_ranks.rows) lookup.emplace(r.actor, r.display_rank);
  std::vector<RankShift> out;
  out.reserve(share_ranks.rows.size());
  for (const auto& r : share_ranks.rows) {
    auto it = lookup.find(r.actor);
    if (it == lookup.end()) {
      throw MismatchedActorSets("actor '" + r.actor + "' missing from NOAI ranking");
    }
    out.push_back({r.actor, r.display_rank, it->second, it->second - r.display_rank});
  }
  return out;
}

struct ActorFilter {
  double min_pubs = 30.0;
  bool inclusive = false;  // x_total >= min_pubs instead of >
  std::optional<ActorKind> kind;
  std::optional<InstitutionGroup> group;
};

inline IndicatorTable filter_actors(const IndicatorTable& table, const ActorFilter& filter = {}) {
  IndicatorTable out = table;
  out.rows.clear();
  for (const auto& row : table.rows) {
    const bool big_enough =
        filter.inclusive ? row.x_total >= filter.min_pubs : row.x_total > filter.min_pubs;
    if (!big_enough) continue;
    if (filter.kind && row.kind != *filter.kind) continue;
    if (filter.group && row.group != filter.group) continue;
    out.rows.push_back(row);
  }
  return out;
}

/// The `n` largest producers by x_total, ties broken by actor id.
inline IndicatorTable top_n(const IndicatorTable& table, std::size_t n) {
  IndicatorTable out = table;
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const auto& a, const auto& b) {
    if (a.x_total != b.x_total) return a.x_total > b.x_total;
    return a.actor < b.actor;
  });
  if (out.rows.size() > n) out.rows.resize(n);
  return out;
}

}  // namespace noai
