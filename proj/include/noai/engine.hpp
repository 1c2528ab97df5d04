#pragma once

// Disciplinary fractional counting, per-(actor, field) aggregation, world
// baselines, normalized shares and the normalized OA indicator.
//
// Counting is fractional over fields (a record with k distinct categories
// gives 1/k to each) and whole over actors (every distinct actor on a record
// gets the full fraction). The world baseline counts every record in the
// window once, whether or not it lists an actor of the queried kind.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "noai/error.hpp"
#include "noai/model.hpp"
#include "noai/summation.hpp"

namespace noai {

/// How one publication's unit credit splits across fields at one level.
struct FractionVector {
  std::string publication_id;
  Level level = Level::SubjectCategory;
  std::vector<std::pair<std::string, double>> entries;  // field id -> weight

  double weight(std::string_view field) const {
    for (const auto& [f, w] : entries) {
      if (f == field) return w;
    }
    return 0.0;
  }
};

namespace detail {

struct DenseFraction {
  std::size_t field;
  double weight;
};

/// Weight of a field = (number of the record's categories mapping to it) / k.
inline void dense_fractions(const PublicationRecord& r, const ClassificationRegistry& registry,
                            Level level, std::vector<DenseFraction>& out) {
  out.clear();
  const auto k = r.subject_categories.size();
  if (k == 0) throw DataError("record '" + r.id + "' has no subject categories");
  // reuse weight as a counter first
  for (const auto& c : r.subject_categories) {
    auto ci = registry.find(c);
    if (!ci) {
      throw UnknownCategory("record '" + r.id + "': unknown subject category '" + c + "'");
    }
    const auto f = registry.field_of(*ci, level);
    auto it = std::find_if(out.begin(), out.end(), [f](const auto& e) { return e.field == f; });
    if (it == out.end()) {
      out.push_back({f, 1.0});
    } else {
      it->weight += 1.0;
    }
  }
  const auto denom = static_cast<double>(k);
  for (auto& e : out) e.weight /= denom;
}

}  // namespace detail

inline FractionVector field_fractions(const PublicationRecord& record,
                                      const ClassificationRegistry& registry, Level level) {
  std::vector<detail::DenseFraction> dense;
  detail::dense_fractions(record, registry, level, dense);
  FractionVector fv{record.id, level, {}};
  fv.entries.reserve(dense.size());
  for (const auto& d : dense) fv.entries.emplace_back(registry.fields(level)[d.field], d.weight);
  return fv;
}

/// Fractional publication and OA counts of one actor in one field.
struct ActorFieldAggregate {
  std::string actor;
  std::string field;
  Level level = Level::SubjectCategory;
  double x = 0.0;   // fractional publication count
  double oa = 0.0;  // fractional OA count
  std::array<double, 3> oa_by_type{};  // indexed by OAStatus Gold/Bronze/Green

  double oa_of(OAStatus s) const {
    return s == OAStatus::Closed ? 0.0 : oa_by_type[static_cast<std::size_t>(s)];
  }
};

/// World totals for one field.
struct WorldBaseline {
  std::string field;
  Level level = Level::SubjectCategory;
  double x = 0.0;
  double oa = 0.0;
  std::array<double, 3> oa_by_type{};

  /// OA_w / X_w, undefined when the field has no publications.
  std::optional<double> world_share() const {
    if (x <= 0.0) return std::nullopt;
    return oa / x;
  }
};

/// World baselines of one level with lookup by field id.
class BaselineIndex {
 public:
  BaselineIndex() = default;
  explicit BaselineIndex(std::vector<WorldBaseline> baselines) : baselines_(std::move(baselines)) {
    for (std::size_t i = 0; i < baselines_.size(); ++i) index_.emplace(baselines_[i].field, i);
  }

  const WorldBaseline* find(std::string_view field) const {
    auto it = index_.find(field);
    return it == index_.end() ? nullptr : &baselines_[it->second];
  }
  const std::vector<WorldBaseline>& all() const { return baselines_; }
  std::size_t size() const { return baselines_.size(); }

 private:
  std::vector<WorldBaseline> baselines_;
  StringMap<std::size_t> index_;
};

/// Per-actor totals over all of the actor's fields.
struct ActorTotals {
  std::string actor;
  double x = 0.0;
  double oa = 0.0;
  std::array<double, 3> oa_by_type{};
  std::size_t n_pubs_whole = 0;  // distinct records
  std::size_t n_oa_whole = 0;    // distinct OA records
  std::size_t first_cell = 0;    // range into Aggregation::cells
  std::size_t cell_count = 0;
};

struct AggregateQuery {
  Level level = Level::OstDiscipline;
  ActorKind kind = ActorKind::Country;
  std::optional<YearWindow> window;  // nullopt = every record
  StatusPriority priority = kDefaultPriority;
  bool strict = false;  // EmptyWindow is thrown instead of warned
};

struct Aggregation {
  Level level = Level::OstDiscipline;
  ActorKind kind = ActorKind::Country;
  std::optional<YearWindow> window;
  std::size_t records_in_window = 0;
  std::vector<ActorFieldAggregate> cells;  // grouped by actor (sorted), fields sorted
  std::vector<ActorTotals> actors;         // sorted by actor id
  BaselineIndex world;                     // fields with at least one record
  std::vector<std::string> warnings;

  std::span<const ActorFieldAggregate> cells_of(const ActorTotals& a) const {
    return std::span<const ActorFieldAggregate>(cells).subspan(a.first_cell, a.cell_count);
  }

  const ActorTotals* find_actor(std::string_view id) const {
    auto it = std::lower_bound(actors.begin(), actors.end(), id,
                               [](const ActorTotals& a, std::string_view v) { return a.actor < v; });
    return it != actors.end() && it->actor == id ? &*it : nullptr;
  }
};

namespace detail {

struct CellSums {
  CompensatedSum x, oa;
  std::array<CompensatedSum, 3> by_type;

  void add(double w, OAStatus s) {
    x.add(w);
    if (s != OAStatus::Closed) {
      oa.add(w);
      by_type[static_cast<std::size_t>(s)].add(w);
    }
  }
};

template <typename Out>
void fill(Out& out, const CellSums& s) {
  out.x = s.x.value();
  out.oa = s.oa.value();
  for (std::size_t t = 0; t < 3; ++t) out.oa_by_type[t] = s.by_type[t].value();
}

}  // namespace detail

/// Streams the corpus once and accumulates actor-field cells, per-actor
/// whole counts and the world baseline for `query.level`.
inline Aggregation aggregate(const Corpus& corpus, const ClassificationRegistry& registry,
                             const AggregateQuery& query) {
  Aggregation out;
  out.level = query.level;
  out.kind = query.kind;
  out.window = query.window;

  const auto& field_ids = registry.fields(query.level);
  std::vector<detail::CellSums> world(field_ids.size());
  std::vector<bool> world_seen(field_ids.size(), false);

  struct ActorAcc {
    std::size_t pubs = 0;
    std::size_t oa = 0;
  };
  StringMap<std::uint32_t> actor_index;
  std::vector<std::string> actor_ids;
  std::vector<ActorAcc> actor_acc;
  std::unordered_map<std::uint64_t, std::uint32_t> cell_index;
  std::vector<detail::CellSums> cells;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> cell_keys;  // (actor, field)

  std::vector<detail::DenseFraction> fractions;
  for (const auto& r : corpus) {
    if (query.window && !query.window->contains(r.year)) continue;
    ++out.records_in_window;
    detail::dense_fractions(r, registry, query.level, fractions);
    const auto status = resolve_status(r.raw_statuses, query.priority);

    for (const auto& f : fractions) {
      world[f.field].add(f.weight, status);
      world_seen[f.field] = true;
    }

    for (const auto& actor : actors_of(r, query.kind)) {
      auto it = actor_index.find(actor);
      if (it == actor_index.end()) {
        it = actor_index.emplace(actor, static_cast<std::uint32_t>(actor_ids.size())).first;
        actor_ids.push_back(actor);
        actor_acc.emplace_back();
      }
      const auto a = it->second;
      ++actor_acc[a].pubs;
      if (status != OAStatus::Closed) ++actor_acc[a].oa;
      for (const auto& f : fractions) {
        const auto key = (static_cast<std::uint64_t>(a) << 32) | f.field;
        auto [ci, inserted] = cell_index.try_emplace(key, static_cast<std::uint32_t>(cells.size()));
        if (inserted) {
          cells.emplace_back();
          cell_keys.emplace_back(a, static_cast<std::uint32_t>(f.field));
        }
        cells[ci->second].add(f.weight, status);
      }
    }
  }

  if (out.records_in_window == 0) {
    if (query.strict) throw EmptyWindow("no records in window");
    out.warnings.emplace_back("no records in window");
  }

  std::vector<WorldBaseline> baselines;
  for (std::size_t f = 0; f < field_ids.size(); ++f) {
    if (!world_seen[f]) continue;
    WorldBaseline b;
    b.field = field_ids[f];
    b.level = query.level;
    detail::fill(b, world[f]);
    baselines.push_back(std::move(b));
  }
  std::sort(baselines.begin(), baselines.end(),
            [](const auto& a, const auto& b) { return a.field < b.field; });
  out.world = BaselineIndex(std::move(baselines));

  // Canonical order: actors by id, each actor's fields by field id.
  std::vector<std::uint32_t> cell_order(cells.size());
  for (std::uint32_t i = 0; i < cell_order.size(); ++i) cell_order[i] = i;
  std::sort(cell_order.begin(), cell_order.end(), [&](std::uint32_t l, std::uint32_t r) {
    const auto& al = actor_ids[cell_keys[l].first];
    const auto& ar = actor_ids[cell_keys[r].first];
    if (al != ar) return al < ar;
    return field_ids[cell_keys[l].second] < field_ids[cell_keys[r].second];
  });

  out.cells.reserve(cells.size());
  for (std::size_t pos = 0; pos < cell_order.size(); ++pos) {
    const auto ci = cell_order[pos];
    const auto [a, f] = cell_keys[ci];
    if (out.actors.empty() || out.actors.back().actor != actor_ids[a]) {
      ActorTotals t;
      t.actor = actor_ids[a];
      t.n_pubs_whole = actor_acc[a].pubs;
      t.n_oa_whole = actor_acc[a].oa;
      t.first_cell = pos;
      out.actors.push_back(std::move(t));
    }
    ActorFieldAggregate agg;
    agg.actor = actor_ids[a];
    agg.field = field_ids[f];
    agg.level = query.level;
    detail::fill(agg, cells[ci]);
    out.cells.push_back(std::move(agg));
    ++out.actors.back().cell_count;
  }

  for (auto& t : out.actors) {
    CompensatedSum x, oa;
    std::array<CompensatedSum, 3> by_type;
    for (const auto& c : out.cells_of(t)) {
      x.add(c.x);
      oa.add(c.oa);
      for (std::size_t k = 0; k < 3; ++k) by_type[k].add(c.oa_by_type[k]);
    }
    t.x = x.value();
    t.oa = oa.value();
    for (std::size_t k = 0; k < 3; ++k) t.oa_by_type[k] = by_type[k].value();
  }
  return out;
}

/// The world seen as one actor: one cell per baseline field.
inline std::vector<ActorFieldAggregate> world_as_actor(const Aggregation& agg,
                                                       std::string actor_id = "WORLD") {
  std::vector<ActorFieldAggregate> out;
  out.reserve(agg.world.size());
  for (const auto& b : agg.world.all()) {
    out.push_back({actor_id, b.field, b.level, b.x, b.oa, b.oa_by_type});
  }
  return out;
}

/// Percentage of OA publications, 100 * oa / x.
inline double oa_share(double oa, double x) {
  if (!(x > 0.0)) throw UndefinedShare("OA share undefined for zero publications");
  return 100.0 * oa / x;
}

inline double oa_share(const ActorFieldAggregate& agg) { return oa_share(agg.oa, agg.x); }
inline double oa_share(const ActorTotals& t) { return oa_share(t.oa, t.x); }

struct NormalizedShare {
  std::string actor;
  std::string field;
  Level level = Level::SubjectCategory;
  std::optional<double> value;  // undefined when x = 0 or the world share is 0/undefined
};

/// Actor share in a field relative to the world share in the same field.
inline NormalizedShare normalized_share(const ActorFieldAggregate& agg,
                                        const WorldBaseline& baseline) {
  if (agg.field != baseline.field || agg.level != baseline.level) {
    throw Error("normalized_share: aggregate and baseline refer to different fields");
  }
  NormalizedShare out{agg.actor, agg.field, agg.level, std::nullopt};
  const auto world = baseline.world_share();
  if (agg.x > 0.0 && world && *world > 0.0) out.value = (agg.oa / agg.x) / *world;
  return out;
}

struct NoaiResult {
  double value = 0.0;
  double x_included = 0.0;                   // denominator: x over defined fields
  std::vector<std::string> excluded_fields;  // publishes there, share undefined
};

/// x-weighted mean of the actor's defined normalized shares. Fields whose
/// normalized share is undefined are left out of numerator and denominator.
inline NoaiResult compute_noai(std::span<const ActorFieldAggregate> cells, const BaselineIndex& world) {
  NoaiResult out;
  CompensatedSum num, den;
  for (const auto& c : cells) {
    const auto* b = world.find(c.field);
    std::optional<double> s;
    if (b != nullptr) s = normalized_share(c, *b).value;
    if (!s) {
      if (c.x > 0.0) out.excluded_fields.push_back(c.field);
      continue;
    }
    num.add(*s * c.x);
    den.add(c.x);
  }
  if (!(den.value() > 0.0)) {
    throw UndefinedIndicator("no field with a defined normalized share");
  }
  out.x_included = den.value();
  out.value = num.value() / out.x_included;
  return out;
}

struct TypeBreakdown {
  std::string actor;
  double total = 0.0;  // percent
  double gold = 0.0;
  double bronze = 0.0;
  double green = 0.0;
};

/// Per-actor OA share split by resolved OA type; the three parts add up to
/// the total share.
inline std::vector<TypeBreakdown> type_breakdown(const Aggregation& agg) {
  std::vector<TypeBreakdown> out;
  out.reserve(agg.actors.size());
  for (const auto& a : agg.actors) {
    out.push_back({a.actor, oa_share(a.oa, a.x), oa_share(a.oa_by_type[0], a.x),
                   oa_share(a.oa_by_type[1], a.x), oa_share(a.oa_by_type[2], a.x)});
  }
  return out;
}

inline std::vector<TypeBreakdown> type_breakdown(const Corpus& corpus,
                                                 const ClassificationRegistry& registry,
                                                 const AggregateQuery& query) {
  return type_breakdown(aggregate(corpus, registry, query));
}

// ---------------------------------------------------------------------------
// World time series

struct SeriesRow {
  int year = 0;
  std::size_t n_records = 0;
  double total = 0.0;  // percent
  double gold = 0.0;
  double bronze = 0.0;
  double green = 0.0;
  std::vector<std::optional<double>> field_share;  // parallel to Series::fields
};

struct Series {
  Level level = Level::OstDiscipline;
  std::vector<std::string> fields;  // sorted
  std::vector<SeriesRow> rows;      // ascending year, empty years omitted
};

/// World OA shares per year, in total, by type and by field.
inline Series yearly_series(const Corpus& corpus, const ClassificationRegistry& registry,
                            Level level, std::optional<YearWindow> window = std::nullopt,
                            const StatusPriority& priority = kDefaultPriority) {
  struct YearAcc {
    std::size_t n = 0;
    detail::CellSums total;
    std::vector<detail::CellSums> fields;
  };
  const auto& field_ids = registry.fields(level);
  std::map<int, YearAcc> years;
  std::vector<bool> seen(field_ids.size(), false);
  std::vector<detail::DenseFraction> fractions;

  for (const auto& r : corpus) {
    if (window && !window->contains(r.year)) continue;
    auto& y = years[r.year];
    if (y.fields.empty()) y.fields.resize(field_ids.size());
    ++y.n;
    const auto status = resolve_status(r.raw_statuses, priority);
    detail::dense_fractions(r, registry, level, fractions);
    for (const auto& f : fractions) {
      y.fields[f.field].add(f.weight, status);
      y.total.add(f.weight, status);
      seen[f.field] = true;
    }
  }

  Series out;
  out.level = level;
  std::vector<std::size_t> order;
  for (std::size_t f = 0; f < field_ids.size(); ++f) {
    if (seen[f]) order.push_back(f);
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return field_ids[a] < field_ids[b]; });
  for (auto f : order) out.fields.push_back(field_ids[f]);

  for (const auto& [year, acc] : years) {
    SeriesRow row;
    row.year = year;
    row.n_records = acc.n;
    const double x = acc.total.x.value();
    row.total = oa_share(acc.total.oa.value(), x);
    row.gold = oa_share(acc.total.by_type[0].value(), x);
    row.bronze = oa_share(acc.total.by_type[1].value(), x);
    row.green = oa_share(acc.total.by_type[2].value(), x);
    for (auto f : order) {
      const double fx = acc.fields[f].x.value();
      row.field_share.push_back(fx > 0.0 ? std::optional<double>(oa_share(acc.fields[f].oa.value(), fx))
                                         : std::nullopt);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Indicator table

struct IndicatorRow {
  std::string actor;
  std::string display_name;
  ActorKind kind = ActorKind::Country;
  std::optional<InstitutionGroup> group;
  double x_total = 0.0;  // fractional publications, equals the sum of x_ij
  double oa_total = 0.0;
  std::optional<double> oa_share;                 // percent
  std::array<std::optional<double>, 3> noai{};   // indexed by Level
  double gold_share = 0.0;  // percent of x_total
  double bronze_share = 0.0;
  double green_share = 0.0;
  std::size_t n_pubs_whole = 0;
  std::size_t n_oa_whole = 0;

  std::optional<double> noai_at(Level l) const { return noai[static_cast<std::size_t>(l)]; }
};

struct IndicatorTable {
  ActorKind kind = ActorKind::Country;
  std::optional<YearWindow> window;
  std::size_t records_in_window = 0;
  std::vector<IndicatorRow> rows;  // sorted by actor id
  std::vector<std::string> diagnostics;
};

struct IndicatorQuery {
  ActorKind kind = ActorKind::Country;
  std::optional<YearWindow> window;
  StatusPriority priority = kDefaultPriority;
  std::vector<Level> levels{Level::SubjectCategory, Level::OstDiscipline, Level::ErcSubfield};
  bool strict = false;
};

/// One row per actor of the queried kind: OA share, share by type, whole
/// counts and NOAI at each requested level.
inline IndicatorTable compute_indicators(const Corpus& corpus,
                                         const ClassificationRegistry& registry,
                                         const ActorRegistry* actors,
                                         const IndicatorQuery& query) {
  if (query.levels.empty()) throw ConfigError("no normalization level requested");
  IndicatorTable table;
  table.kind = query.kind;
  table.window = query.window;

  bool first = true;
  for (auto level : query.levels) {
    auto agg = aggregate(corpus, registry,
                         {level, query.kind, query.window, query.priority, query.strict});
    if (first) {
      table.records_in_window = agg.records_in_window;
      for (auto& w : agg.warnings) table.diagnostics.push_back(w);
      for (const auto& a : agg.actors) {
        IndicatorRow row;
        row.actor = a.actor;
        row.display_name = a.actor;
        row.kind = query.kind;
        if (actors != nullptr) {
          if (const auto* meta = actors->find(a.actor)) {
            row.display_name = meta->display_name;
            row.group = meta->group;
          }
        }
        row.x_total = a.x;
        row.oa_total = a.oa;
        if (a.x > 0.0) {
          row.oa_share = oa_share(a.oa, a.x);
          row.gold_share = oa_share(a.oa_by_type[0], a.x);
          row.bronze_share = oa_share(a.oa_by_type[1], a.x);
          row.green_share = oa_share(a.oa_by_type[2], a.x);
        }
        row.n_pubs_whole = a.n_pubs_whole;
        row.n_oa_whole = a.n_oa_whole;
        table.rows.push_back(std::move(row));
      }
      first = false;
    }
    for (auto& row : table.rows) {
      const auto* a = agg.find_actor(row.actor);
      if (a == nullptr) continue;
      try {
        auto r = compute_noai(agg.cells_of(*a), agg.world);
        row.noai[static_cast<std::size_t>(level)] = r.value;
        for (const auto& f : r.excluded_fields) {
          table.diagnostics.push_back(std::string(to_string(level)) + ": actor '" + row.actor +
                                      "' field '" + f + "' excluded (world OA share is zero)");
        }
      } catch (const UndefinedIndicator&) {
        table.diagnostics.push_back(std::string(to_string(level)) + ": NOAI undefined for actor '" +
                                    row.actor + "'");
      }
    }
  }
  return table;
}

}  // namespace noai
