#pragma once

// The `noai` command line: validate, indicators, rank, compare, series and
// synth. Exit codes: 0 ok, 2 usage/configuration, 3 data.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "noai/analysis.hpp"
#include "noai/engine.hpp"
#include "noai/error.hpp"
#include "noai/ingest.hpp"
#include "noai/model.hpp"
#include "noai/report.hpp"
#include "noai/synth.hpp"

namespace noai::cli {

inline constexpr std::string_view kVersion = "1.0.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

struct RunConfig {
  std::string subcommand;
  std::string corpus;
  std::string registry;
  std::string actors;
  std::string window;
  std::string level = "ost-discipline";
  std::string actor_kind = "country";
  std::string doc_types;
  bool require_doi = false;
  double min_pubs = 30.0;
  bool min_pubs_inclusive = false;
  std::size_t top_n = 0;  // 0 = no limit
  std::string group;
  std::string format = "csv";
  std::string out;
  bool strict = false;
  bool strict_nomenclature = false;
  std::string priority = "gold,bronze,green";
  std::string rank_order = "asc";
  int decimals = 2;
  // synth
  std::string spec;
  std::string registry_out;
};

/// RunConfig after validation, with parsed values.
struct Resolved {
  std::optional<YearWindow> window;
  Level level = Level::OstDiscipline;
  ActorKind kind = ActorKind::Country;
  std::optional<std::vector<DocType>> doc_types;
  std::optional<InstitutionGroup> group;
  report::Format format = report::Format::Csv;
  StatusPriority priority = kDefaultPriority;
  RankConvention convention = RankConvention::Ascending;
};

inline Resolved resolve(const RunConfig& c) {
  Resolved r;
  if (!c.window.empty()) r.window = parse_window(c.window);
  auto level = parse_level(c.level);
  if (!level) throw ConfigError("unknown level '" + c.level + "'");
  r.level = *level;
  auto kind = parse_actor_kind(c.actor_kind);
  if (!kind) throw ConfigError("unknown actor kind '" + c.actor_kind + "'");
  r.kind = *kind;
  if (!c.doc_types.empty()) {
    std::vector<DocType> types;
    std::stringstream ss(c.doc_types);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto dt = parse_doc_type(item);
      if (!dt) throw ConfigError("unknown doc type '" + item + "'");
      types.push_back(*dt);
    }
    r.doc_types = std::move(types);
  }
  if (!c.group.empty()) {
    r.group = parse_group(c.group);
    if (!r.group) throw ConfigError("unknown group '" + c.group + "'");
    if (r.kind != ActorKind::Institution) throw ConfigError("--group requires --actor-kind institution");
  }
  auto fmt = report::parse_format(c.format);
  if (!fmt) throw ConfigError("unknown format '" + c.format + "'");
  r.format = *fmt;
  r.priority = parse_priority(c.priority);
  if (c.rank_order == "asc") {
    r.convention = RankConvention::Ascending;
  } else if (c.rank_order == "desc") {
    r.convention = RankConvention::Descending;
  } else {
    throw ConfigError("--rank-order must be asc or desc");
  }
  if (c.decimals < 0 || c.decimals > 17) throw ConfigError("--decimals must be in 0..17");
  if (c.min_pubs < 0) throw ConfigError("--min-pubs must be non-negative");
  return r;
}

namespace detail {

inline nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["subcommand"] = c.subcommand;
  if (c.subcommand == "synth") {
    j["spec"] = c.spec;
    j["registry_out"] = c.registry_out;
  } else {
    j["corpus"] = c.corpus;
    j["registry"] = c.registry;
    j["actors"] = c.actors;
    j["window"] = c.window;
    j["level"] = c.level;
    j["actor_kind"] = c.actor_kind;
    j["doc_types"] = c.doc_types;
    j["require_doi"] = c.require_doi;
    j["min_pubs"] = c.min_pubs;
    j["min_pubs_inclusive"] = c.min_pubs_inclusive;
    j["top_n"] = c.top_n;
    j["group"] = c.group;
    j["strict"] = c.strict;
    j["strict_nomenclature"] = c.strict_nomenclature;
    j["priority"] = c.priority;
    j["rank_order"] = c.rank_order;
  }
  j["format"] = c.format;
  j["decimals"] = c.decimals;
  j["out"] = c.out;
  return j;
}

/// Sends output to --out (plus a manifest next to it) or to `out`.
class Sink {
 public:
  Sink(const RunConfig& c, std::ostream& fallback) : config_(c), fallback_(fallback) {}

  void emit(const report::Table& table, report::Format format) {
    if (config_.out.empty()) {
      report::write(fallback_, table, format);
      return;
    }
    std::ofstream f(config_.out, std::ios::binary);
    if (!f) throw IoFailure("cannot write '" + config_.out + "'");
    report::write(f, table, format);
    rows_ = table.rows.size();
  }

  void manifest(const CorpusStats* stats, nlohmann::ordered_json extra = {}) const {
    if (config_.out.empty()) return;
    nlohmann::ordered_json m;
    m["tool"] = "noai";
    m["version"] = std::string(kVersion);
    m["config"] = config_json(config_);
    if (stats != nullptr) m["corpus"] = report::stats_json(*stats);
    m["output"] = {{"path", config_.out}, {"rows", rows_}};
    if (!extra.is_null()) m["details"] = std::move(extra);
    std::ofstream f(config_.out + ".manifest.json", std::ios::binary);
    if (!f) throw IoFailure("cannot write manifest for '" + config_.out + "'");
    f << m.dump(2) << '\n';
  }

 private:
  const RunConfig& config_;
  std::ostream& fallback_;
  std::size_t rows_ = 0;
};

struct Inputs {
  ClassificationRegistry registry;
  ActorRegistry actors;
  bool has_actors = false;
  LoadedCorpus corpus;
};

inline Inputs load_inputs(const RunConfig& c, const Resolved& r, bool check_categories,
                          std::ostream& err) {
  if (c.corpus.empty()) throw ConfigError("--corpus is required");
  if (c.registry.empty()) throw ConfigError("--registry is required");
  Inputs in;
  in.registry = load_registry(c.registry, {c.strict_nomenclature});
  if (!c.actors.empty()) {
    in.actors = load_actors(c.actors);
    in.has_actors = true;
  }
  LoadOptions opts;
  opts.doc_types = r.doc_types;
  opts.years = r.window;
  opts.require_doi = c.require_doi;
  opts.strict = c.strict;
  opts.check_categories = check_categories;
  in.corpus = load_corpus(c.corpus, check_categories ? &in.registry : nullptr, opts);
  const auto& s = in.corpus.stats;
  err << "corpus: " << s.records_read << " read, " << s.records_accepted << " accepted, "
      << s.records_rejected << " rejected";
  for (const auto& [why, n] : s.rejection_reasons) err << " [" << why << ": " << n << "]";
  err << '\n';
  return in;
}

inline IndicatorTable indicator_rows(const RunConfig& c, const Resolved& r, const Inputs& in,
                                     const std::vector<Level>& levels, std::ostream& err) {
  IndicatorQuery q;
  q.kind = r.kind;
  q.window = r.window;
  q.priority = r.priority;
  q.levels = levels;
  q.strict = true;
  auto table = compute_indicators(in.corpus.records, in.registry,
                                  in.has_actors ? &in.actors : nullptr, q);
  for (const auto& d : table.diagnostics) err << "note: " << d << '\n';
  ActorFilter filter;
  filter.min_pubs = c.min_pubs;
  filter.inclusive = c.min_pubs_inclusive;
  filter.kind = r.kind;
  filter.group = r.group;
  table = filter_actors(table, filter);
  if (c.top_n > 0) table = top_n(table, c.top_n);
  // stable output order
  std::sort(table.rows.begin(), table.rows.end(),
            [](const auto& a, const auto& b) { return a.actor < b.actor; });
  return table;
}

inline std::vector<Level> indicator_levels(Level requested) {
  std::vector<Level> levels{Level::SubjectCategory, Level::OstDiscipline};
  if (requested == Level::ErcSubfield) levels.push_back(Level::ErcSubfield);
  return levels;
}

}  // namespace detail

inline int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto r = resolve(c);
  auto in = detail::load_inputs(c, r, false, err);
  auto diags = validate_corpus(in.corpus.records, in.registry);
  for (const auto& d : diags) err << "diagnostic: " << d.message() << '\n';
  detail::Sink sink(c, out);
  sink.emit(report::diagnostics_table(diags), r.format);
  sink.manifest(&in.corpus.stats, {{"diagnostics", diags.size()}});
  return diags.empty() ? kExitOk : kExitData;
}

inline int cmd_indicators(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto r = resolve(c);
  auto in = detail::load_inputs(c, r, true, err);
  auto table = detail::indicator_rows(c, r, in, detail::indicator_levels(r.level), err);
  detail::Sink sink(c, out);
  sink.emit(report::indicator_table(table, c.decimals, r.level == Level::ErcSubfield), r.format);
  sink.manifest(&in.corpus.stats, {{"records_in_window", table.records_in_window}});
  return kExitOk;
}

/// Shared by `rank` (one level) and `compare` (subject categories and OST
/// disciplines, plus ERC when requested).
inline int cmd_compare_levels(const RunConfig& c, const std::vector<Level>& levels,
                              std::ostream& out, std::ostream& err) {
  const auto r = resolve(c);
  auto in = detail::load_inputs(c, r, true, err);
  auto table = detail::indicator_rows(c, r, in, levels, err);

  // Only actors with every compared metric defined can be ranked jointly.
  IndicatorTable ranked = table;
  ranked.rows.clear();
  for (const auto& row : table.rows) {
    bool ok = row.oa_share.has_value();
    for (auto l : levels) ok = ok && row.noai_at(l).has_value();
    if (ok) {
      ranked.rows.push_back(row);
    } else {
      err << "note: actor '" << row.actor << "' excluded from ranking (undefined metric)\n";
    }
  }
  if (ranked.rows.size() < 2) {
    throw DegenerateInput("ranking needs at least two actors, have " +
                          std::to_string(ranked.rows.size()));
  }

  std::vector<report::LevelComparison> comparisons;
  auto share_ranks = rank(ranked, Metric::OaShare, r.convention);
  for (auto l : levels) {
    report::LevelComparison lc{l, share_ranks, rank(ranked, noai_metric(l), r.convention), {}, 0.0};
    lc.shifts = rank_shift(lc.share_ranks, lc.noai_ranks);
    lc.rho = spearman(lc.share_ranks, lc.noai_ranks);
    comparisons.push_back(std::move(lc));
  }
  detail::Sink sink(c, out);
  sink.emit(report::comparison_table(ranked, comparisons, c.decimals), r.format);
  nlohmann::ordered_json rho = nlohmann::ordered_json::object();
  for (const auto& lc : comparisons) rho[std::string(to_string(lc.level))] = lc.rho;
  sink.manifest(&in.corpus.stats, {{"spearman_rho", rho}});
  return kExitOk;
}

inline int cmd_rank(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto r = resolve(c);
  return cmd_compare_levels(c, {r.level}, out, err);
}

inline int cmd_compare(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto r = resolve(c);
  std::vector<Level> levels{Level::SubjectCategory, Level::OstDiscipline};
  if (r.level == Level::ErcSubfield) levels.push_back(Level::ErcSubfield);
  return cmd_compare_levels(c, levels, out, err);
}

inline int cmd_series(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto r = resolve(c);
  auto in = detail::load_inputs(c, r, true, err);
  auto series = yearly_series(in.corpus.records, in.registry, r.level, r.window, r.priority);
  if (series.rows.empty()) throw EmptyWindow("no records in window");
  detail::Sink sink(c, out);
  sink.emit(report::series_table(series, c.decimals), r.format);
  sink.manifest(&in.corpus.stats);
  return kExitOk;
}

inline int cmd_synth(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.spec.empty()) throw ConfigError("--spec is required");
  const auto spec = synth::load_spec(c.spec);
  if (c.out.empty()) {
    synth::generate(spec, out);
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw IoFailure("cannot write '" + c.out + "'");
    synth::generate(spec, f);
  }
  if (!c.registry_out.empty()) {
    std::ofstream f(c.registry_out, std::ios::binary);
    if (!f) throw IoFailure("cannot write '" + c.registry_out + "'");
    write_registry(f, synth::make_registry(spec));
  }
  if (!c.out.empty()) {
    nlohmann::ordered_json m;
    m["tool"] = "noai";
    m["version"] = std::string(kVersion);
    m["config"] = detail::config_json(c);
    m["output"] = {{"path", c.out}, {"rows", spec.n_records}};
    m["details"] = {{"seed", spec.seed}, {"n_records", spec.n_records}};
    std::ofstream f(c.out + ".manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
  }
  err << "synth: " << spec.n_records << " records\n";
  return kExitOk;
}

/// Parses and runs one invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Field-normalized open access indicators", "noai"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  RunConfig c;

  auto add_common = [&](CLI::App* sub, bool with_analysis) {
    sub->add_option("--corpus", c.corpus, "Corpus file (one JSON record per line)")->required();
    sub->add_option("--registry", c.registry,
                    "Classification CSV: subject_category,ost_discipline,erc_subfield")
        ->required();
    sub->add_option("--actors", c.actors, "Actor CSV: actor_id,kind,group,display_name");
    sub->add_option("--window", c.window, "Inclusive year range Y1:Y2");
    sub->add_option("--level", c.level, "subject-category | ost-discipline | erc-subfield");
    sub->add_option("--actor-kind", c.actor_kind, "country | institution");
    sub->add_option("--doc-types", c.doc_types, "Comma list of article,letter,review,proceeding");
    sub->add_flag("--require-doi", c.require_doi, "Drop records without a DOI");
    sub->add_option("--format", c.format, "csv | json");
    sub->add_option("--out", c.out, "Output file (a .manifest.json is written next to it)");
    sub->add_flag("--strict", c.strict, "Malformed lines and unknown categories are fatal");
    sub->add_flag("--strict-nomenclature", c.strict_nomenclature,
                  "Registry must use the 11 OST disciplines and 25 ERC sub-fields");
    sub->add_option("--priority", c.priority, "Multi-status resolution order");
    sub->add_option("--decimals", c.decimals, "Decimals for shares and NOAI");
    if (with_analysis) {
      sub->add_option("--min-pubs", c.min_pubs, "Keep actors with x_total > N (default 30)");
      sub->add_flag("--min-pubs-inclusive", c.min_pubs_inclusive, "Use >= for --min-pubs");
      sub->add_option("--top-n", c.top_n, "Keep the N largest producers");
      sub->add_option("--group", c.group, "Institution group G1 | G2 | G3");
      sub->add_option("--rank-order", c.rank_order, "asc (rank 1 = lowest) | desc");
    }
  };

  auto* validate = app.add_subcommand("validate", "Check a corpus against the registry");
  add_common(validate, false);
  auto* indicators = app.add_subcommand("indicators", "OA share and NOAI per actor");
  add_common(indicators, true);
  auto* rank_cmd = app.add_subcommand("rank", "Share vs NOAI ranks at one level");
  add_common(rank_cmd, true);
  auto* compare = app.add_subcommand("compare", "Share vs NOAI ranks at every level");
  add_common(compare, true);
  auto* series = app.add_subcommand("series", "Yearly world OA shares");
  add_common(series, false);
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth_cmd->add_option("--spec", c.spec, "Synthetic corpus spec (JSON)")->required();
  synth_cmd->add_option("--out", c.out, "Corpus output file");
  synth_cmd->add_option("--registry-out", c.registry_out, "Write the matching registry CSV");

  std::vector<std::string> argv_store{"noai"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) {
      c.subcommand = "validate";
      return cmd_validate(c, out, err);
    }
    if (*indicators) {
      c.subcommand = "indicators";
      return cmd_indicators(c, out, err);
    }
    if (*rank_cmd) {
      c.subcommand = "rank";
      return cmd_rank(c, out, err);
    }
    if (*compare) {
      c.subcommand = "compare";
      return cmd_compare(c, out, err);
    }
    if (*series) {
      c.subcommand = "series";
      return cmd_series(c, out, err);
    }
    c.subcommand = "synth";
    return cmd_synth(c, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace noai::cli
