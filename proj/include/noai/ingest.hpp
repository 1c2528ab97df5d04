#pragma once

// Loading of corpus files (one JSON object per line) and of the registry
// CSV files, with per-reason rejection accounting.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "noai/csv.hpp"
#include "noai/error.hpp"
#include "noai/model.hpp"

namespace noai {

namespace reason {
inline constexpr std::string_view kMalformed = "malformed";
inline constexpr std::string_view kEmptyCategories = "empty_categories";
inline constexpr std::string_view kDocType = "doc_type_filtered";
inline constexpr std::string_view kYear = "year_out_of_window";
inline constexpr std::string_view kNoDoi = "no_doi";
inline constexpr std::string_view kDuplicateId = "duplicate_id";
inline constexpr std::string_view kUnknownCategory = "unknown_category";
}  // namespace reason

struct LoadOptions {
  std::optional<std::vector<DocType>> doc_types;  // nullopt keeps all four
  std::optional<YearWindow> years;
  bool require_doi = false;
  /// Malformed lines and unknown categories become fatal.
  bool strict = false;
  /// When false, categories are not checked against the registry at all
  /// (use validate_corpus afterwards).
  bool check_categories = true;
};

struct CorpusStats {
  std::size_t records_read = 0;
  std::size_t records_accepted = 0;
  std::size_t records_rejected = 0;
  std::map<std::string, std::size_t, std::less<>> rejection_reasons;
  std::optional<YearWindow> year_range;  // observed over accepted records

  void reject(std::string_view why) {
    ++records_rejected;
    auto it = rejection_reasons.find(why);
    if (it == rejection_reasons.end()) {
      rejection_reasons.emplace(std::string(why), 1);
    } else {
      ++it->second;
    }
  }
};

struct LoadedCorpus {
  Corpus records;
  CorpusStats stats;
};

namespace detail {

inline std::vector<std::string> string_array(const nlohmann::json& obj, const char* key,
                                             bool required, std::size_t line) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) throw MalformedRecord(line, std::string("missing field '") + key + "'");
    return out;
  }
  if (!it->is_array()) throw MalformedRecord(line, std::string("'") + key + "' must be an array");
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw MalformedRecord(line, std::string("'") + key + "' must contain strings");
    }
    const auto& s = v.get_ref<const std::string&>();
    if (s.empty()) throw MalformedRecord(line, std::string("empty string in '") + key + "'");
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

}  // namespace detail

/// Decodes one corpus line. Duplicates inside list fields are dropped
/// (first occurrence kept); unknown keys are ignored.
inline PublicationRecord parse_record(std::string_view text, std::size_t line = 0) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedRecord(line, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw MalformedRecord(line, "record must be a JSON object");

  PublicationRecord r;
  auto id = obj.find("id");
  if (id == obj.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) {
    throw MalformedRecord(line, "missing or empty 'id'");
  }
  r.id = id->get<std::string>();

  auto year = obj.find("year");
  if (year == obj.end() || !year->is_number_integer()) {
    throw MalformedRecord(line, "'year' must be an integer");
  }
  r.year = year->get<int>();

  auto doc = obj.find("doc_type");
  if (doc == obj.end() || !doc->is_string()) throw MalformedRecord(line, "missing 'doc_type'");
  auto dt = parse_doc_type(doc->get_ref<const std::string&>());
  if (!dt) {
    throw MalformedRecord(line, "unknown doc_type '" + doc->get<std::string>() + "'");
  }
  r.doc_type = *dt;

  for (const auto& s : detail::string_array(obj, "oa", false, line)) {
    auto st = parse_open_status(s);
    if (!st) throw MalformedRecord(line, "unknown OA status '" + s + "'");
    r.raw_statuses.insert(*st);
  }

  r.subject_categories = detail::string_array(obj, "categories", true, line);

  auto doi = obj.find("doi");
  if (doi != obj.end() && !doi->is_null()) {
    if (!doi->is_boolean()) throw MalformedRecord(line, "'doi' must be a boolean");
    r.has_doi = doi->get<bool>();
  }

  r.countries = detail::string_array(obj, "countries", false, line);
  r.institutions = detail::string_array(obj, "institutions", false, line);
  return r;
}

/// Encodes a record as one corpus line (no trailing newline).
inline std::string to_json_line(const PublicationRecord& r) {
  nlohmann::ordered_json obj;
  obj["id"] = r.id;
  obj["year"] = r.year;
  obj["doc_type"] = std::string(to_string(r.doc_type));
  auto oa = nlohmann::ordered_json::array();
  for (auto s : kOpenStatuses) {
    if (r.raw_statuses.contains(s)) oa.push_back(std::string(to_string(s)));
  }
  obj["oa"] = std::move(oa);
  obj["categories"] = r.subject_categories;
  obj["doi"] = r.has_doi;
  obj["countries"] = r.countries;
  obj["institutions"] = r.institutions;
  return obj.dump();
}

inline void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& r : corpus) out << to_json_line(r) << '\n';
}

/// Streams a corpus. `registry` may be null when options.check_categories is
/// false. Duplicate ids keep the first well-formed occurrence.
inline LoadedCorpus load_corpus(std::istream& in, const ClassificationRegistry* registry,
                                const LoadOptions& options = {}) {
  if (options.check_categories && registry == nullptr) {
    throw ConfigError("category checking requested without a registry");
  }
  LoadedCorpus out;
  auto& stats = out.stats;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++stats.records_read;

    PublicationRecord r;
    try {
      r = parse_record(line, line_no);
    } catch (const MalformedRecord&) {
      if (options.strict) throw;
      stats.reject(reason::kMalformed);
      continue;
    }

    if (!seen_ids.insert(r.id).second) {
      stats.reject(reason::kDuplicateId);
      continue;
    }
    if (r.subject_categories.empty()) {
      if (options.strict) throw MalformedRecord(line_no, "empty categories");
      stats.reject(reason::kEmptyCategories);
      continue;
    }
    if (options.doc_types &&
        std::find(options.doc_types->begin(), options.doc_types->end(), r.doc_type) ==
            options.doc_types->end()) {
      stats.reject(reason::kDocType);
      continue;
    }
    if (options.years && !options.years->contains(r.year)) {
      stats.reject(reason::kYear);
      continue;
    }
    if (options.require_doi && !r.has_doi) {
      stats.reject(reason::kNoDoi);
      continue;
    }
    if (options.check_categories) {
      auto unknown = std::find_if(r.subject_categories.begin(), r.subject_categories.end(),
                                  [&](const std::string& c) { return !registry->contains(c); });
      if (unknown != r.subject_categories.end()) {
        if (options.strict) {
          throw UnknownCategory("line " + std::to_string(line_no) + ": unknown subject category '" +
                                *unknown + "' in record '" + r.id + "'");
        }
        stats.reject(reason::kUnknownCategory);
        continue;
      }
    }

    ++stats.records_accepted;
    if (!stats.year_range) {
      stats.year_range = YearWindow{r.year, r.year};
    } else {
      stats.year_range->first = std::min(stats.year_range->first, r.year);
      stats.year_range->last = std::max(stats.year_range->last, r.year);
    }
    out.records.push_back(std::move(r));
  }
  if (in.bad()) throw IoFailure("read error in corpus stream");
  return out;
}

inline LoadedCorpus load_corpus(const std::string& path, const ClassificationRegistry* registry,
                                const LoadOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open corpus file '" + path + "'");
  return load_corpus(in, registry, options);
}

struct RegistryOptions {
  /// Require OST disciplines from the 11-name list (abbreviations are
  /// accepted and stored under the full name) and ERC ids from the 25.
  bool strict_nomenclature = false;
};

inline constexpr std::string_view kRegistryHeader = "subject_category,ost_discipline,erc_subfield";
inline constexpr std::string_view kActorHeader = "actor_id,kind,group,display_name";

namespace detail {

inline bool blank(const std::vector<std::string>& row) {
  return row.size() == 1 && row[0].find_first_not_of(" \t") == std::string::npos;
}

inline void expect_header(std::istream& in, std::size_t& line, std::string_view header) {
  auto row = csv::read_row(in, line);
  if (!row) throw MalformedRow(1, "missing header, expected '" + std::string(header) + "'");
  if (!row->empty() && row->front().rfind("\xEF\xBB\xBF", 0) == 0) {
    row->front().erase(0, 3);
  }
  std::vector<std::string> expected;
  std::stringstream ss{std::string(header)};
  std::size_t ignored = 0;
  expected = *csv::read_row(ss, ignored);
  if (*row != expected) {
    throw MalformedRow(line, "bad header, expected '" + std::string(header) + "'");
  }
}

}  // namespace detail

inline ClassificationRegistry load_registry(std::istream& in, const RegistryOptions& options = {}) {
  ClassificationRegistry registry;
  std::size_t line = 0;
  detail::expect_header(in, line, kRegistryHeader);
  while (auto row = csv::read_row(in, line)) {
    if (detail::blank(*row)) continue;
    if (row->size() != 3) {
      throw MalformedRow(line, "expected 3 columns, got " + std::to_string(row->size()));
    }
    auto& category = (*row)[0];
    auto& ost = (*row)[1];
    auto& erc = (*row)[2];
    if (category.empty() || ost.empty() || erc.empty()) throw MalformedRow(line, "empty column");
    if (options.strict_nomenclature) {
      auto canon = nomenclature::canonical_discipline(ost);
      if (!canon) {
        throw UnknownDiscipline("row " + std::to_string(line) + ": '" + ost +
                                "' is not an OST discipline");
      }
      ost = std::string(*canon);
      if (!nomenclature::is_erc_subfield(erc)) {
        throw UnknownSubfield("row " + std::to_string(line) + ": '" + erc +
                              "' is not an ERC sub-field");
      }
    }
    try {
      registry.add(std::move(category), std::move(ost), std::move(erc));
    } catch (const DuplicateCategory& e) {
      throw DuplicateCategory("row " + std::to_string(line) + ": " + e.what());
    }
  }
  return registry;
}

inline ClassificationRegistry load_registry(const std::string& path,
                                            const RegistryOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open registry file '" + path + "'");
  return load_registry(in, options);
}

inline void write_registry(std::ostream& out, const ClassificationRegistry& registry) {
  out << kRegistryHeader << '\n';
  for (std::size_t i = 0; i < registry.size(); ++i) {
    out << csv::join({registry.categories()[i],
                      registry.fields(Level::OstDiscipline)[registry.field_of(i, Level::OstDiscipline)],
                      registry.fields(Level::ErcSubfield)[registry.field_of(i, Level::ErcSubfield)]})
        << '\n';
  }
}

inline ActorRegistry load_actors(std::istream& in) {
  ActorRegistry actors;
  std::size_t line = 0;
  detail::expect_header(in, line, kActorHeader);
  while (auto row = csv::read_row(in, line)) {
    if (detail::blank(*row)) continue;
    if (row->size() != 4) {
      throw MalformedRow(line, "expected 4 columns, got " + std::to_string(row->size()));
    }
    Actor a;
    a.id = (*row)[0];
    if (a.id.empty()) throw MalformedRow(line, "empty actor_id");
    auto kind = parse_actor_kind((*row)[1]);
    if (!kind) throw MalformedRow(line, "kind must be 'country' or 'institution'");
    a.kind = *kind;
    if (!(*row)[2].empty()) {
      a.group = parse_group((*row)[2]);
      if (!a.group) throw MalformedRow(line, "group must be G1, G2 or G3");
      if (a.kind != ActorKind::Institution) {
        throw MalformedRow(line, "group is only allowed for institutions");
      }
    }
    a.display_name = (*row)[3].empty() ? a.id : (*row)[3];
    try {
      actors.add(std::move(a));
    } catch (const DataError& e) {
      throw MalformedRow(line, e.what());
    }
  }
  return actors;
}

inline ActorRegistry load_actors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open actor file '" + path + "'");
  return load_actors(in);
}

struct Diagnostic {
  std::string record_id;
  std::vector<std::string> unknown_categories;

  std::string message() const {
    std::string m = "record '" + record_id + "' references unknown subject categor";
    m += unknown_categories.size() == 1 ? "y " : "ies ";
    for (std::size_t i = 0; i < unknown_categories.size(); ++i) {
      if (i) m += ", ";
      m += "'" + unknown_categories[i] + "'";
    }
    return m;
  }
};

/// One diagnostic per record that references a category absent from the
/// registry. An empty result means every record classifies at every level.
inline std::vector<Diagnostic> validate_corpus(const Corpus& corpus,
                                               const ClassificationRegistry& registry) {
  std::vector<Diagnostic> out;
  for (const auto& r : corpus) {
    Diagnostic d{r.id, {}};
    for (const auto& c : r.subject_categories) {
      if (!registry.contains(c)) d.unknown_categories.push_back(c);
    }
    if (!d.unknown_categories.empty()) out.push_back(std::move(d));
  }
  return out;
}

}  // namespace noai
