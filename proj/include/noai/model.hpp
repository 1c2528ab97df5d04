#pragma once

// Domain types shared by every stage of the pipeline: OA statuses and their
// resolution, publication records, the classification registry and actors.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "noai/error.hpp"

namespace noai {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

template <typename V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;

// ---------------------------------------------------------------------------
// OA status

enum class OAStatus : std::uint8_t { Gold = 0, Bronze = 1, Green = 2, Closed = 3 };

inline constexpr std::array<OAStatus, 3> kOpenStatuses{OAStatus::Gold, OAStatus::Bronze,
                                                       OAStatus::Green};

inline std::string_view to_string(OAStatus s) {
  switch (s) {
    case OAStatus::Gold: return "gold";
    case OAStatus::Bronze: return "bronze";
    case OAStatus::Green: return "green";
    case OAStatus::Closed: return "closed";
  }
  return "closed";
}

inline std::optional<OAStatus> parse_open_status(std::string_view s) {
  if (s == "gold") return OAStatus::Gold;
  if (s == "bronze") return OAStatus::Bronze;
  if (s == "green") return OAStatus::Green;
  return std::nullopt;
}

/// The raw (possibly multiple) OA statuses attached to a record. Closed is
/// not a member; an empty set means closed.
class StatusSet {
 public:
  constexpr StatusSet() = default;
  constexpr StatusSet(std::initializer_list<OAStatus> statuses) {
    for (auto s : statuses) insert(s);
  }

  constexpr void insert(OAStatus s) {
    if (s != OAStatus::Closed) bits_ |= bit(s);
  }
  constexpr bool contains(OAStatus s) const {
    return s != OAStatus::Closed && (bits_ & bit(s)) != 0;
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  static constexpr StatusSet from_bits(std::uint8_t bits) {
    StatusSet s;
    s.bits_ = bits & 0x7u;
    return s;
  }

  friend constexpr bool operator==(StatusSet, StatusSet) = default;

 private:
  static constexpr std::uint8_t bit(OAStatus s) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s));
  }
  std::uint8_t bits_ = 0;
};

/// Order in which multi-status records collapse to a single status.
using StatusPriority = std::array<OAStatus, 3>;

inline constexpr StatusPriority kDefaultPriority{OAStatus::Gold, OAStatus::Bronze,
                                                 OAStatus::Green};

/// Collapses a record's raw statuses to one: the first status of `priority`
/// present in the set, or Closed.
constexpr OAStatus resolve_status(StatusSet raw,
                                  const StatusPriority& priority = kDefaultPriority) {
  for (auto s : priority) {
    if (raw.contains(s)) return s;
  }
  return OAStatus::Closed;
}

/// Parses "gold,bronze,green" (any permutation of the three) into a priority.
inline StatusPriority parse_priority(std::string_view text) {
  StatusPriority out{};
  std::size_t n = 0;
  StatusSet seen;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    auto token = text.substr(pos, comma - pos);
    auto status = parse_open_status(token);
    if (!status || seen.contains(*status) || n == 3) {
      throw ConfigError("invalid priority '" + std::string(text) +
                        "': expected a permutation of gold,bronze,green");
    }
    seen.insert(*status);
    out[n++] = *status;
    pos = comma + 1;
  }
  if (n != 3) {
    throw ConfigError("invalid priority '" + std::string(text) +
                      "': expected a permutation of gold,bronze,green");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Records

enum class DocType : std::uint8_t { Article, Letter, Review, ConferenceProceeding };

inline std::string_view to_string(DocType d) {
  switch (d) {
    case DocType::Article: return "article";
    case DocType::Letter: return "letter";
    case DocType::Review: return "review";
    case DocType::ConferenceProceeding: return "proceeding";
  }
  return "article";
}

inline std::optional<DocType> parse_doc_type(std::string_view s) {
  if (s == "article") return DocType::Article;
  if (s == "letter") return DocType::Letter;
  if (s == "review") return DocType::Review;
  if (s == "proceeding") return DocType::ConferenceProceeding;
  return std::nullopt;
}

/// Inclusive range of publication years.
struct YearWindow {
  int first = 0;
  int last = 0;

  constexpr bool contains(int year) const { return year >= first && year <= last; }
  friend constexpr bool operator==(const YearWindow&, const YearWindow&) = default;
};

/// Parses "Y1:Y2" (or a single year "Y").
inline YearWindow parse_window(std::string_view text) {
  auto to_int = [&](std::string_view s) {
    if (s.empty()) throw ConfigError("invalid window '" + std::string(text) + "'");
    int v = 0;
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '-') {
      neg = true;
      i = 1;
    }
    if (i == s.size()) throw ConfigError("invalid window '" + std::string(text) + "'");
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') {
        throw ConfigError("invalid window '" + std::string(text) + "'");
      }
      v = v * 10 + (s[i] - '0');
    }
    return neg ? -v : v;
  };
  auto colon = text.find(':');
  YearWindow w;
  if (colon == std::string_view::npos) {
    w.first = w.last = to_int(text);
  } else {
    w.first = to_int(text.substr(0, colon));
    w.last = to_int(text.substr(colon + 1));
  }
  if (w.first > w.last) {
    throw ConfigError("invalid window '" + std::string(text) + "': start after end");
  }
  return w;
}

struct PublicationRecord {
  std::string id;
  int year = 0;
  DocType doc_type = DocType::Article;
  StatusSet raw_statuses;
  std::vector<std::string> subject_categories;  // non-empty, duplicate-free
  bool has_doi = false;
  std::vector<std::string> countries;     // duplicate-free
  std::vector<std::string> institutions;  // duplicate-free

  friend bool operator==(const PublicationRecord&, const PublicationRecord&) = default;
};

using Corpus = std::vector<PublicationRecord>;

// ---------------------------------------------------------------------------
// Classification

enum class Level : std::uint8_t { SubjectCategory = 0, OstDiscipline = 1, ErcSubfield = 2 };

inline constexpr std::array<Level, 3> kAllLevels{Level::SubjectCategory, Level::OstDiscipline,
                                                 Level::ErcSubfield};

inline std::string_view to_string(Level l) {
  switch (l) {
    case Level::SubjectCategory: return "subject-category";
    case Level::OstDiscipline: return "ost-discipline";
    case Level::ErcSubfield: return "erc-subfield";
  }
  return "subject-category";
}

inline std::optional<Level> parse_level(std::string_view s) {
  if (s == "subject-category") return Level::SubjectCategory;
  if (s == "ost-discipline") return Level::OstDiscipline;
  if (s == "erc-subfield") return Level::ErcSubfield;
  return std::nullopt;
}

namespace nomenclature {

struct Discipline {
  std::string_view name;
  std::string_view abbreviation;
};

/// The 11 OST disciplines with their short labels.
inline constexpr std::array<Discipline, 11> kOstDisciplines{{
    {"Applied biology - Ecology", "App. Bio. - Eco."},
    {"Fundamental biology", "Fund. bio."},
    {"Chemistry", "Chemistry"},
    {"Computer science", "Comp. Sc."},
    {"Mathematics", "Maths"},
    {"Physics", "Physics"},
    {"Medical research", "Medical R."},
    {"Engineering", "Engineering"},
    {"Earth sciences – Astronomy – Astrophysics", "Earth sc., Astro."},
    {"Humanities", "Humanities"},
    {"Social sciences", "Soc. Sc."},
}};

struct Subfield {
  std::string_view id;
  std::string_view wording;
};

/// ERC panels: 9 LS, 10 PE, 6 SH.
inline constexpr std::array<Subfield, 25> kErcSubfields{{
    {"SH1", "Individuals, Markets and Organizations"},
    {"SH2", "Institutions, Values, Environment and Space"},
    {"SH3", "The Social World, Diversity, Population"},
    {"SH4", "The Human Mind and Its Complexity"},
    {"SH5", "Cultures and Cultural Production"},
    {"SH6", "The Study of the Human Past"},
    {"PE1", "Mathematics"},
    {"PE2", "Fundamental Constituents of Matter"},
    {"PE3", "Condensed Matter Physics"},
    {"PE4", "Physical and Analytical Chemical Sciences"},
    {"PE5", "Synthetic Chemistry and Materials"},
    {"PE6", "Computer Science and Informatics"},
    {"PE7", "Systems and Communication Engineering"},
    {"PE8", "Products and Processes Engineering"},
    {"PE9", "Universe Sciences"},
    {"PE10", "Earth System Science"},
    {"LS1", "Molecular Biology, Biochemistry, Structural Biology and Molecular Biophysics"},
    {"LS2", "Genetics, 'Omics', Bioinformatics and Systems Biology"},
    {"LS3", "Cellular and Developmental Biology"},
    {"LS4", "Physiology, Pathophysiology and Endocrinology"},
    {"LS5", "Neuroscience and Neural Disorders"},
    {"LS6", "Immunity and Infection"},
    {"LS7", "Applied Medical Technologies, Diagnostics, Therapies and Public Health"},
    {"LS8", "Ecology, Evolution and Environmental Biology"},
    {"LS9", "Applied Life Sciences, Biotechnology, and Molecular and Biosystems Engineering"},
}};

/// Full discipline name for a name or abbreviation, if it is one of the 11.
inline std::optional<std::string_view> canonical_discipline(std::string_view s) {
  for (const auto& d : kOstDisciplines) {
    if (s == d.name || s == d.abbreviation) return d.name;
  }
  return std::nullopt;
}

inline bool is_erc_subfield(std::string_view s) {
  for (const auto& f : kErcSubfields) {
    if (s == f.id) return true;
  }
  return false;
}

}  // namespace nomenclature

/// Maps each subject category to exactly one OST discipline and one ERC
/// sub-field. Fields at every level get dense indices in order of first
/// appearance so the engine can aggregate without string keys.
class ClassificationRegistry {
 public:
  /// Adds one mapping. Throws DuplicateCategory if the category is known.
  void add(std::string category, std::string ost_discipline, std::string erc_subfield) {
    if (index_.contains(category)) {
      throw DuplicateCategory("duplicate subject category '" + category + "'");
    }
    const auto ci = categories_.size();
    Entry e;
    e.field[0] = ci;
    e.field[1] = intern(Level::OstDiscipline, std::move(ost_discipline));
    e.field[2] = intern(Level::ErcSubfield, std::move(erc_subfield));
    index_.emplace(category, ci);
    fields_[0].push_back(category);
    categories_.push_back(e);
  }

  std::size_t size() const noexcept { return categories_.size(); }
  bool empty() const noexcept { return categories_.empty(); }
  bool contains(std::string_view category) const { return find(category).has_value(); }

  std::optional<std::size_t> find(std::string_view category) const {
    auto it = index_.find(category);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Dense field index of a category (by index) at a level.
  std::size_t field_of(std::size_t category_index, Level level) const {
    return categories_[category_index].field[static_cast<std::size_t>(level)];
  }

  /// All field ids at a level, indexed by dense field index.
  const std::vector<std::string>& fields(Level level) const {
    return fields_[static_cast<std::size_t>(level)];
  }

  const std::vector<std::string>& categories() const { return fields_[0]; }
  const std::vector<std::string>& ost_disciplines() const { return fields_[1]; }
  const std::vector<std::string>& erc_subfields() const { return fields_[2]; }

  /// Field id of `category` at `level`; identity at SubjectCategory.
  const std::string& classify(std::string_view category, Level level) const {
    auto ci = find(category);
    if (!ci) throw UnknownCategory("unknown subject category '" + std::string(category) + "'");
    return fields(level)[field_of(*ci, level)];
  }

 private:
  struct Entry {
    std::array<std::size_t, 3> field{};
  };

  std::size_t intern(Level level, std::string id) {
    const auto l = static_cast<std::size_t>(level);
    auto [it, inserted] = field_index_[l].try_emplace(id, fields_[l].size());
    if (inserted) fields_[l].push_back(std::move(id));
    return it->second;
  }

  StringMap<std::size_t> index_;
  std::vector<Entry> categories_;
  std::array<std::vector<std::string>, 3> fields_;
  std::array<StringMap<std::size_t>, 3> field_index_;
};

/// Convenience wrapper over ClassificationRegistry::classify.
inline const std::string& classify(const ClassificationRegistry& registry,
                                   std::string_view category, Level level) {
  return registry.classify(category, level);
}

// ---------------------------------------------------------------------------
// Actors

enum class ActorKind : std::uint8_t { Country, Institution };

inline std::string_view to_string(ActorKind k) {
  return k == ActorKind::Country ? "country" : "institution";
}

inline std::optional<ActorKind> parse_actor_kind(std::string_view s) {
  if (s == "country") return ActorKind::Country;
  if (s == "institution") return ActorKind::Institution;
  return std::nullopt;
}

enum class InstitutionGroup : std::uint8_t { G1, G2, G3 };

inline std::string_view to_string(InstitutionGroup g) {
  switch (g) {
    case InstitutionGroup::G1: return "G1";
    case InstitutionGroup::G2: return "G2";
    case InstitutionGroup::G3: return "G3";
  }
  return "G1";
}

inline std::optional<InstitutionGroup> parse_group(std::string_view s) {
  if (s == "G1") return InstitutionGroup::G1;
  if (s == "G2") return InstitutionGroup::G2;
  if (s == "G3") return InstitutionGroup::G3;
  return std::nullopt;
}

struct Actor {
  std::string id;
  ActorKind kind = ActorKind::Country;
  std::optional<InstitutionGroup> group;  // institutions only
  std::string display_name;

  friend bool operator==(const Actor&, const Actor&) = default;
};

/// Actor metadata keyed by id. Only used for display names and report
/// filters; never enters the computation.
class ActorRegistry {
 public:
  void add(Actor actor) {
    if (actor.group && actor.kind != ActorKind::Institution) {
      throw DataError("actor '" + actor.id + "': group is only allowed for institutions");
    }
    auto id = actor.id;
    if (!actors_.try_emplace(std::move(id), std::move(actor)).second) {
      throw DataError("duplicate actor id '" + actor.id + "'");
    }
  }

  const Actor* find(std::string_view id) const {
    auto it = actors_.find(id);
    return it == actors_.end() ? nullptr : &it->second;
  }

  std::size_t size() const noexcept { return actors_.size(); }

 private:
  StringMap<Actor> actors_;
};

/// The actor list of a record for the requested kind.
inline const std::vector<std::string>& actors_of(const PublicationRecord& r, ActorKind kind) {
  return kind == ActorKind::Country ? r.countries : r.institutions;
}

}  // namespace noai
