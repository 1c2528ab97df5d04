#pragma once

// Test-only helpers: a naive per-publication oracle that shares no code with
// the engine, and a random corpus generator independent of noai::synth.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "noai/model.hpp"

namespace noai::tsup {

struct Mapping {
  std::string category;
  std::string ost;
  std::string erc;
};

inline ClassificationRegistry registry_from(const std::vector<Mapping>& mappings) {
  ClassificationRegistry reg;
  for (const auto& m : mappings) reg.add(m.category, m.ost, m.erc);
  return reg;
}

/// Status resolution written out longhand.
inline OAStatus oracle_status(const StatusSet& s, const StatusPriority& p) {
  if (s.contains(p[0])) return p[0];
  if (s.contains(p[1])) return p[1];
  if (s.contains(p[2])) return p[2];
  return OAStatus::Closed;
}

struct OracleCell {
  long double x = 0, oa = 0, gold = 0, bronze = 0, green = 0;
};

struct OracleResult {
  std::map<std::pair<std::string, std::string>, OracleCell> cells;  // (actor, field)
  std::map<std::string, OracleCell> world;
  std::map<std::string, std::size_t> pubs_whole, oa_whole;
  std::size_t n_records = 0;
};

inline std::string oracle_field(const std::vector<Mapping>& mappings, const std::string& category,
                                Level level) {
  for (const auto& m : mappings) {
    if (m.category == category) {
      if (level == Level::SubjectCategory) return m.category;
      return level == Level::OstDiscipline ? m.ost : m.erc;
    }
  }
  return {};
}

/// Brute force: for every (actor, field) pair walk every record.
inline OracleResult oracle_aggregate(const std::vector<Mapping>& mappings, const Corpus& corpus,
                                     Level level, ActorKind kind,
                                     std::optional<YearWindow> window = std::nullopt,
                                     const StatusPriority& priority = kDefaultPriority) {
  OracleResult out;
  std::set<std::string> actors, fields;
  for (const auto& m : mappings) fields.insert(oracle_field(mappings, m.category, level));
  auto in_window = [&](const PublicationRecord& r) {
    return !window || (r.year >= window->first && r.year <= window->last);
  };
  for (const auto& r : corpus) {
    if (!in_window(r)) continue;
    ++out.n_records;
    for (const auto& a : (kind == ActorKind::Country ? r.countries : r.institutions)) actors.insert(a);
  }
  auto contribution = [&](const PublicationRecord& r, const std::string& f) {
    long double m = 0;
    for (const auto& c : r.subject_categories) {
      if (oracle_field(mappings, c, level) == f) m += 1;
    }
    return m / static_cast<long double>(r.subject_categories.size());
  };
  auto add = [&](OracleCell& cell, const PublicationRecord& r, long double w) {
    cell.x += w;
    switch (oracle_status(r.raw_statuses, priority)) {
      case OAStatus::Gold: cell.oa += w; cell.gold += w; break;
      case OAStatus::Bronze: cell.oa += w; cell.bronze += w; break;
      case OAStatus::Green: cell.oa += w; cell.green += w; break;
      case OAStatus::Closed: break;
    }
  };
  for (const auto& f : fields) {
    for (const auto& r : corpus) {
      if (!in_window(r)) continue;
      const auto w = contribution(r, f);
      if (w > 0) add(out.world[f], r, w);
    }
  }
  for (const auto& a : actors) {
    for (const auto& r : corpus) {
      if (!in_window(r)) continue;
      const auto& list = kind == ActorKind::Country ? r.countries : r.institutions;
      if (std::find(list.begin(), list.end(), a) == list.end()) continue;
      ++out.pubs_whole[a];
      if (oracle_status(r.raw_statuses, priority) != OAStatus::Closed) ++out.oa_whole[a];
      for (const auto& f : fields) {
        const auto w = contribution(r, f);
        if (w > 0) add(out.cells[{a, f}], r, w);
      }
    }
  }
  return out;
}

inline std::optional<double> oracle_normalized(const OracleResult& o, const std::string& actor,
                                               const std::string& field) {
  auto c = o.cells.find({actor, field});
  auto w = o.world.find(field);
  if (c == o.cells.end() || w == o.world.end()) return std::nullopt;
  if (c->second.x <= 0 || w->second.x <= 0 || w->second.oa <= 0) return std::nullopt;
  return static_cast<double>((c->second.oa / c->second.x) / (w->second.oa / w->second.x));
}

inline std::optional<double> oracle_noai(const OracleResult& o, const std::string& actor) {
  long double num = 0, den = 0;
  for (const auto& [key, cell] : o.cells) {
    if (key.first != actor) continue;
    auto s = oracle_normalized(o, actor, key.second);
    if (!s) continue;
    num += static_cast<long double>(*s) * cell.x;
    den += cell.x;
  }
  if (den <= 0) return std::nullopt;
  return static_cast<double>(num / den);
}

/// World seen as a single actor.
inline std::optional<double> oracle_world_noai(const OracleResult& o) {
  long double num = 0, den = 0;
  for (const auto& [f, cell] : o.world) {
    if (cell.x <= 0 || cell.oa <= 0) continue;
    const long double s = (cell.oa / cell.x) / (cell.oa / cell.x);
    num += s * cell.x;
    den += cell.x;
  }
  if (den <= 0) return std::nullopt;
  return static_cast<double>(num / den);
}

/// Average ranks by counting, O(n^2).
inline std::vector<double> oracle_average_ranks(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) less += 1;
      if (w == v[i]) equal += 1;
    }
    out[i] = less + (equal + 1) / 2;
  }
  return out;
}

/// Textbook Spearman: 1 - 6 sum d^2 / (n(n^2-1)) without ties, the
/// tie-corrected sum-of-squares form otherwise.
inline double textbook_spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = oracle_average_ranks(a);
  const auto rb = oracle_average_ranks(b);
  const long double n = static_cast<long double>(a.size());
  long double d2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  auto tie_term = [](const std::vector<double>& v) {
    std::map<double, long double> groups;
    for (double x : v) groups[x] += 1;
    long double t = 0;
    for (const auto& [value, count] : groups) t += (count * count * count - count) / 12;
    return t;
  };
  const long double ta = tie_term(a), tb = tie_term(b);
  if (ta == 0 && tb == 0) return static_cast<double>(1 - 6 * d2 / (n * (n * n - 1)));
  const long double sa = (n * n * n - n) / 12 - ta;
  const long double sb = (n * n * n - n) / 12 - tb;
  return static_cast<double>((sa + sb - d2) / (2 * std::sqrt(sa * sb)));
}

struct RandomCorpus {
  std::vector<Mapping> mappings;
  Corpus corpus;
};

/// Arbitrary records: 1-4 categories, 0-4 countries, 0-3 institutions,
/// any subset of statuses.
inline RandomCorpus random_corpus(std::mt19937_64& rng, std::size_t n_records, std::size_t n_fields,
                                  std::size_t n_actors) {
  RandomCorpus rc;
  const std::size_t n_disc = std::max<std::size_t>(1, n_fields / 3);
  const std::size_t n_erc = std::max<std::size_t>(1, n_fields / 2);
  std::uniform_int_distribution<std::size_t> disc(0, n_disc - 1), erc(0, n_erc - 1);
  for (std::size_t i = 0; i < n_fields; ++i) {
    rc.mappings.push_back({"SC" + std::to_string(i), "D" + std::to_string(disc(rng)),
                           "E" + std::to_string(erc(rng))});
  }
  // Field-dependent openness so normalization matters.
  std::vector<double> openness(n_fields);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& p : openness) p = 0.05 + 0.6 * unit(rng);

  std::uniform_int_distribution<std::size_t> field(0, n_fields - 1), actor(0, n_actors - 1);
  std::uniform_int_distribution<int> ncat(1, 4), nctry(0, 4), ninst(0, 3), year(2010, 2019);
  for (std::size_t i = 0; i < n_records; ++i) {
    PublicationRecord r;
    r.id = "R" + std::to_string(i);
    r.year = year(rng);
    r.doc_type = static_cast<DocType>(rng() % 4);
    r.has_doi = unit(rng) < 0.9;
    const int k = ncat(rng);
    std::size_t first = field(rng);
    r.subject_categories.push_back(rc.mappings[first].category);
    for (int c = 1; c < k; ++c) {
      const auto& cat = rc.mappings[field(rng)].category;
      if (std::find(r.subject_categories.begin(), r.subject_categories.end(), cat) ==
          r.subject_categories.end()) {
        r.subject_categories.push_back(cat);
      }
    }
    if (unit(rng) < openness[first]) {
      r.raw_statuses = StatusSet::from_bits(static_cast<std::uint8_t>(1 + rng() % 7));
    }
    const int nc = nctry(rng), ni = ninst(rng);
    for (int c = 0; c < nc; ++c) {
      auto id = "C" + std::to_string(actor(rng));
      if (std::find(r.countries.begin(), r.countries.end(), id) == r.countries.end()) {
        r.countries.push_back(id);
      }
    }
    for (int c = 0; c < ni; ++c) {
      auto id = "I" + std::to_string(actor(rng));
      if (std::find(r.institutions.begin(), r.institutions.end(), id) == r.institutions.end()) {
        r.institutions.push_back(id);
      }
    }
    rc.corpus.push_back(std::move(r));
  }
  return rc;
}

/// Worked example record: three categories, two disciplines, two countries.
inline std::vector<Mapping> worked_mappings() {
  return {{"Medical Informatics", "Computer science", "LS7"},
          {"Computer Science, Information Systems", "Computer science", "PE6"},
          {"Health Care Sciences & Services", "Medical research", "LS7"}};
}

inline PublicationRecord worked_record() {
  PublicationRecord r;
  r.id = "T2";
  r.year = 2016;
  r.doc_type = DocType::Article;
  r.subject_categories = {"Medical Informatics", "Computer Science, Information Systems",
                          "Health Care Sciences & Services"};
  r.has_doi = true;
  r.countries = {"FRA", "NLD"};
  return r;
}

}  // namespace noai::tsup
