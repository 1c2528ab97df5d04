#pragma once

// Deterministic synthetic corpora with per-field OA rates and actor
// specialization profiles.
//
// Every record i draws from its own counter-based stream, so any index range
// can be produced independently and the output never depends on how the work
// is split. Stream construction (SplitMix64 finalizer, constants below):
//
//   key(i)   = mix(mix(seed) ^ (i * 0x9E3779B97F4A7C15 + 0xD1B54A32D192ED03))
//   draw(c)  = mix(key(i) + (c + 1) * 0x9E3779B97F4A7C15), c = 0, 1, 2, ...
//   uniform  = (draw >> 11) * 2^-53
//
//   mix(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//           z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31.
//
// The OA status of a record follows the profile of its first category at the
// record's year. A multi-status record adds one status of lower priority than
// the drawn one, so resolution reproduces the profile exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "noai/error.hpp"
#include "noai/ingest.hpp"
#include "noai/model.hpp"

namespace noai::synth {

struct FieldSpec {
  std::string subject_category;
  std::string ost_discipline;
  std::string erc_subfield;
  double p_gold = 0.0;
  double p_bronze = 0.0;
  double p_green = 0.0;
  double gold_trend = 0.0;  // added to p_gold per year after years.first
};

struct ActorSpec {
  std::string id;
  ActorKind kind = ActorKind::Country;
  std::vector<double> weights;  // over SynthSpec::fields, sums to 1
  double volume = 1.0;          // relative expected output
};

struct SynthSpec {
  std::uint64_t seed = 0;
  YearWindow years{2015, 2017};
  std::size_t n_records = 0;
  std::vector<FieldSpec> fields;
  std::vector<ActorSpec> actors;
  double multi_category_rate = 0.0;  // record gets 2 or 3 categories
  double multi_status_rate = 0.0;    // OA record carries a second status
  double co_actor_rate = 0.0;        // a second actor is added
  double no_actor_rate = 0.0;        // record lists no actor at all
  double doi_rate = 1.0;
  std::array<double, 4> doc_type_mix{0.80, 0.05, 0.10, 0.05};  // article, letter, review, proceeding
  std::string id_prefix = "S";
};

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ull;

constexpr std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

/// Counter-based stream for one record index.
class RecordStream {
 public:
  constexpr RecordStream(std::uint64_t seed, std::uint64_t index)
      : key_(mix(mix(seed) ^ (index * kGolden + kStreamSalt))) {}

  constexpr std::uint64_t next() { return mix(key_ + (++counter_) * kGolden); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }

  /// Index drawn proportionally to `weights` (which need not be normalized).
  std::size_t pick(const std::vector<double>& weights, double total) {
    const double u = uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      acc += weights[i];
      last_positive = i;
      if (u < acc) return i;
    }
    return last_positive;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline std::array<double, 3> profile_at(const FieldSpec& f, int year, int first_year) {
  return {f.p_gold + f.gold_trend * static_cast<double>(year - first_year), f.p_bronze, f.p_green};
}

inline void validate(const SynthSpec& spec) {
  auto prob = [](double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidSpec(what + " must be a probability in [0,1]");
  };
  if (spec.years.first > spec.years.last) throw InvalidSpec("years: start after end");
  if (spec.n_records > 0 && spec.fields.empty()) throw InvalidSpec("at least one field is required");
  std::unordered_set<std::string> cats;
  for (const auto& f : spec.fields) {
    if (f.subject_category.empty() || f.ost_discipline.empty() || f.erc_subfield.empty()) {
      throw InvalidSpec("field with empty identifier");
    }
    if (!cats.insert(f.subject_category).second) {
      throw InvalidSpec("duplicate subject category '" + f.subject_category + "'");
    }
    for (int y = spec.years.first; y <= spec.years.last; ++y) {
      const auto p = profile_at(f, y, spec.years.first);
      for (double v : p) prob(v, "OA probability of '" + f.subject_category + "'");
      if (p[0] + p[1] + p[2] > 1.0 + 1e-12) {
        throw InvalidSpec("OA probabilities of '" + f.subject_category + "' sum above 1 in " +
                          std::to_string(y));
      }
    }
  }
  std::unordered_set<std::string> ids;
  for (const auto& a : spec.actors) {
    if (a.id.empty()) throw InvalidSpec("actor with empty id");
    if (!ids.insert(a.id).second) throw InvalidSpec("duplicate actor '" + a.id + "'");
    if (a.weights.size() != spec.fields.size()) {
      throw InvalidSpec("actor '" + a.id + "': one weight per field is required");
    }
    double sum = 0.0;
    for (double w : a.weights) {
      prob(w, "weight of actor '" + a.id + "'");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidSpec("weights of actor '" + a.id + "' must sum to 1");
    if (!(a.volume > 0.0) || !std::isfinite(a.volume)) {
      throw InvalidSpec("actor '" + a.id + "': volume must be positive");
    }
  }
  prob(spec.multi_category_rate, "multi_category_rate");
  prob(spec.multi_status_rate, "multi_status_rate");
  prob(spec.co_actor_rate, "co_actor_rate");
  prob(spec.no_actor_rate, "no_actor_rate");
  prob(spec.doi_rate, "doi_rate");
  double mix_sum = 0.0;
  for (double p : spec.doc_type_mix) {
    prob(p, "doc_types");
    mix_sum += p;
  }
  if (!(mix_sum > 0.0)) throw InvalidSpec("doc_types: at least one type needs weight");
}

/// Record `index` of the corpus described by `spec` (spec must be valid).
inline PublicationRecord generate_record(const SynthSpec& spec, std::size_t index) {
  RecordStream rng(spec.seed, index);
  PublicationRecord r;
  {
    std::string digits = std::to_string(index);
    if (digits.size() < 8) digits.insert(0, 8 - digits.size(), '0');
    r.id = spec.id_prefix + digits;
  }
  const auto span = static_cast<std::uint64_t>(spec.years.last - spec.years.first + 1);
  r.year = spec.years.first + static_cast<int>(rng.next() % span);

  const std::vector<double> doc_weights(spec.doc_type_mix.begin(), spec.doc_type_mix.end());
  r.doc_type = static_cast<DocType>(
      rng.pick(doc_weights, doc_weights[0] + doc_weights[1] + doc_weights[2] + doc_weights[3]));
  r.has_doi = rng.bernoulli(spec.doi_rate);

  // actors
  std::optional<std::size_t> lead;
  const bool no_actor = rng.bernoulli(spec.no_actor_rate);
  std::vector<double> volumes;
  double volume_total = 0.0;
  for (const auto& a : spec.actors) {
    volumes.push_back(a.volume);
    volume_total += a.volume;
  }
  if (!no_actor && !spec.actors.empty()) {
    lead = rng.pick(volumes, volume_total);
    std::vector<std::size_t> chosen{*lead};
    if (rng.bernoulli(spec.co_actor_rate)) {
      const auto co = rng.pick(volumes, volume_total);
      if (co != *lead) chosen.push_back(co);
    }
    for (auto ai : chosen) {
      const auto& a = spec.actors[ai];
      (a.kind == ActorKind::Country ? r.countries : r.institutions).push_back(a.id);
    }
  }

  // categories
  std::vector<double> field_weights;
  if (lead) {
    field_weights = spec.actors[*lead].weights;
  } else {
    field_weights.assign(spec.fields.size(), 1.0);
  }
  double fw_total = 0.0;
  for (double w : field_weights) fw_total += w;
  const auto primary = rng.pick(field_weights, fw_total);
  std::vector<std::size_t> cats{primary};
  if (rng.bernoulli(spec.multi_category_rate)) {
    const std::size_t extra = 1 + static_cast<std::size_t>(rng.next() % 2);
    for (std::size_t e = 0; e < extra; ++e) {
      for (int attempt = 0; attempt < 16; ++attempt) {
        const auto c = rng.pick(field_weights, fw_total);
        if (std::find(cats.begin(), cats.end(), c) == cats.end()) {
          cats.push_back(c);
          break;
        }
      }
    }
  }
  for (auto c : cats) r.subject_categories.push_back(spec.fields[c].subject_category);

  // status
  const auto p = profile_at(spec.fields[primary], r.year, spec.years.first);
  const double u = rng.uniform();
  OAStatus drawn = OAStatus::Closed;
  if (u < p[0]) {
    drawn = OAStatus::Gold;
  } else if (u < p[0] + p[1]) {
    drawn = OAStatus::Bronze;
  } else if (u < p[0] + p[1] + p[2]) {
    drawn = OAStatus::Green;
  }
  if (drawn != OAStatus::Closed) {
    r.raw_statuses.insert(drawn);
    if (rng.bernoulli(spec.multi_status_rate)) {
      if (drawn == OAStatus::Gold) {
        r.raw_statuses.insert(rng.bernoulli(0.5) ? OAStatus::Bronze : OAStatus::Green);
      } else if (drawn == OAStatus::Bronze) {
        r.raw_statuses.insert(OAStatus::Green);
      }
    }
  }
  return r;
}

/// Records [begin, end) of the corpus.
inline Corpus generate_range(const SynthSpec& spec, std::size_t begin, std::size_t end) {
  validate(spec);
  Corpus out;
  if (end > begin) out.reserve(end - begin);
  for (auto i = begin; i < end; ++i) out.push_back(generate_record(spec, i));
  return out;
}

inline Corpus generate(const SynthSpec& spec) { return generate_range(spec, 0, spec.n_records); }

/// Streams the corpus file without materializing it.
inline void generate(const SynthSpec& spec, std::ostream& out) {
  validate(spec);
  for (std::size_t i = 0; i < spec.n_records; ++i) out << to_json_line(generate_record(spec, i)) << '\n';
}

inline ClassificationRegistry make_registry(const SynthSpec& spec) {
  ClassificationRegistry reg;
  for (const auto& f : spec.fields) reg.add(f.subject_category, f.ost_discipline, f.erc_subfield);
  return reg;
}

// ---------------------------------------------------------------------------
// Spec files (JSON)

namespace detail {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidSpec(std::string("bad value for '") + key + "'");
  }
}

}  // namespace detail

inline SynthSpec parse_spec(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidSpec("spec must be a JSON object");
  SynthSpec s;
  s.seed = detail::get_or<std::uint64_t>(j, "seed", 0);
  s.n_records = detail::get_or<std::size_t>(j, "n_records", 0);
  if (auto it = j.find("years"); it != j.end()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
        !(*it)[1].is_number_integer()) {
      throw InvalidSpec("'years' must be [first, last]");
    }
    s.years = {(*it)[0].get<int>(), (*it)[1].get<int>()};
  }
  s.multi_category_rate = detail::get_or(j, "multi_category_rate", 0.0);
  s.multi_status_rate = detail::get_or(j, "multi_status_rate", 0.0);
  s.co_actor_rate = detail::get_or(j, "co_actor_rate", 0.0);
  s.no_actor_rate = detail::get_or(j, "no_actor_rate", 0.0);
  s.doi_rate = detail::get_or(j, "doi_rate", 1.0);
  s.id_prefix = detail::get_or<std::string>(j, "id_prefix", "S");
  if (auto it = j.find("doc_types"); it != j.end()) {
    if (!it->is_object()) throw InvalidSpec("'doc_types' must be an object");
    s.doc_type_mix = {0, 0, 0, 0};
    for (const auto& [name, w] : it->items()) {
      auto dt = parse_doc_type(name);
      if (!dt || !w.is_number()) throw InvalidSpec("bad doc_types entry '" + name + "'");
      s.doc_type_mix[static_cast<std::size_t>(*dt)] = w.get<double>();
    }
  }

  auto fields = j.find("fields");
  if (fields == j.end() || !fields->is_array()) throw InvalidSpec("'fields' array is required");
  for (const auto& f : *fields) {
    if (!f.is_object()) throw InvalidSpec("field entries must be objects");
    FieldSpec fs;
    fs.subject_category = detail::get_or<std::string>(f, "subject_category", "");
    fs.ost_discipline = detail::get_or<std::string>(f, "ost_discipline", "");
    fs.erc_subfield = detail::get_or<std::string>(f, "erc_subfield", "");
    if (auto oa = f.find("oa"); oa != f.end()) {
      fs.p_gold = detail::get_or(*oa, "gold", 0.0);
      fs.p_bronze = detail::get_or(*oa, "bronze", 0.0);
      fs.p_green = detail::get_or(*oa, "green", 0.0);
    }
    fs.gold_trend = detail::get_or(f, "gold_trend", 0.0);
    s.fields.push_back(std::move(fs));
  }

  if (auto actors = j.find("actors"); actors != j.end()) {
    if (!actors->is_array()) throw InvalidSpec("'actors' must be an array");
    for (const auto& a : *actors) {
      ActorSpec as;
      as.id = detail::get_or<std::string>(a, "id", "");
      auto kind = parse_actor_kind(detail::get_or<std::string>(a, "kind", "country"));
      if (!kind) throw InvalidSpec("actor '" + as.id + "': bad kind");
      as.kind = *kind;
      as.volume = detail::get_or(a, "volume", 1.0);
      auto w = a.find("weights");
      if (w == a.end()) throw InvalidSpec("actor '" + as.id + "': 'weights' is required");
      if (w->is_array()) {
        for (const auto& v : *w) {
          if (!v.is_number()) throw InvalidSpec("actor '" + as.id + "': weights must be numbers");
          as.weights.push_back(v.get<double>());
        }
      } else if (w->is_object()) {
        as.weights.assign(s.fields.size(), 0.0);
        for (const auto& [cat, v] : w->items()) {
          auto pos = std::find_if(s.fields.begin(), s.fields.end(),
                                  [&](const FieldSpec& f) { return f.subject_category == cat; });
          if (pos == s.fields.end() || !v.is_number()) {
            throw InvalidSpec("actor '" + as.id + "': bad weight for '" + cat + "'");
          }
          as.weights[static_cast<std::size_t>(pos - s.fields.begin())] = v.get<double>();
        }
      } else {
        throw InvalidSpec("actor '" + as.id + "': weights must be an array or object");
      }
      // Files may give relative weights.
      double sum = 0.0;
      bool non_negative = true;
      for (double v : as.weights) {
        sum += v;
        non_negative = non_negative && v >= 0.0;
      }
      if (non_negative && sum > 0.0) {
        for (double& v : as.weights) v /= sum;
      }
      s.actors.push_back(std::move(as));
    }
  }
  validate(s);
  return s;
}

inline SynthSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open spec file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidSpec(std::string("spec is not valid JSON: ") + e.what());
  }
  return parse_spec(j);
}

}  // namespace noai::synth
