// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and size limits are pinned below.

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "noai/cli.hpp"
#include "noai/noai.hpp"
#include "support.hpp"

using namespace noai;
namespace fs = std::filesystem;

namespace {

constexpr double kExactTol = 1e-12;
constexpr double kOracleTol = 1e-9;
constexpr double kSpearmanTol = 1e-12;
constexpr double kAc1Seconds = 1.0;
constexpr double kAc3Seconds = 30.0;
constexpr double kAc10Seconds = 60.0;
constexpr double kAc10MaxBytes = 2.0 * 1024 * 1024 * 1024;
constexpr std::size_t kAc10Records = 1'000'000;

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

void near(double a, double b, double tol, const std::string& what) {
  if (!(std::fabs(a - b) <= tol)) {
    std::ostringstream ss;
    ss.precision(17);
    ss << what << ": " << a << " vs " << b;
    throw Failure{ss.str()};
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Synthetic spec with a registry spanning all three levels.
synth::SynthSpec random_spec(std::uint64_t seed, std::size_t n_records, std::size_t n_fields,
                             std::size_t n_actors) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  synth::SynthSpec s;
  s.seed = seed;
  s.n_records = n_records;
  s.years = {2012, 2017};
  s.multi_category_rate = 0.35;
  s.multi_status_rate = 0.2;
  s.co_actor_rate = 0.3;
  s.no_actor_rate = 0.05;
  for (std::size_t f = 0; f < n_fields; ++f) {
    synth::FieldSpec fs;
    fs.subject_category = "Cat" + std::to_string(f);
    fs.ost_discipline = std::string(nomenclature::kOstDisciplines[f % 11].name);
    fs.erc_subfield = std::string(nomenclature::kErcSubfields[(f * 7) % 25].id);
    fs.p_gold = 0.4 * u(rng);
    fs.p_bronze = 0.15 * u(rng);
    fs.p_green = 0.15 * u(rng);
    fs.gold_trend = 0.01 * u(rng);
    s.fields.push_back(fs);
  }
  for (std::size_t a = 0; a < n_actors; ++a) {
    synth::ActorSpec as;
    as.id = "C" + std::to_string(a);
    for (std::size_t f = 0; f < n_fields; ++f) as.weights.push_back(u(rng) < 0.3 ? 0.0 : u(rng));
    as.weights[a % n_fields] += 1.0;
    double sum = 0;
    for (double w : as.weights) sum += w;
    for (double& w : as.weights) w /= sum;
    as.volume = 0.5 + 2.0 * u(rng);
    s.actors.push_back(as);
  }
  return s;
}

/// Sum of world x equals the record count; per-actor type shares add up.
void check_conservation(const Corpus& corpus, const ClassificationRegistry& reg, Level level) {
  auto agg = aggregate(corpus, reg, {level, ActorKind::Country});
  CompensatedSum total;
  for (const auto& b : agg.world.all()) total += b.x;
  near(total.value(), static_cast<double>(corpus.size()), kOracleTol, "sum of world x");
  for (const auto& t : type_breakdown(agg)) {
    near(t.gold + t.bronze + t.green, t.total, kOracleTol, "type shares of " + t.actor);
  }
}

void ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto reg = tsup::registry_from(tsup::worked_mappings());
  const auto rec = tsup::worked_record();
  auto sc = field_fractions(rec, reg, Level::SubjectCategory);
  require(sc.entries.size() == 3, "three category fractions");
  for (const auto& [f, w] : sc.entries) near(w, 1.0 / 3.0, kExactTol, "fraction of " + f);
  auto ost = field_fractions(rec, reg, Level::OstDiscipline);
  require(ost.entries.size() == 2, "two discipline fractions");
  near(ost.weight("Computer science"), 2.0 / 3.0, kExactTol, "Computer science");
  near(ost.weight("Medical research"), 1.0 / 3.0, kExactTol, "Medical research");
  for (auto level : {Level::SubjectCategory, Level::OstDiscipline}) {
    auto agg = aggregate({rec}, reg, {level, ActorKind::Country});
    require(agg.actors.size() == 2, "two countries credited");
    const auto fv = field_fractions(rec, reg, level);
    for (const auto& c : agg.cells) near(c.x, fv.weight(c.field) * 1.0, kExactTol, c.actor + "/" + c.field);
  }
  require(seconds_since(t0) < kAc1Seconds, "runtime");
}

void ac2() {
  for (unsigned bits = 0; bits < 8; ++bits) {
    auto set = StatusSet::from_bits(static_cast<std::uint8_t>(bits));
    OAStatus expected = OAStatus::Closed;
    if (bits & (1u << static_cast<unsigned>(OAStatus::Green))) expected = OAStatus::Green;
    if (bits & (1u << static_cast<unsigned>(OAStatus::Bronze))) expected = OAStatus::Bronze;
    if (bits & (1u << static_cast<unsigned>(OAStatus::Gold))) expected = OAStatus::Gold;
    require(resolve_status(set) == expected, "subset " + std::to_string(bits));
  }
}

void ac3() {
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    auto spec = random_spec(1000 + trial, 1000, 24, 15);
    const auto corpus = synth::generate(spec);
    const auto reg = synth::make_registry(spec);
    for (auto level : kAllLevels) {
      auto agg = aggregate(corpus, reg, {level, ActorKind::Country});
      near(compute_noai(world_as_actor(agg), agg.world).value, 1.0, kOracleTol,
           "world NOAI, trial " + std::to_string(trial));
      check_conservation(corpus, reg, level);
    }
  }
  require(seconds_since(t0) < kAc3Seconds, "runtime " + std::to_string(seconds_since(t0)) + " s");
}

void ac4() {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    auto rc = tsup::random_corpus(rng, 1000, 10, 20);
    const auto reg = tsup::registry_from(rc.mappings);
    const auto tag = " (trial " + std::to_string(trial) + ")";
    for (auto level : kAllLevels) {
      check_conservation(rc.corpus, reg, level);
      auto agg = aggregate(rc.corpus, reg, {level, ActorKind::Country});
      auto o = tsup::oracle_aggregate(rc.mappings, rc.corpus, level, ActorKind::Country);
      require(agg.cells.size() == o.cells.size(), "cell count" + tag);
      for (const auto& c : agg.cells) {
        const auto& oc = o.cells.at({c.actor, c.field});
        near(c.x, static_cast<double>(oc.x), kOracleTol, "x" + tag);
        near(c.oa, static_cast<double>(oc.oa), kOracleTol, "oa" + tag);
        auto ns = normalized_share(c, *agg.world.find(c.field)).value;
        auto ons = tsup::oracle_normalized(o, c.actor, c.field);
        require(ns.has_value() == ons.has_value(), "normalized share definedness" + tag);
        if (ns) near(*ns, *ons, kOracleTol, "normalized share" + tag);
      }
      auto tb = type_breakdown(agg);
      for (std::size_t i = 0; i < agg.actors.size(); ++i) {
        const auto& a = agg.actors[i];
        long double x = 0, oa = 0, g = 0, b = 0, gr = 0;
        for (const auto& [key, c] : o.cells) {
          if (key.first != a.actor) continue;
          x += c.x;
          oa += c.oa;
          g += c.gold;
          b += c.bronze;
          gr += c.green;
        }
        near(oa_share(a), static_cast<double>(100 * oa / x), kOracleTol, "share" + tag);
        near(tb[i].gold, static_cast<double>(100 * g / x), kOracleTol, "gold" + tag);
        near(tb[i].bronze, static_cast<double>(100 * b / x), kOracleTol, "bronze" + tag);
        near(tb[i].green, static_cast<double>(100 * gr / x), kOracleTol, "green" + tag);
        auto on = tsup::oracle_noai(o, a.actor);
        if (on) {
          near(compute_noai(agg.cells_of(a), agg.world).value, *on, kOracleTol, "NOAI" + tag);
        } else {
          bool threw = false;
          try {
            compute_noai(agg.cells_of(a), agg.world);
          } catch (const UndefinedIndicator&) {
            threw = true;
          }
          require(threw, "undefined NOAI" + tag);
        }
      }
    }
  }
}

void ac5() {
  // Per-trial checks run inside AC3/AC4; here a 10^6-record corpus.
  auto spec = random_spec(5, kAc10Records, 40, 30);
  const auto corpus = synth::generate(spec);
  const auto reg = synth::make_registry(spec);
  check_conservation(corpus, reg, Level::OstDiscipline);
}

void ac6() {
  std::mt19937_64 rng(6);
  auto table = [](const std::vector<double>& v) {
    std::vector<std::pair<std::string, double>> pairs;
    for (std::size_t i = 0; i < v.size(); ++i) pairs.emplace_back("a" + std::to_string(i), v[i]);
    return rank_values(pairs);
  };
  for (std::size_t n = 2; n <= 200; ++n) {
    for (bool ties : {false, true}) {
      std::vector<double> a(n), b(n);
      std::uniform_int_distribution<int> small(0, static_cast<int>(n / 3));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = ties ? small(rng) : u(rng);
        b[i] = ties ? small(rng) : u(rng);
      }
      const auto ta = table(a), tb = table(b);
      double expected = 0.0;
      bool degenerate = false;
      try {
        expected = tsup::textbook_spearman(a, b);
        degenerate = !std::isfinite(expected);
      } catch (...) {
        degenerate = true;
      }
      if (degenerate) continue;
      near(spearman(ta, tb), expected, kSpearmanTol, "n=" + std::to_string(n));
    }
    std::vector<double> v(n), rev(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = static_cast<double>(i);
      rev[i] = static_cast<double>(n - i);
    }
    near(spearman(table(v), table(v)), 1.0, kSpearmanTol, "identical");
    near(spearman(table(v), table(rev)), -1.0, kSpearmanTol, "reversed");
  }
}

PublicationRecord simple(std::string id, const std::string& cat, bool open,
                         std::vector<std::string> countries) {
  PublicationRecord r;
  r.id = std::move(id);
  r.year = 2016;
  r.subject_categories = {cat};
  if (open) r.raw_statuses.insert(OAStatus::Gold);
  r.countries = std::move(countries);
  r.has_doi = true;
  return r;
}

void ac7() {
  const auto reg = tsup::registry_from(
      {{"Low", "Engineering", "PE8"}, {"High", "Fundamental biology", "LS3"}});
  Corpus c;
  int id = 0;
  auto add = [&](const std::vector<std::string>& actors, const std::string& cat, int n, int n_open) {
    for (int i = 0; i < n; ++i) c.push_back(simple("r" + std::to_string(id++), cat, i < n_open, actors));
  };
  add({"E"}, "Low", 20, 3);    // 15 % in a field that is 8 % open worldwide
  add({"B"}, "High", 20, 10);  // 50 % in a field that is 66 % open worldwide
  add({}, "Low", 80, 5);
  add({}, "High", 80, 56);
  IndicatorQuery q;
  auto table = compute_indicators(c, reg, nullptr, q);
  auto share = rank(table, Metric::OaShare);
  auto norm = rank(table, Metric::NoaiOstDiscipline);
  for (const auto& s : rank_shift(share, norm)) {
    if (s.actor == "E") require(s.delta > 0, "E must gain places, delta " + std::to_string(s.delta));
    if (s.actor == "B") require(s.delta < 0, "B must lose places");
  }
}

void ac8() {
  IndicatorTable t;
  for (double x : {30.0, 30.5}) {
    IndicatorRow r;
    r.actor = "x" + std::to_string(x);
    r.x_total = x;
    t.rows.push_back(r);
  }
  auto kept = filter_actors(t);
  require(kept.rows.size() == 1 && kept.rows[0].x_total == 30.5, "only 30.5 kept");

  // Through the engine an actor's x_total is its record count: 30 out, 31 in.
  const auto reg = tsup::registry_from({{"A", "Engineering", "PE8"}, {"B", "Chemistry", "PE5"}});
  Corpus c;
  for (int i = 0; i < 30; ++i) c.push_back(simple("p" + std::to_string(i), i % 2 ? "A" : "B", i % 2, {"P"}));
  for (int i = 0; i < 31; ++i) c.push_back(simple("q" + std::to_string(i), i % 2 ? "A" : "B", i % 2, {"Q"}));
  auto engine = filter_actors(compute_indicators(c, reg, nullptr, IndicatorQuery{}));
  require(engine.rows.size() == 1 && engine.rows[0].actor == "Q", "30 records excluded, 31 kept");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::size_t line = 0;
  while (in.peek() != EOF && in.peek() != '#') {
    auto row = csv::read_row(in, line);
    if (!row) break;
    rows.push_back(*row);
  }
  return rows;
}

int run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

void ac9() {
  TempDir dir("noai_acceptance_ac9");
  auto spec = random_spec(9, 5000, 20, 12);
  {
    nlohmann::json j;
    j["seed"] = spec.seed;
    j["n_records"] = spec.n_records;
    j["years"] = {spec.years.first, spec.years.last};
    j["multi_category_rate"] = spec.multi_category_rate;
    j["multi_status_rate"] = spec.multi_status_rate;
    j["co_actor_rate"] = spec.co_actor_rate;
    j["no_actor_rate"] = spec.no_actor_rate;
    for (const auto& f : spec.fields) {
      j["fields"].push_back({{"subject_category", f.subject_category},
                             {"ost_discipline", f.ost_discipline},
                             {"erc_subfield", f.erc_subfield},
                             {"oa", {{"gold", f.p_gold}, {"bronze", f.p_bronze}, {"green", f.p_green}}},
                             {"gold_trend", f.gold_trend}});
    }
    for (const auto& a : spec.actors) {
      j["actors"].push_back({{"id", a.id}, {"weights", a.weights}, {"volume", a.volume}});
    }
    std::ofstream(dir / "spec.json") << j.dump(2);
  }
  require(run_cli({"synth", "--spec", dir / "spec.json", "--out", dir / "corpus.jsonl",
                   "--registry-out", dir / "registry.csv"}) == 0,
          "synth");

  const auto reg = load_registry(dir / "registry.csv");
  const auto loaded = load_corpus(dir / "corpus.jsonl", &reg);
  require(loaded.records == synth::generate(spec), "corpus file equals in-memory generation");
  auto table = filter_actors(compute_indicators(loaded.records, reg, nullptr, IndicatorQuery{}));

  for (int decimals : {2, 17}) {
    const auto d = std::to_string(decimals);
    for (const char* run : {"a", "b"}) {
      require(run_cli({"indicators", "--corpus", dir / "corpus.jsonl", "--registry",
                       dir / "registry.csv", "--decimals", d, "--out",
                       dir / ("ind" + d + run + ".csv")}) == 0,
              "indicators");
    }
    const auto csv_a = slurp(dir / ("ind" + d + "a.csv"));
    require(csv_a == slurp(dir / ("ind" + d + "b.csv")), "identical output bytes");
    auto man_a = nlohmann::json::parse(slurp(dir / ("ind" + d + "a.csv.manifest.json")));
    auto man_b = nlohmann::json::parse(slurp(dir / ("ind" + d + "b.csv.manifest.json")));
    man_a["config"].erase("out");
    man_b["config"].erase("out");
    man_a["output"].erase("path");
    man_b["output"].erase("path");
    require(man_a == man_b, "manifests differ beyond the output path");

    const auto parsed = parse_csv(csv_a);
    std::ostringstream expected;
    report::write_csv(expected, report::indicator_table(table, decimals));
    const auto want = parse_csv(expected.str());
    require(parsed == want, "parsed CSV equals the in-memory table at " + d + " decimals");
    require(parsed.size() == table.rows.size() + 1, "row count");
    const double tol = 0.5 * std::pow(10.0, -decimals) * (1 + 1e-9);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& row = table.rows[i];
      const auto& cells = parsed[i + 1];
      require(cells[0] == row.actor, "actor order");
      near(std::stod(cells[2]), row.x_total, tol * std::max(1.0, row.x_total), "x_total");
      if (row.oa_share) near(std::stod(cells[3]), *row.oa_share, tol * 100, "oa_share");
      if (auto v = row.noai_at(Level::OstDiscipline)) near(std::stod(cells[5]), *v, tol, "noai");
    }
  }

  // Manifest reproducibility at identical paths: rerun into the same file.
  const auto first = slurp(dir / "ind2a.csv.manifest.json");
  require(run_cli({"indicators", "--corpus", dir / "corpus.jsonl", "--registry", dir / "registry.csv",
                   "--decimals", "2", "--out", dir / "ind2a.csv"}) == 0,
          "rerun");
  require(slurp(dir / "ind2a.csv.manifest.json") == first, "manifest bytes identical");
}

void ac10() {
  TempDir dir("noai_acceptance_ac10");
  auto spec = random_spec(10, kAc10Records, 60, 60);
  {
    std::ofstream f(dir / "corpus.jsonl", std::ios::binary);
    synth::generate(spec, f);
    std::ofstream r(dir / "registry.csv", std::ios::binary);
    write_registry(r, synth::make_registry(spec));
  }
  const auto t0 = std::chrono::steady_clock::now();
  require(run_cli({"indicators", "--corpus", dir / "corpus.jsonl", "--registry", dir / "registry.csv",
                   "--level", "ost-discipline", "--out", dir / "out.csv"}) == 0,
          "indicators");
  const double secs = seconds_since(t0);
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  const double peak = static_cast<double>(ru.ru_maxrss) * 1024.0;
  std::cout << "  AC10: " << secs << " s, peak RSS " << peak / (1024 * 1024) << " MiB\n";
  require(parse_csv(slurp(dir / "out.csv")).size() > 1, "non-empty table");
  require(secs < kAc10Seconds, "runtime " + std::to_string(secs) + " s");
  require(peak < kAc10MaxBytes, "memory");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void()>>> criteria{
      {"AC1 worked example fractions and credits", ac1},
      {"AC2 status priority over all subsets", ac2},
      {"AC3 world NOAI is 1 on 100 synthetic corpora", ac3},
      {"AC4 streaming engine equals brute-force oracle", ac4},
      {"AC5 conservation of counts and type shares", ac5},
      {"AC6 Spearman against textbook formula", ac6},
      {"AC7 specialist in closed field gains rank", ac7},
      {"AC8 min-pubs threshold is strict", ac8},
      {"AC9 synth to indicators CSV round-trip", ac9},
      {"AC10 one million records through indicators", ac10},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      fn();
    } catch (const Failure& f) {
      ok = false;
      detail = f.what;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), seconds_since(t0),
                ok ? "" : " - ", detail.c_str());
    std::fflush(stdout);
    failed += ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
