#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pressad/defaults.hpp"
#include "pressad/digest.hpp"
#include "pressad/errors.hpp"
#include "pressad/observations.hpp"
#include "pressad/panel.hpp"
#include "pressad/parallel.hpp"
#include "pressad/rate_card.hpp"
#include "pressad/regression.hpp"
#include "pressad/reports.hpp"
#include "pressad/rules.hpp"
#include "pressad/store.hpp"
#include "pressad/version.hpp"

namespace pressad {

// A stage threw; the CLI maps this to its own exit code.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RegressionRequest {
  PanelFocus focus = PanelFocus::companies;
  Dependent dependent = Dependent::sentiment_total;
  FixedEffects fixed_effects = FixedEffects::both;
  bool use_popularity = false;

  std::string slug() const {
    std::string out = focus == PanelFocus::government ? "government" : "companies";
    out += "_";
    out += dependent == Dependent::sentiment_total ? "sentiment" : "count";
    out += "_fe_";
    out += to_string(fixed_effects);
    if (use_popularity) out += "_popularity";
    return out;
  }
};

struct RunConfig {
  std::filesystem::path store;
  std::vector<std::string> inputs;       // files or globs for the ingest stage
  std::filesystem::path out_dir;
  std::filesystem::path rules;           // empty: builtin defaults
  std::filesystem::path rates;           // empty: builtin defaults
  std::filesystem::path popularity;      // optional popularity series CSV
  Bucket bucket = Bucket::monthly;
  bool dedup = true;
  bool strict = false;
  bool exclude_overlaps = false;
  int jobs = 1;
  std::vector<std::string> stages = {"ingest", "classify", "price", "report", "regress"};
  std::vector<RegressionRequest> regressions = {
      {PanelFocus::companies, Dependent::sentiment_total, FixedEffects::both, false},
      {PanelFocus::companies, Dependent::article_count, FixedEffects::both, false},
      {PanelFocus::government, Dependent::sentiment_total, FixedEffects::both, false},
  };

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
};

inline const std::set<std::string>& known_stages() {
  static const std::set<std::string> s = {"ingest", "classify", "price", "report", "regress"};
  return s;
}

inline RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (!j.contains("store")) throw ConfigError("run config: 'store' is required");
  cfg.store = j.at("store").get<std::string>();
  if (j.contains("inputs"))
    for (const auto& item : j.at("inputs")) cfg.inputs.push_back(item.get<std::string>());
  cfg.out_dir = j.value("out_dir", std::string("out"));
  cfg.rules = j.value("rules", std::string{});
  cfg.rates = j.value("rates", std::string{});
  cfg.popularity = j.value("popularity", std::string{});
  if (j.contains("bucket")) {
    auto b = bucket_from_string(j.at("bucket").get<std::string>());
    if (!b) throw ConfigError("run config: unknown bucket '" +
                              j.at("bucket").get<std::string>() + "'");
    cfg.bucket = *b;
  }
  cfg.dedup = j.value("dedup", true);
  cfg.strict = j.value("strict", false);
  cfg.exclude_overlaps = j.value("exclude_overlaps", false);
  cfg.jobs = j.value("jobs", 1);
  if (j.contains("stages")) {
    cfg.stages.clear();
    for (const auto& item : j.at("stages")) {
      std::string name = item.get<std::string>();
      if (!known_stages().count(name))
        throw ConfigError("run config: unknown stage '" + name + "'");
      cfg.stages.push_back(std::move(name));
    }
  }
  if (j.contains("regressions")) {
    cfg.regressions.clear();
    for (const auto& rj : j.at("regressions")) {
      RegressionRequest req;
      auto focus = focus_from_string(rj.value("focus", "companies"));
      if (!focus) throw ConfigError("run config: unknown regression focus");
      req.focus = *focus;
      auto dep = dependent_from_string(rj.value("dependent", "sentiment"));
      if (!dep) throw ConfigError("run config: unknown regression dependent");
      req.dependent = *dep;
      auto fe = fixed_effects_from_string(rj.value("fixed_effects", "both"));
      if (!fe) throw ConfigError("run config: unknown fixed_effects");
      req.fixed_effects = *fe;
      req.use_popularity = rj.value("popularity", false);
      cfg.regressions.push_back(req);
    }
  }
  return cfg;
}

inline RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read run config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("malformed run config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

struct StageRecord {
  std::string name;
  std::map<std::string, std::string> output_digests;  // file name -> digest
};

struct RunManifest {
  std::string tool_version;
  std::string config_digest;
  std::map<std::string, std::string> input_digests;
  std::vector<StageRecord> stages;
  std::string started_at;
  std::string finished_at;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tool_version"] = tool_version;
    j["config_digest"] = config_digest;
    j["inputs"] = input_digests;
    auto arr = nlohmann::json::array();
    for (const StageRecord& s : stages)
      arr.push_back({{"name", s.name}, {"outputs", s.output_digests}});
    j["stages"] = std::move(arr);
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    return j;
  }
};

namespace detail {

inline bool glob_match(const std::string& pattern, const std::string& name) {
  // * and ? over the filename portion only
  std::size_t p = 0, n = 0, star = std::string::npos, star_n = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      star_n = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++star_n;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

inline std::vector<std::filesystem::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::filesystem::path> files;
  for (const std::string& input : inputs) {
    std::filesystem::path p(input);
    if (input.find('*') == std::string::npos && input.find('?') == std::string::npos) {
      if (!std::filesystem::exists(p)) throw IoError("input not found: " + input);
      files.push_back(p);
      continue;
    }
    std::filesystem::path dir = p.parent_path().empty() ? "." : p.parent_path();
    if (!std::filesystem::is_directory(dir))
      throw IoError("input directory not found: " + dir.string());
    std::vector<std::filesystem::path> matched;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.is_regular_file() && glob_match(p.filename().string(),
                                                entry.path().filename().string()))
        matched.push_back(entry.path());
    if (matched.empty()) throw IoError("no files match input pattern: " + input);
    std::sort(matched.begin(), matched.end());
    files.insert(files.end(), matched.begin(), matched.end());
  }
  return files;
}

inline std::string now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[72];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

}  // namespace detail

struct IngestSummary {
  std::size_t files = 0;
  std::size_t lines = 0;
  std::size_t editions_added = 0;
  std::size_t editions_deduped = 0;
  std::size_t editions_rejected = 0;
  std::size_t clamped_boxes = 0;
  std::size_t duplicate_pages_dropped = 0;
  std::vector<Violation> violations;
};

// The ingest stage as a reusable operation: parse, validate, persist.
inline IngestSummary ingest_files(const std::vector<std::string>& inputs,
                                  const std::filesystem::path& store_dir, bool dedup) {
  auto files = detail::expand_inputs(inputs);
  CorpusStore store = CorpusStore::open_or_create(store_dir);
  IngestSummary summary;
  summary.files = files.size();
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open input: " + file.string());
    ParseResult parsed = parse_records(in, file.string());
    summary.lines += parsed.lines_read;
    summary.clamped_boxes += parsed.clamped_boxes;
    summary.duplicate_pages_dropped += parsed.duplicate_pages_dropped;
    summary.editions_rejected += parsed.editions_rejected;
    summary.violations.insert(summary.violations.end(), parsed.violations.begin(),
                              parsed.violations.end());
    AddReport added = store.add_editions(parsed.editions, dedup);
    summary.editions_added += added.added;
    summary.editions_deduped += added.deduped;
    summary.violations.insert(summary.violations.end(), added.violations.begin(),
                              added.violations.end());
  }
  return summary;
}

// Classifies every segment in index order and writes matches.jsonl.
// Editions are processed in parallel; output order stays deterministic.
inline std::size_t write_matches(const CorpusStore& store, const EntityRuleSet& rules,
                                 const std::filesystem::path& out_path, int jobs) {
  std::vector<EditionKey> keys;
  for (const auto& [key, entry] : store.index()) keys.push_back(key);

  auto classify_one = [&](const EditionKey& key) {
    Edition e = store.load_edition(key);
    std::string lines;
    for (const PageRecord& page : e.pages)
      for (std::size_t i = 0; i < page.segments.size(); ++i) {
        SegmentId id{page.source, page.city, page.date, page.page_number,
                     static_cast<int>(i)};
        lines += match_to_json(classify_segment(id, page.segments[i].kind,
                                                page.segments[i].text, rules))
                     .dump();
        lines += '\n';
      }
    return lines;
  };

  auto chunks = parallel_map(keys, jobs, classify_one);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + out_path.string());
  std::size_t total = 0;
  for (const std::string& chunk : chunks) {
    out << chunk;
    total += static_cast<std::size_t>(std::count(chunk.begin(), chunk.end(), '\n'));
  }
  return total;
}

// Runs the configured stages in order. Any stage failure throws StageError
// with the stage name; outputs of earlier stages stay on disk.
inline RunManifest run_pipeline(const RunConfig& cfg) {
  RunManifest manifest;
  manifest.tool_version = kVersion;
  manifest.started_at = detail::now_iso8601();

  {
    nlohmann::json cj;
    cj["store"] = cfg.store.string();
    cj["inputs"] = cfg.inputs;
    cj["out_dir"] = cfg.out_dir.string();
    cj["rules"] = cfg.rules.string();
    cj["rates"] = cfg.rates.string();
    cj["popularity"] = cfg.popularity.string();
    cj["bucket"] = to_string(cfg.bucket);
    cj["dedup"] = cfg.dedup;
    cj["strict"] = cfg.strict;
    cj["exclude_overlaps"] = cfg.exclude_overlaps;
    cj["stages"] = cfg.stages;
    auto arr = nlohmann::json::array();
    for (const auto& r : cfg.regressions) arr.push_back(r.slug());
    cj["regressions"] = std::move(arr);
    manifest.config_digest = digest_hex(cj.dump());
  }

  for (const std::string& stage : cfg.stages)
    if (!known_stages().count(stage)) throw ConfigError("unknown stage '" + stage + "'");

  // pre-flight: the config must reference existing inputs
  bool will_ingest =
      std::find(cfg.stages.begin(), cfg.stages.end(), "ingest") != cfg.stages.end();
  if (will_ingest) {
    if (cfg.inputs.empty()) throw ConfigError("ingest stage requires 'inputs'");
    for (const auto& file : detail::expand_inputs(cfg.inputs))
      manifest.input_digests[file.string()] = file_digest(file.string());
  }

  std::filesystem::create_directories(cfg.out_dir);

  const auto matches_path = cfg.out_dir / "matches.jsonl";
  std::optional<ObservationSet> observations;
  std::optional<EntityRuleSet> rules;

  auto ensure_rules = [&]() -> const EntityRuleSet& {
    if (!rules) rules = load_rules_or_default(cfg.rules);
    return *rules;
  };
  auto ensure_observations = [&]() -> ObservationSet& {
    if (!observations) {
      CorpusStore store = CorpusStore::open(cfg.store);
      MatchIndex matches = MatchIndex::load(matches_path);
      RateCard card = load_rates_or_default(cfg.rates);
      observations = build_observations(store, matches, card);
    }
    return *observations;
  };

  for (const std::string& stage : cfg.stages) {
    StageRecord record;
    record.name = stage;
    try {
      if (stage == "ingest") {
        IngestSummary summary = ingest_files(cfg.inputs, cfg.store, cfg.dedup);
        if (cfg.strict && !summary.violations.empty())
          throw IoError("strict mode: " + std::to_string(summary.violations.size()) +
                        " violations during ingest");
        record.output_digests["index.json"] = file_digest((cfg.store / "index.json").string());
      } else if (stage == "classify") {
        CorpusStore store = CorpusStore::open(cfg.store);
        write_matches(store, ensure_rules(), matches_path, cfg.jobs);
        record.output_digests["matches.jsonl"] = file_digest(matches_path.string());
      } else if (stage == "price") {
        auto& obs = ensure_observations();
        auto path = (cfg.out_dir / "priced.csv").string();
        write_priced_csv(path, obs.ads);
        record.output_digests["priced.csv"] = file_digest(path);
      } else if (stage == "report") {
        auto& obs = ensure_observations();
        auto out = [&](const std::string& name) { return (cfg.out_dir / name).string(); };
        write_placement_csv(out("placement.csv"),
                            placement_report(obs.ads, cfg.exclude_overlaps));
        write_cdf_csv(out("cdf.csv"), obs.ads, cfg.exclude_overlaps);
        write_timeseries_csv(out("timeseries.csv"), obs.pages);
        write_weekday_csv(out("weekday.csv"), obs.pages);
        write_breakdown_csv(out("breakdown.csv"), entity_breakdown(obs.ads, ensure_rules()));
        write_topics_csv(out("topics.csv"), topic_counts(obs.ads, obs.articles));
        std::optional<PopularitySeries> popularity;
        if (!cfg.popularity.empty()) popularity = PopularitySeries::load(cfg.popularity);
        for (PanelFocus focus : {PanelFocus::companies, PanelFocus::government}) {
          PanelOptions opts;
          opts.bucket = cfg.bucket;
          opts.focus = focus;
          auto panel = build_panel(obs.ads, obs.articles, obs.pages, opts,
                                   popularity ? &*popularity : nullptr);
          std::string name = focus == PanelFocus::companies ? "panel_companies.csv"
                                                            : "panel_government.csv";
          write_panel_csv(out(name), panel);
        }
        for (const char* name :
             {"placement.csv", "cdf.csv", "timeseries.csv", "weekday.csv", "breakdown.csv",
              "topics.csv", "panel_companies.csv", "panel_government.csv"})
          record.output_digests[name] = file_digest(out(name));
      } else if (stage == "regress") {
        for (const RegressionRequest& req : cfg.regressions) {
          std::string panel_name = req.focus == PanelFocus::companies
                                       ? "panel_companies.csv"
                                       : "panel_government.csv";
          auto panel = read_panel_csv(cfg.out_dir / panel_name);
          RegressionSpec spec;
          spec.dependent = req.dependent;
          spec.fixed_effects = req.fixed_effects;
          spec.use_popularity = req.use_popularity;
          RegressionResult result = fit(spec, panel);
          std::string name = "regress_" + req.slug() + ".json";
          std::ofstream out(cfg.out_dir / name, std::ios::binary);
          if (!out) throw IoError("cannot write " + (cfg.out_dir / name).string());
          out << result.to_json().dump(2) << '\n';
          out.close();
          record.output_digests[name] = file_digest((cfg.out_dir / name).string());
        }
      }
    } catch (const std::exception& e) {
      throw StageError(stage, e.what());
    }
    manifest.stages.push_back(std::move(record));
  }

  manifest.finished_at = detail::now_iso8601();
  std::ofstream out(cfg.out_dir / "run_manifest.json", std::ios::binary);
  if (out) out << manifest.to_json().dump(2) << '\n';
  return manifest;
}

}  // namespace pressad
