// Command-line front end: ingest -> classify -> price -> report -> regress,
// plus a seeded synthetic-corpus generator and a one-shot `run` driver.

#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pressad/defaults.hpp"
#include "pressad/jsonl.hpp"
#include "pressad/pipeline.hpp"
#include "pressad/synth.hpp"
#include "pressad/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitStage = 4;

void print_violations(const std::vector<pressad::Violation>& violations, std::size_t limit = 20) {
  for (std::size_t i = 0; i < violations.size() && i < limit; ++i)
    std::cerr << "[violation] " << violations[i].where << ": " << violations[i].rule
              << (violations[i].detail.empty() ? "" : " (" + violations[i].detail + ")")
              << "\n";
  if (violations.size() > limit)
    std::cerr << "[violation] ... and " << violations.size() - limit << " more\n";
}

void write_editions_jsonl(const std::vector<pressad::Edition>& editions,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pressad::IoError("cannot write " + path);
  for (const auto& e : editions)
    for (const auto& page : e.pages)
      out << pressad::detail::page_to_json(page).dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"print-newspaper ad analytics"};
  app.set_version_flag("--version", pressad::kVersion);
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse and store page records");
  std::vector<std::string> ingest_inputs;
  std::string ingest_store;
  bool ingest_dedup = false, ingest_strict = false;
  ingest->add_option("--input", ingest_inputs, "input JSONL file(s) or glob(s)")->required();
  ingest->add_option("--store", ingest_store, "corpus store directory")->required();
  ingest->add_flag("--dedup", ingest_dedup, "skip editions already in the store");
  ingest->add_flag("--strict", ingest_strict, "exit nonzero on any violation");

  // classify
  auto* classify = app.add_subcommand("classify", "match segments against keyword rules");
  std::string classify_store, classify_rules, classify_out = "matches.jsonl";
  int classify_jobs = 1;
  classify->add_option("--store", classify_store)->required();
  classify->add_option("--rules", classify_rules, "rule file (default: built-in tables)");
  classify->add_option("--out", classify_out);
  classify->add_option("--jobs", classify_jobs);

  // price
  auto* price = app.add_subcommand("price", "per-ad geometry and cost estimates");
  std::string price_store, price_rates, price_matches, price_out = "priced.csv";
  price->add_option("--store", price_store)->required();
  price->add_option("--rates", price_rates, "rate card file (default: built-in card)");
  price->add_option("--matches", price_matches, "matches.jsonl from classify");
  price->add_option("--out", price_out);

  // report
  auto* report = app.add_subcommand("report", "aggregate metrics as CSV");
  std::string report_mode, report_store, report_matches, report_rates, report_rules;
  std::string report_out;
  std::string report_bucket = "monthly", report_focus = "companies", report_popularity;
  bool report_exclude_overlaps = false, report_no_zero_fill = false;
  report->add_option("mode", report_mode,
                     "placement|cdf|timeseries|weekday|breakdown|topics|panel")
      ->required();
  report->add_option("--store", report_store)->required();
  report->add_option("--matches", report_matches)->required();
  report->add_option("--rates", report_rates);
  report->add_option("--rules", report_rules, "rule file for sector lookups (breakdown)");
  report->add_option("--out", report_out)->required();
  report->add_option("--bucket", report_bucket, "panel mode: daily|weekly|monthly");
  report->add_option("--focus", report_focus, "panel mode: government|companies");
  report->add_option("--popularity", report_popularity, "panel mode: popularity CSV");
  report->add_flag("--exclude-overlaps", report_exclude_overlaps,
                   "drop ads matching both government and a company");
  report->add_flag("--no-zero-fill", report_no_zero_fill,
                   "panel mode: omit zero rows for inactive periods");

  // regress
  auto* regress = app.add_subcommand("regress", "panel regression on a panel CSV");
  std::string regress_panel, regress_dep = "sentiment", regress_fe = "both";
  std::string regress_out = "result.json", regress_cluster = "entity", regress_popularity;
  bool regress_sentiment_mean = false;
  regress->add_option("--panel", regress_panel)->required();
  regress->add_option("--dep", regress_dep, "sentiment|count");
  regress->add_option("--fe", regress_fe, "none|group|time|both");
  regress->add_option("--cluster", regress_cluster, "cluster variable (entity)");
  regress->add_option("--popularity", regress_popularity,
                      "popularity CSV joined by (entity, period)");
  regress->add_flag("--sentiment-mean", regress_sentiment_mean,
                    "regress per-article mean sentiment instead of the period sum");
  regress->add_option("--out", regress_out);

  // synth
  auto* synth = app.add_subcommand("synth", "seeded synthetic corpus generator");
  std::string synth_out = "corpus.jsonl";
  std::uint64_t synth_seed = 1;
  int synth_editions = 50, synth_pages = 20, synth_step = 1;
  synth->add_option("--out", synth_out);
  synth->add_option("--seed", synth_seed);
  synth->add_option("--editions", synth_editions);
  synth->add_option("--pages-per-edition", synth_pages);
  synth->add_option("--date-step-days", synth_step,
                    "days between consecutive editions of one masthead");

  // run
  auto* run = app.add_subcommand("run", "execute configured stages with a manifest");
  std::string run_config;
  int run_jobs = 0;
  std::uint64_t run_seed = 0;
  run->add_option("--config", run_config)->required();
  run->add_option("--jobs", run_jobs, "override config worker count");
  run->add_option("--seed", run_seed, "reserved for configs that generate inputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*ingest) {
      auto summary = pressad::ingest_files(ingest_inputs, ingest_store, ingest_dedup);
      print_violations(summary.violations);
      auto store = pressad::CorpusStore::open(ingest_store);
      std::cout << "ingested " << summary.editions_added << " editions ("
                << summary.editions_deduped << " deduped, " << summary.editions_rejected
                << " rejected, " << summary.clamped_boxes << " boxes clamped, "
                << summary.duplicate_pages_dropped << " duplicate pages dropped)\n";
      std::cout << "source,editions,pages,articles,ads\n";
      for (const auto& [source, s] : store.stats())
        std::cout << source << "," << s.editions << "," << s.pages << "," << s.articles
                  << "," << s.ads << "\n";
      if (ingest_strict && !summary.violations.empty()) return kExitStage;
      return kExitOk;
    }

    if (*classify) {
      auto store = pressad::CorpusStore::open(classify_store);
      auto rules = pressad::load_rules_or_default(classify_rules);
      std::size_t n = pressad::write_matches(store, rules, classify_out, classify_jobs);
      std::cout << "classified " << n << " segments -> " << classify_out << "\n";
      return kExitOk;
    }

    if (*price) {
      auto store = pressad::CorpusStore::open(price_store);
      auto card = pressad::load_rates_or_default(price_rates);
      for (const auto& warning : card.load_warnings())
        std::cerr << "[warn] rate card: " << warning << "\n";
      pressad::MatchIndex matches;
      if (!price_matches.empty()) matches = pressad::MatchIndex::load(price_matches);
      auto obs = pressad::build_observations(store, matches, card);
      if (obs.rate_fallbacks)
        std::cerr << "[warn] " << obs.rate_fallbacks
                  << " segments priced off a source-mean rate row\n";
      pressad::write_priced_csv(price_out, obs.ads);
      std::cout << "priced " << obs.ads.size() << " ads -> " << price_out << "\n";
      return kExitOk;
    }

    if (*report) {
      auto store = pressad::CorpusStore::open(report_store);
      auto card = pressad::load_rates_or_default(report_rates);
      auto matches = pressad::MatchIndex::load(report_matches);
      auto obs = pressad::build_observations(store, matches, card);
      if (report_mode == "placement") {
        pressad::write_placement_csv(
            report_out, pressad::placement_report(obs.ads, report_exclude_overlaps));
      } else if (report_mode == "cdf") {
        pressad::write_cdf_csv(report_out, obs.ads, report_exclude_overlaps);
      } else if (report_mode == "timeseries") {
        pressad::write_timeseries_csv(report_out, obs.pages);
      } else if (report_mode == "weekday") {
        pressad::write_weekday_csv(report_out, obs.pages);
      } else if (report_mode == "breakdown") {
        auto rules = pressad::load_rules_or_default(report_rules);
        pressad::write_breakdown_csv(report_out, pressad::entity_breakdown(obs.ads, rules));
      } else if (report_mode == "topics") {
        pressad::write_topics_csv(report_out, pressad::topic_counts(obs.ads, obs.articles));
      } else if (report_mode == "panel") {
        pressad::PanelOptions opts;
        auto bucket = pressad::bucket_from_string(report_bucket);
        if (!bucket) throw pressad::ConfigError("unknown bucket '" + report_bucket + "'");
        opts.bucket = *bucket;
        auto focus = pressad::focus_from_string(report_focus);
        if (!focus) throw pressad::ConfigError("unknown focus '" + report_focus + "'");
        opts.focus = *focus;
        opts.zero_fill = !report_no_zero_fill;
        std::optional<pressad::PopularitySeries> popularity;
        if (!report_popularity.empty())
          popularity = pressad::PopularitySeries::load(report_popularity);
        auto panel = pressad::build_panel(obs.ads, obs.articles, obs.pages, opts,
                                          popularity ? &*popularity : nullptr);
        if (popularity) {
          std::size_t unmatched = pressad::popularity_unmatched(*popularity, panel);
          if (unmatched)
            std::cerr << "[warn] " << unmatched
                      << " popularity rows name entities absent from the panel; ignored\n";
        }
        pressad::write_panel_csv(report_out, panel);
      } else {
        throw pressad::ConfigError("unknown report mode '" + report_mode + "'");
      }
      std::cout << "wrote " << report_out << "\n";
      return kExitOk;
    }

    if (*regress) {
      auto panel = pressad::read_panel_csv(regress_panel);
      if (regress_cluster != "entity")
        throw pressad::ConfigError("only entity clustering is supported");
      pressad::RegressionSpec spec;
      auto dep = pressad::dependent_from_string(regress_dep);
      if (!dep) throw pressad::ConfigError("unknown dependent '" + regress_dep + "'");
      spec.dependent = *dep;
      auto fe = pressad::fixed_effects_from_string(regress_fe);
      if (!fe) throw pressad::ConfigError("unknown fixed effects '" + regress_fe + "'");
      spec.fixed_effects = *fe;
      spec.sentiment_as_mean = regress_sentiment_mean;
      if (!regress_popularity.empty()) {
        auto series = pressad::PopularitySeries::load(regress_popularity);
        for (auto& row : panel) {
          auto it = series.values.find({row.entity, row.period});
          if (it != series.values.end()) row.popularity = it->second;
        }
        std::size_t unmatched = pressad::popularity_unmatched(series, panel);
        if (unmatched)
          std::cerr << "[warn] " << unmatched
                    << " popularity rows name entities absent from the panel; ignored\n";
        spec.use_popularity = true;
      }
      auto result = pressad::fit(spec, panel);
      std::ofstream out(regress_out, std::ios::binary);
      if (!out) throw pressad::IoError("cannot write " + regress_out);
      out << result.to_json().dump(2) << '\n';
      const auto& war = result.coefficient("weighted_ad_ratio");
      std::cout << "weighted_ad_ratio: " << war.estimate << " (se " << war.se << ") "
                << war.stars << "  n=" << result.observations << "\n";
      return kExitOk;
    }

    if (*synth) {
      pressad::SynthCorpusConfig cfg;
      cfg.seed = synth_seed;
      cfg.editions = synth_editions;
      cfg.pages_per_edition = synth_pages;
      cfg.date_step_days = synth_step;
      auto editions = pressad::synth_corpus(cfg);
      write_editions_jsonl(editions, synth_out);
      std::size_t pages = 0;
      for (const auto& e : editions) pages += e.pages.size();
      std::cout << "generated " << editions.size() << " editions / " << pages
                << " pages -> " << synth_out << "\n";
      return kExitOk;
    }

    if (*run) {
      auto cfg = pressad::RunConfig::load(run_config);
      if (run_jobs > 0) cfg.jobs = run_jobs;
      auto manifest = pressad::run_pipeline(cfg);
      std::cout << "run complete: " << manifest.stages.size() << " stages, manifest at "
                << (cfg.out_dir / "run_manifest.json").string() << "\n";
      return kExitOk;
    }
  } catch (const pressad::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const pressad::IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const pressad::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return kExitOk;
}
