#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <map>
#include <random>

#include "pressad/defaults.hpp"
#include "pressad/panel.hpp"
#include "pressad/synth.hpp"

using namespace pressad;
using Catch::Matchers::WithinAbs;

namespace {

AdObservation company_ad(const std::string& source, const Date& date, double war,
                         const std::string& company) {
  AdObservation ad;
  ad.id = {source, "Delhi", date, 5, 0};
  ad.category = PageCategory::other;
  ad.area_fraction = war;
  ad.scaling_factor = 1.0;
  ad.weighted_ad_ratio = war;
  ad.companies = {company};
  return ad;
}

ArticleObservation company_article(const std::string& source, const Date& date, int sentiment,
                                   const std::string& company) {
  ArticleObservation art;
  art.id = {source, "Delhi", date, 2, 1};
  art.sentiment = sentiment;
  art.companies = {company};
  return art;
}

PageSample page(const std::string& source, const Date& date) {
  return {source, date, 0.3};
}

}  // namespace

TEST_CASE("zero-activity periods are filled with zeros within observed support") {
  std::vector<AdObservation> ads = {
      company_ad("Times of India", Date{2022, 1, 10}, 0.4, "Tata"),
      company_ad("Times of India", Date{2022, 1, 20}, 0.1, "Tata"),
  };
  std::vector<ArticleObservation> articles;
  std::vector<PageSample> pages = {page("Times of India", Date{2022, 1, 10}),
                                   page("Times of India", Date{2022, 2, 10})};
  PanelOptions opts;
  opts.bucket = Bucket::monthly;
  opts.focus = PanelFocus::companies;

  auto panel = build_panel(ads, articles, pages, opts);
  REQUIRE(panel.size() == 2);
  CHECK(panel[0].period == "2022-01");
  CHECK_THAT(panel[0].weighted_ad_ratio, WithinAbs(0.5, 1e-12));
  CHECK(panel[1].period == "2022-02");
  CHECK(panel[1].weighted_ad_ratio == 0.0);
  CHECK(panel[1].article_count == 0);

  opts.zero_fill = false;
  auto unfilled = build_panel(ads, articles, pages, opts);
  REQUIRE(unfilled.size() == 1);
  CHECK(unfilled[0].period == "2022-01");
}

TEST_CASE("sentiments sum and articles count") {
  std::vector<AdObservation> ads;
  std::vector<ArticleObservation> articles = {
      company_article("Sakshi", Date{2023, 6, 5}, +1, "Amul"),
      company_article("Sakshi", Date{2023, 6, 25}, -1, "Amul"),
  };
  std::vector<PageSample> pages = {page("Sakshi", Date{2023, 6, 5})};
  PanelOptions opts;
  auto panel = build_panel(ads, articles, pages, opts);
  REQUIRE(panel.size() == 1);
  CHECK(panel[0].sentiment_total == 0);
  CHECK(panel[0].article_count == 2);
}

TEST_CASE("missing sentiment labels count as zero and keep the bound") {
  std::vector<ArticleObservation> articles = {
      company_article("Sakshi", Date{2023, 6, 5}, +1, "Amul")};
  ArticleObservation unlabeled;
  unlabeled.id = {"Sakshi", "Delhi", Date{2023, 6, 6}, 3, 0};
  unlabeled.companies = {"Amul"};
  articles.push_back(unlabeled);
  std::vector<PageSample> pages = {page("Sakshi", Date{2023, 6, 5})};
  auto panel = build_panel({}, articles, pages, PanelOptions{});
  REQUIRE(panel.size() == 1);
  CHECK(panel[0].sentiment_total == 1);
  CHECK(panel[0].article_count == 2);
  CHECK(std::llabs(panel[0].sentiment_total) <= panel[0].article_count);
}

TEST_CASE("weighted ad ratios equal an independent per-period summation") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.01, 0.5);
  std::vector<AdObservation> ads;
  std::map<std::pair<std::string, std::string>, double> oracle;  // (entity, period) -> war
  const char* companies[] = {"Tata", "Amul", "Samsung"};
  std::vector<PageSample> pages;
  for (int i = 0; i < 200; ++i) {
    Date d{2021, static_cast<unsigned>(1 + i % 6), static_cast<unsigned>(1 + i % 28)};
    std::string company = companies[i % 3];
    double war = unit(rng);
    ads.push_back(company_ad("Telegraph", d, war, company));
    oracle[{company, d.month_key()}] += war;
    pages.push_back(page("Telegraph", d));
  }
  auto panel = build_panel(ads, {}, pages, PanelOptions{});
  std::size_t nonzero = 0;
  for (const auto& row : panel) {
    auto it = oracle.find({row.entity, row.period});
    if (it == oracle.end()) {
      CHECK(row.weighted_ad_ratio == 0.0);
      continue;
    }
    ++nonzero;
    CHECK_THAT(row.weighted_ad_ratio, WithinAbs(it->second, 1e-9));
  }
  CHECK(nonzero == oracle.size());
}

TEST_CASE("government panel keys entities by source") {
  std::vector<AdObservation> ads;
  AdObservation gov_ad = company_ad("Times of India", Date{2022, 1, 10}, 0.2, "ignored");
  gov_ad.companies.clear();
  gov_ad.government = true;
  ads.push_back(gov_ad);
  std::vector<ArticleObservation> articles;
  ArticleObservation corr;
  corr.id = {"Times of India", "Delhi", Date{2022, 1, 12}, 2, 0};
  corr.sentiment = -1;
  corr.government = true;
  articles.push_back(corr);
  std::vector<PageSample> pages = {page("Times of India", Date{2022, 1, 10})};

  PanelOptions opts;
  opts.focus = PanelFocus::government;
  auto panel = build_panel(ads, articles, pages, opts);
  REQUIRE(panel.size() == 1);
  CHECK(panel[0].entity == "Times of India");
  CHECK(panel[0].source == "Times of India");
  CHECK_THAT(panel[0].weighted_ad_ratio, WithinAbs(0.2, 1e-12));
  CHECK(panel[0].sentiment_total == -1);
}

TEST_CASE("daily and weekly buckets key periods correctly") {
  std::vector<AdObservation> ads = {
      company_ad("Sakshi", Date{2023, 6, 7}, 0.1, "Amul"),  // a Wednesday
  };
  std::vector<PageSample> pages = {page("Sakshi", Date{2023, 6, 7})};
  PanelOptions opts;
  opts.bucket = Bucket::daily;
  auto daily = build_panel(ads, {}, pages, opts);
  REQUIRE(daily.size() == 1);
  CHECK(daily[0].period == "2023-06-07");

  opts.bucket = Bucket::weekly;
  auto weekly = build_panel(ads, {}, pages, opts);
  REQUIRE(weekly.size() == 1);
  CHECK(weekly[0].period == "2023-06-05");  // the Monday of that week
}

TEST_CASE("popularity joins by (entity, period) and flags out-of-range values") {
  auto dir = std::filesystem::temp_directory_path();
  auto path = dir / "pressad_popularity_test.csv";
  {
    std::ofstream out(path);
    out << "entity,period,popularity\n";
    out << "Amul,2023-06,55\n";
    out << "Nobody,2023-06,10\n";
  }
  auto series = PopularitySeries::load(path);
  CHECK(series.values.size() == 2);

  std::vector<AdObservation> ads = {company_ad("Sakshi", Date{2023, 6, 7}, 0.1, "Amul")};
  std::vector<PageSample> pages = {page("Sakshi", Date{2023, 6, 7})};
  auto panel = build_panel(ads, {}, pages, PanelOptions{}, &series);
  REQUIRE(panel.size() == 1);
  REQUIRE(panel[0].popularity.has_value());
  CHECK_THAT(*panel[0].popularity, WithinAbs(55.0, 1e-12));
  CHECK(popularity_unmatched(series, panel) == 1);  // "Nobody" ignored

  {
    std::ofstream out(path);
    out << "entity,period,popularity\nAmul,2023-06,101\n";
  }
  CHECK_THROWS_AS(PopularitySeries::load(path), ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("panel csv round-trips") {
  SynthPanelConfig cfg;
  cfg.seed = 5;
  cfg.entities = 6;
  cfg.periods = 5;
  cfg.with_popularity = true;
  auto synth = synth_panel(cfg);

  auto path = std::filesystem::temp_directory_path() / "pressad_panel_roundtrip.csv";
  write_panel_csv(path.string(), synth.rows);
  auto loaded = read_panel_csv(path);
  REQUIRE(loaded.size() == synth.rows.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].entity == synth.rows[i].entity);
    CHECK(loaded[i].source == synth.rows[i].source);
    CHECK(loaded[i].period == synth.rows[i].period);
    CHECK_THAT(loaded[i].weighted_ad_ratio,
               WithinAbs(synth.rows[i].weighted_ad_ratio, 1e-9));
    CHECK(loaded[i].sentiment_total == synth.rows[i].sentiment_total);
    CHECK(loaded[i].article_count == synth.rows[i].article_count);
    REQUIRE(loaded[i].popularity.has_value() == synth.rows[i].popularity.has_value());
  }
  std::filesystem::remove(path);
}

TEST_CASE("panel csv with duplicate keys is rejected") {
  auto path = std::filesystem::temp_directory_path() / "pressad_panel_dup.csv";
  {
    std::ofstream out(path);
    out << "entity,source,period,weighted_ad_ratio,sentiment_total,article_count,popularity\n";
    out << "Amul,Sakshi,2023-06,1.5,2,3,\n";
    out << "Amul,Sakshi,2023-06,0.5,1,1,\n";
  }
  CHECK_THROWS_AS(read_panel_csv(path), ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("panels from synthetic corpora satisfy the sentiment bound") {
  SynthCorpusConfig cfg;
  cfg.seed = 77;
  cfg.editions = 18;
  auto editions = synth_corpus(cfg);
  auto rules = EntityRuleSet::builtin_defaults();
  auto card = RateCard::builtin_defaults();
  auto matches = classify_editions(editions, rules);
  ObservationSet obs;
  for (const auto& e : editions) append_observations(e, matches, card, obs);

  for (PanelFocus focus : {PanelFocus::companies, PanelFocus::government}) {
    PanelOptions opts;
    opts.focus = focus;
    auto panel = build_panel(obs.ads, obs.articles, obs.pages, opts);
    CHECK(!panel.empty());
    std::set<std::tuple<std::string, std::string, std::string>> keys;
    for (const auto& row : panel) {
      CHECK(std::llabs(row.sentiment_total) <= row.article_count);
      CHECK(row.weighted_ad_ratio >= 0.0);
      CHECK(keys.insert({row.entity, row.source, row.period}).second);  // unique key
    }
  }
}
