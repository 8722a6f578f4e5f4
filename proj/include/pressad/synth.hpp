#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pressad/date.hpp"
#include "pressad/model.hpp"
#include "pressad/panel.hpp"
#include "pressad/regression.hpp"

namespace pressad {

// Seeded corpus generator. Keywords are embedded verbatim in the generated
// texts, so the shipped rule set recovers the planted entity labels exactly;
// that makes generated corpora usable as classification/metrics ground truth.
struct SynthCorpusConfig {
  std::uint64_t seed = 1;
  int editions = 50;
  int pages_per_edition = 20;
  Date start{2020, 1, 1};
  int date_step_days = 1;        // consecutive edition dates per (source, city)
  double govt_ad_share = 0.35;   // P(ad text carries a government keyword)
  double company_ad_share = 0.30;
  double corruption_article_share = 0.15;
  double company_article_share = 0.25;
  int ads_per_page = 4;          // mean; actual count varies by +-2
  int articles_per_page = 5;
  double page_width = 1000;
  double page_height = 1600;
  bool physical_dims = true;
};

namespace synth_detail {

inline const std::vector<std::pair<std::string, std::string>>& default_mastheads() {
  static const std::vector<std::pair<std::string, std::string>> v = {
      {"Times of India", "Mumbai"}, {"Times of India", "Delhi"},
      {"Hindustan Times", "Delhi"}, {"Telegraph", "Kolkata"},
      {"Dainik Bhaskar", "Delhi"},  {"Sakshi", "Hyderabad"},
  };
  return v;
}

// Filler vocabulary chosen to avoid every government ad keyword (so a
// non-government text never trips the rule by accident).
inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> v = {
      "weekend", "mega",  "sale",   "discount", "offer", "launch", "festive",
      "deal",    "visit", "outlet", "today",    "free",  "home",   "delivery",
      "premium", "range", "new",    "season",   "style", "collection"};
  return v;
}

inline const std::vector<std::string>& govt_ad_phrases() {
  static const std::vector<std::string> v = {
      "notice inviting e-tender for road works",
      "corrigendum to tender no. 42",
      "e-procurement portal notice for supply of equipment",
      "govt. of india public notice",
      "state transport department tender for buses",
      "central board recruitment procurement notice",
  };
  return v;
}

inline const std::vector<std::string>& corruption_article_phrases() {
  static const std::vector<std::string> v = {
      "state minister arrested in land scam",
      "central agency opens probe into bribe allegations",
      "cbi raid uncovers fraud in government office",
      "court denies bail in state corruption scandal",
      "investigation into govt procurement irregularities widens",
  };
  return v;
}

inline const std::vector<std::string>& company_ad_companies() {
  // (company label, keyword to embed) pairs drawn from the shipped rules
  static const std::vector<std::pair<std::string, std::string>> v_pairs = {
      {"Tata", "tanishq"},          {"Reliance", "jiomart"},
      {"Samsung", "samsung"},       {"Maruti Suzuki", "nexa"},
      {"Amazon", "amazon"},         {"PepsiCo", "pepsi"},
      {"Hyundai", "hyundai"},       {"FIITJEE", "fiitjee"},
      {"Byju's Aakash", "byju's"},  {"LIC", "lic"},
      {"Patanjali", "patanjali"},   {"Bharti Airtel", "airtel"},
      {"Amul", "amul"},             {"Sony", "playstation"},
      {"Apple", "iphone"},
  };
  static const std::vector<std::string> v = [] {
    std::vector<std::string> out;
    for (const auto& p : v_pairs) out.push_back(p.second);
    return out;
  }();
  return v;
}

inline const std::vector<std::string>& topics() {
  static const std::vector<std::string> v = {"Business", "Health",   "Technology",
                                             "Crime",    "Education", "Sports"};
  return v;
}

inline std::string make_filler(std::mt19937_64& rng, int words) {
  const auto& vocab = filler_words();
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::string out;
  for (int i = 0; i < words; ++i) {
    if (!out.empty()) out += ' ';
    out += vocab[pick(rng)];
  }
  return out;
}

inline BoundingBox make_box(std::mt19937_64& rng, double W, double H, double fraction) {
  if (fraction >= 1.0) return {0, 0, W, H};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double lo = std::sqrt(fraction);
  double w_frac = lo + (1.0 - lo) * unit(rng);
  double w = W * w_frac;
  double h = fraction * W * H / w;
  std::uniform_real_distribution<double> px(0.0, W - w);
  std::uniform_real_distribution<double> py(0.0, H - h);
  return {px(rng), py(rng), w, h};
}

inline double draw_area_fraction(std::mt19937_64& rng, bool company_style) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  if (company_style) {
    // visible mass at quarter/half/full page
    if (u < 0.35) return 0.25;
    if (u < 0.55) return 0.5;
    if (u < 0.70) return 1.0;
    return 0.03 + 0.15 * unit(rng);
  }
  if (u < 0.85) return 0.02 + 0.08 * unit(rng);  // small ads dominate
  if (u < 0.95) return 0.25;
  return 0.5;
}

}  // namespace synth_detail

inline std::vector<Edition> synth_corpus(const SynthCorpusConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> jitter(-2, 2);
  std::uniform_int_distribution<int> sentiment_draw(-1, 1);

  const auto& mastheads = synth_detail::default_mastheads();
  std::vector<Edition> editions;
  editions.reserve(static_cast<std::size_t>(cfg.editions));

  for (int e = 0; e < cfg.editions; ++e) {
    const auto& [source, city] = mastheads[static_cast<std::size_t>(e) % mastheads.size()];
    int day_offset = (e / static_cast<int>(mastheads.size())) * cfg.date_step_days;
    Date date;
    date.ymd = std::chrono::year_month_day(
        std::chrono::sys_days(cfg.start.days()) + std::chrono::days{day_offset});

    Edition edition;
    edition.source = source;
    edition.city = city;
    edition.date = date;

    int total_pages = std::max(1, cfg.pages_per_edition + jitter(rng) % 3);
    for (int p = 1; p <= total_pages; ++p) {
      PageRecord page;
      page.source = source;
      page.city = city;
      page.date = date;
      page.page_number = p;
      page.total_pages = total_pages;
      page.width = cfg.page_width;
      page.height = cfg.page_height;
      if (cfg.physical_dims) {
        page.physical_width_cm = 33.0;
        page.physical_height_cm = 52.0;
      }

      int n_ads = std::max(0, cfg.ads_per_page + jitter(rng));
      int n_articles = std::max(1, cfg.articles_per_page + jitter(rng));

      // ads share a per-page area budget so total coverage stays plausible
      double remaining = 1.0;
      for (int a = 0; a < n_ads && remaining >= 0.02; ++a) {
        Segment seg;
        seg.kind = SegmentKind::ad;
        double roll = unit(rng);
        double fraction;
        if (roll < cfg.govt_ad_share) {
          const auto& phrases = synth_detail::govt_ad_phrases();
          seg.text = phrases[static_cast<std::size_t>(unit(rng) * phrases.size()) %
                             phrases.size()];
          fraction = synth_detail::draw_area_fraction(rng, false);
        } else if (roll < cfg.govt_ad_share + cfg.company_ad_share) {
          const auto& kws = synth_detail::company_ad_companies();
          seg.text = synth_detail::make_filler(rng, 3) + " " +
                     kws[static_cast<std::size_t>(unit(rng) * kws.size()) % kws.size()] +
                     " " + synth_detail::make_filler(rng, 2);
          fraction = synth_detail::draw_area_fraction(rng, true);
        } else {
          seg.text = synth_detail::make_filler(rng, 6);
          fraction = synth_detail::draw_area_fraction(rng, false);
        }
        if (a > 0 && fraction > remaining) continue;
        remaining -= fraction;
        seg.box = synth_detail::make_box(rng, page.width, page.height, fraction);
        const auto& topic_list = synth_detail::topics();
        seg.topic = topic_list[static_cast<std::size_t>(unit(rng) * topic_list.size()) %
                               topic_list.size()];
        page.segments.push_back(std::move(seg));
      }

      for (int a = 0; a < n_articles; ++a) {
        Segment seg;
        seg.kind = SegmentKind::article;
        double roll = unit(rng);
        if (roll < cfg.corruption_article_share) {
          const auto& phrases = synth_detail::corruption_article_phrases();
          seg.text = phrases[static_cast<std::size_t>(unit(rng) * phrases.size()) %
                             phrases.size()];
          seg.sentiment = unit(rng) < 0.7 ? -1 : 0;
        } else if (roll < cfg.corruption_article_share + cfg.company_article_share) {
          const auto& kws = synth_detail::company_ad_companies();
          seg.text = "quarterly results announced for " +
                     kws[static_cast<std::size_t>(unit(rng) * kws.size()) % kws.size()];
          seg.sentiment = sentiment_draw(rng);
        } else {
          seg.text = synth_detail::make_filler(rng, 8);
          seg.sentiment = sentiment_draw(rng);
        }
        seg.box = synth_detail::make_box(rng, page.width, page.height,
                                         0.02 + 0.1 * unit(rng));
        const auto& topic_list = synth_detail::topics();
        seg.topic = topic_list[static_cast<std::size_t>(unit(rng) * topic_list.size()) %
                               topic_list.size()];
        page.segments.push_back(std::move(seg));
      }
      edition.pages.push_back(std::move(page));
    }
    editions.push_back(std::move(edition));
  }
  return editions;
}

// Seeded panel generator with a planted regression structure:
//   y = alpha + beta_war * war (+ beta_pop * pop) + group effect + time effect + noise
// Group effects are per (source, entity). y is rounded to an integer the way
// real sentiment/count totals are; the rounding residual is part of the noise.
struct SynthPanelConfig {
  std::uint64_t seed = 1;
  int entities = 30;
  int sources = 2;
  int periods = 24;
  bool paired_entity_source = false;  // government style: entity i <-> source i
  double beta_war = 0.0189;
  double beta_popularity = 0.0;
  bool with_popularity = false;
  double alpha = 0.0;
  double sigma_group = 1.0;
  double sigma_time = 0.5;
  double sigma_noise = 0.5;
  double war_max = 20.0;       // war ~ U(0, war_max)
  double keep_probability = 1.0;  // < 1 unbalances the panel
  bool integerize = true;
  Dependent dependent = Dependent::sentiment_total;
};

struct SynthPanel {
  std::vector<PanelObservation> rows;
  double planted_beta = 0;
};

inline SynthPanel synth_panel(const SynthPanelConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int n_sources = cfg.paired_entity_source ? cfg.entities : cfg.sources;
  std::vector<std::vector<double>> group_effect(
      static_cast<std::size_t>(cfg.entities),
      std::vector<double>(static_cast<std::size_t>(n_sources), 0.0));
  for (auto& per_source : group_effect)
    for (double& g : per_source) g = cfg.sigma_group * gauss(rng);
  std::vector<double> time_effect(static_cast<std::size_t>(cfg.periods));
  for (double& d : time_effect) d = cfg.sigma_time * gauss(rng);

  SynthPanel out;
  out.planted_beta = cfg.beta_war;

  for (int e = 0; e < cfg.entities; ++e) {
    for (int s = 0; s < n_sources; ++s) {
      if (cfg.paired_entity_source && s != e) continue;
      for (int t = 0; t < cfg.periods; ++t) {
        double war = cfg.war_max * unit(rng);
        double pop = 100.0 * unit(rng);
        double keep = unit(rng);
        double eps = cfg.sigma_noise * gauss(rng);
        if (keep > cfg.keep_probability) continue;  // draws stay aligned across configs

        double y = cfg.alpha + cfg.beta_war * war +
                   group_effect[static_cast<std::size_t>(e)][static_cast<std::size_t>(s)] +
                   time_effect[static_cast<std::size_t>(t)] + eps;
        if (cfg.with_popularity) y += cfg.beta_popularity * pop;

        PanelObservation row;
        row.entity = "entity_" + std::to_string(e);
        row.source = cfg.paired_entity_source ? row.entity : "source_" + std::to_string(s);
        char period[16];
        std::snprintf(period, sizeof(period), "t%03d", t);
        row.period = period;
        row.weighted_ad_ratio = war;
        if (cfg.with_popularity) row.popularity = pop;

        long long y_int = cfg.integerize ? std::llround(y) : static_cast<long long>(y);
        if (cfg.dependent == Dependent::sentiment_total) {
          row.sentiment_total = y_int;
          row.article_count = std::max<long long>(std::llabs(y_int), 1);
        } else {
          row.article_count = std::max<long long>(y_int, 0);
          row.sentiment_total = 0;
        }
        out.rows.push_back(std::move(row));
      }
    }
  }
  return out;
}

}  // namespace pressad
