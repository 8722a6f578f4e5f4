#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pressad/geometry.hpp"
#include "pressad/model.hpp"
#include "pressad/rate_card.hpp"
#include "pressad/rules.hpp"
#include "pressad/store.hpp"

namespace pressad {

// One ad segment with its pricing quantities and entity classification.
struct AdObservation {
  SegmentId id;
  PageCategory category = PageCategory::other;
  double area_fraction = 0;
  double scaling_factor = 0;
  double weighted_ad_ratio = 0;
  std::optional<double> cost;  // empty: unpriceable
  bool government = false;
  std::vector<std::string> companies;
  std::optional<std::string> topic;

  const std::string& source() const { return id.source; }
  const Date& date() const { return id.date; }
  int page_number() const { return id.page_number; }
};

// One article segment with its sentiment label and entity classification.
// `government` means the article matched the corruption rule.
struct ArticleObservation {
  SegmentId id;
  std::optional<int> sentiment;
  bool government = false;
  std::vector<std::string> companies;
  std::optional<std::string> topic;

  const std::string& source() const { return id.source; }
  const Date& date() const { return id.date; }
};

// Per-page ad coverage, the unit for the time-series metrics. Pages are
// weighted equally regardless of their pixel size.
struct PageSample {
  std::string source;
  Date date;
  double ad_area_fraction = 0;  // sum of ad areas / page area
};

struct ObservationSet {
  std::vector<AdObservation> ads;
  std::vector<ArticleObservation> articles;
  std::vector<PageSample> pages;
  std::size_t rate_fallbacks = 0;  // segments priced off a source-mean row
};

inline void append_observations(const Edition& edition, const MatchIndex& matches,
                                const RateCard& card, ObservationSet& out) {
  for (const PageRecord& page : edition.pages) {
    PageCategory cat = page_category(page.page_number, page.total_pages);
    double page_area = page.width * page.height;
    double ad_area = 0;
    if (card.resolve(page.source, page.city).fallback && !page.segments.empty())
      out.rate_fallbacks += page.segments.size();
    for (std::size_t i = 0; i < page.segments.size(); ++i) {
      const Segment& seg = page.segments[i];
      SegmentId id{page.source, page.city, page.date, page.page_number,
                   static_cast<int>(i)};
      const MatchIndex::Entry* match = matches.find(id.str());
      if (seg.kind == SegmentKind::ad) {
        ad_area += seg.box.area();
        AdObservation obs;
        obs.id = std::move(id);
        obs.category = cat;
        obs.area_fraction = seg.box.area() / page_area;
        obs.scaling_factor = card.scaling_factor(page.source, page.city, cat);
        obs.weighted_ad_ratio = obs.scaling_factor * obs.area_fraction;
        obs.cost = cost_estimate(seg, page, card);
        obs.topic = seg.topic;
        if (match) {
          obs.government = match->government;
          obs.companies = match->companies;
        }
        out.ads.push_back(std::move(obs));
      } else {
        ArticleObservation obs;
        obs.id = std::move(id);
        obs.sentiment = seg.sentiment;
        obs.topic = seg.topic;
        if (match) {
          obs.government = match->government;
          obs.companies = match->companies;
        }
        out.articles.push_back(std::move(obs));
      }
    }
    out.pages.push_back({page.source, page.date, ad_area / page_area});
  }
}

inline ObservationSet build_observations(const CorpusStore& store, const MatchIndex& matches,
                                         const RateCard& card) {
  ObservationSet out;
  store.for_each_edition(
      [&](const Edition& e) { append_observations(e, matches, card, out); });
  return out;
}

// In-process classification shortcut used by tests and the synth profile.
inline MatchIndex classify_editions(const std::vector<Edition>& editions,
                                    const EntityRuleSet& rules) {
  MatchIndex index;
  for (const Edition& e : editions)
    for (const PageRecord& page : e.pages)
      for (std::size_t i = 0; i < page.segments.size(); ++i) {
        SegmentId id{page.source, page.city, page.date, page.page_number,
                     static_cast<int>(i)};
        index.add(classify_segment(id, page.segments[i].kind, page.segments[i].text, rules));
      }
  return index;
}

}  // namespace pressad
