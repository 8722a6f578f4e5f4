#pragma once

#include <set>
#include <string>
#include <vector>

#include "pressad/csv.hpp"
#include "pressad/metrics.hpp"
#include "pressad/observations.hpp"

namespace pressad {

// Plot-ready CSV emitters for the report subcommands. Row order is fixed
// (sorted keys) so reruns are byte-identical.

inline void write_placement_csv(const std::string& path, const PlacementReport& report) {
  CsvWriter w(path);
  w.row({"entity_class", "category", "ad_count", "ad_share_pct", "mean_page_area_share_pct",
         "total_area_share_pct", "spend_share_pct", "unpriceable_excluded", "status"});
  for (EntityClass cls : {EntityClass::government, EntityClass::companies}) {
    const PlacementRow& row = report.row(cls);
    for (PageCategory cat : kAllCategories) {
      const PlacementCell& cell = row.cell(cat);
      if (row.no_data) {
        w.row({to_string(cls), to_string(cat), "0", "", "", "", "", "0", "no data"});
        continue;
      }
      w.row({to_string(cls), to_string(cat), std::to_string(cell.ad_count),
             fmt_double(cell.ad_share), fmt_double(cell.mean_page_area_share),
             fmt_double(cell.total_area_share), fmt_double(cell.spend_share),
             std::to_string(row.unpriceable_excluded), "ok"});
    }
  }
}

inline void write_cdf_csv(const std::string& path, std::span<const AdObservation> ads,
                          bool exclude_overlaps = false) {
  CsvWriter w(path);
  w.row({"entity_class", "area_fraction", "cdf"});
  for (EntityClass cls : {EntityClass::government, EntityClass::companies}) {
    auto fractions = class_area_fractions(ads, cls, exclude_overlaps);
    if (fractions.empty()) continue;
    SizeCdf cdf(std::move(fractions));
    double prev = -1;
    for (double x : cdf.samples()) {
      if (x == prev) continue;
      prev = x;
      w.row({to_string(cls), fmt_double(x), fmt_double(cdf(x))});
    }
  }
}

inline void write_timeseries_csv(const std::string& path, std::span<const PageSample> pages) {
  CsvWriter w(path);
  w.row({"month", "source", "ad_area_ratio"});
  for (const auto& [month, ratio] : monthly_area_ratio(pages))
    w.row({month, "all", fmt_double(ratio)});
  for (const auto& [source, series] : monthly_area_ratio_by_source(pages))
    for (const auto& [month, ratio] : series) w.row({month, source, fmt_double(ratio)});
}

inline void write_weekday_csv(const std::string& path, std::span<const PageSample> pages) {
  static const char* names[7] = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
  CsvWriter w(path);
  w.row({"weekday", "ad_area_ratio", "status"});
  auto profile = weekday_area_profile(pages);
  for (std::size_t i = 0; i < 7; ++i) {
    if (profile[i]) w.row({names[i], fmt_double(*profile[i]), "ok"});
    else w.row({names[i], "", "absent"});
  }
}

inline void write_breakdown_csv(const std::string& path, const EntityBreakdown& breakdown) {
  CsvWriter w(path);
  w.row({"table", "key", "subkey", "value"});
  for (const auto& [name, c] : breakdown.companies) {
    w.row({"company_ads", name, "count", std::to_string(c.ad_count)});
    w.row({"company_ads", name, "share_pct", fmt_double(c.share_pct)});
    for (const auto& [source, count] : c.by_source)
      w.row({"company_by_source", name, source, std::to_string(count)});
  }
  for (std::size_t i = 0; i < breakdown.top_companies.size(); ++i)
    w.row({"top_companies", std::to_string(i + 1), "name", breakdown.top_companies[i]});
  for (const auto& [sector, hist] : breakdown.sector_hist) {
    for (std::size_t k = 0; k + 1 < kSizeBinEdges.size(); ++k) {
      std::string bin = fmt_double(kSizeBinEdges[k]) + "-" + fmt_double(kSizeBinEdges[k + 1]);
      w.row({"sector_size_hist", sector, bin, std::to_string(hist[k])});
    }
  }
}

inline void write_topics_csv(const std::string& path, const TopicCounts& topics) {
  CsvWriter w(path);
  w.row({"topic", "ad_count", "article_count"});
  for (const auto& [topic, counts] : topics.counts)
    w.row({topic, std::to_string(counts.first), std::to_string(counts.second)});
}

inline void write_priced_csv(const std::string& path, std::span<const AdObservation> ads) {
  CsvWriter w(path);
  w.row({"segment_id", "category", "area_fraction", "scaling_factor", "weighted_ad_ratio",
         "cost", "unpriceable"});
  for (const AdObservation& ad : ads) {
    w.row({ad.id.str(), to_string(ad.category), fmt_double(ad.area_fraction),
           fmt_double(ad.scaling_factor), fmt_double(ad.weighted_ad_ratio),
           ad.cost ? fmt_double(*ad.cost) : std::string{}, ad.cost ? "0" : "1"});
  }
}

}  // namespace pressad
