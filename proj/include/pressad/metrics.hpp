#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pressad/errors.hpp"
#include "pressad/observations.hpp"
#include "pressad/rate_card.hpp"
#include "pressad/rules.hpp"

namespace pressad {

enum class EntityClass { government, companies };

inline const char* to_string(EntityClass c) {
  return c == EntityClass::government ? "Government" : "Companies";
}

inline bool in_class(const AdObservation& ad, EntityClass cls, bool exclude_overlaps) {
  bool gov = ad.government;
  bool com = !ad.companies.empty();
  if (exclude_overlaps && gov && com) return false;
  return cls == EntityClass::government ? gov : com;
}

// The four placement variables for one entity class on one page category.
struct PlacementCell {
  std::size_t ad_count = 0;
  double ad_share = 0;               // % of the class's ads on this category
  double mean_page_area_share = 0;   // mean % of page covered, per ad, when present
  double total_area_share = 0;       // % of the class's total ad area here
  double spend_share = 0;            // % of the class's priced spend here
};

struct PlacementRow {
  bool no_data = true;
  std::size_t unpriceable_excluded = 0;  // ads skipped from spend shares
  double total_spend = 0;
  std::array<PlacementCell, 4> cells;    // indexed by PageCategory order

  const PlacementCell& cell(PageCategory c) const {
    return cells[static_cast<std::size_t>(c)];
  }
};

struct PlacementReport {
  PlacementRow government;
  PlacementRow companies;

  const PlacementRow& row(EntityClass c) const {
    return c == EntityClass::government ? government : companies;
  }
};

namespace detail {

// Summing in sorted order makes every aggregate bit-identical under input
// permutation, which the determinism contract promises.
inline double sorted_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double sum = 0;
  for (double v : values) sum += v;
  return sum;
}

inline PlacementRow placement_row(std::span<const AdObservation> ads, EntityClass cls,
                                  bool exclude_overlaps) {
  PlacementRow row;
  std::array<std::vector<double>, 4> areas;
  std::array<std::vector<double>, 4> spends;
  std::size_t total_ads = 0;

  for (const AdObservation& ad : ads) {
    if (!in_class(ad, cls, exclude_overlaps)) continue;
    auto k = static_cast<std::size_t>(ad.category);
    ++row.cells[k].ad_count;
    ++total_ads;
    areas[k].push_back(ad.area_fraction);
    if (ad.cost) spends[k].push_back(*ad.cost);
    else ++row.unpriceable_excluded;
  }
  if (total_ads == 0) return row;
  row.no_data = false;

  std::array<double, 4> area_sum{}, spend_sum{};
  double total_area = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    area_sum[k] = sorted_sum(areas[k]);
    spend_sum[k] = sorted_sum(spends[k]);
    total_area += area_sum[k];
    row.total_spend += spend_sum[k];
  }
  for (std::size_t k = 0; k < 4; ++k) {
    PlacementCell& cell = row.cells[k];
    cell.ad_share = 100.0 * static_cast<double>(cell.ad_count) / static_cast<double>(total_ads);
    cell.mean_page_area_share =
        cell.ad_count ? 100.0 * area_sum[k] / static_cast<double>(cell.ad_count) : 0.0;
    cell.total_area_share = total_area > 0 ? 100.0 * area_sum[k] / total_area : 0.0;
    cell.spend_share = row.total_spend > 0 ? 100.0 * spend_sum[k] / row.total_spend : 0.0;
  }
  return row;
}

}  // namespace detail

// The §4-style placement picture: ad counts, sizes, area and spend shares by
// page category for government vs company advertisers. Ads matching both
// classes count in both unless exclude_overlaps is set.
inline PlacementReport placement_report(std::span<const AdObservation> ads,
                                        bool exclude_overlaps = false) {
  PlacementReport report;
  report.government = detail::placement_row(ads, EntityClass::government, exclude_overlaps);
  report.companies = detail::placement_row(ads, EntityClass::companies, exclude_overlaps);
  return report;
}

// Empirical CDF over ad area fractions.
class SizeCdf {
 public:
  explicit SizeCdf(std::vector<double> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw DomainError("size_cdf: empty sample");
    std::sort(samples_.begin(), samples_.end());
  }

  // fraction of samples <= x
  double operator()(double x) const {
    auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
    return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
  }

  const std::vector<double>& samples() const { return samples_; }

 private:
  std::vector<double> samples_;
};

inline SizeCdf size_cdf(std::vector<double> area_fractions) {
  return SizeCdf(std::move(area_fractions));
}

inline std::vector<double> class_area_fractions(std::span<const AdObservation> ads,
                                                EntityClass cls,
                                                bool exclude_overlaps = false) {
  std::vector<double> out;
  for (const AdObservation& ad : ads)
    if (in_class(ad, cls, exclude_overlaps)) out.push_back(ad.area_fraction);
  return out;
}

// Counts of the class's ads on odd vs even page numbers.
inline std::pair<std::size_t, std::size_t> odd_even_counts(std::span<const AdObservation> ads,
                                                           EntityClass cls,
                                                           bool exclude_overlaps = false) {
  std::size_t odd = 0, even = 0;
  for (const AdObservation& ad : ads) {
    if (!in_class(ad, cls, exclude_overlaps)) continue;
    (ad.page_number() % 2 == 1 ? odd : even)++;
  }
  return {odd, even};
}

// Mean per-page ad-area fraction by calendar month; months with zero pages
// are omitted. Pages weigh equally, so the aggregate equals the
// page-count-weighted mean of the per-source series.
inline std::map<std::string, double> monthly_area_ratio(std::span<const PageSample> pages) {
  std::map<std::string, std::vector<double>> acc;
  for (const PageSample& p : pages) acc[p.date.month_key()].push_back(p.ad_area_fraction);
  std::map<std::string, double> out;
  for (auto& [month, values] : acc)
    out[month] = detail::sorted_sum(values) / static_cast<double>(values.size());
  return out;
}

inline std::map<std::string, std::map<std::string, double>> monthly_area_ratio_by_source(
    std::span<const PageSample> pages) {
  std::map<std::string, std::vector<PageSample>> by_source;
  for (const PageSample& p : pages) by_source[p.source].push_back(p);
  std::map<std::string, std::map<std::string, double>> out;
  for (const auto& [source, samples] : by_source)
    out[source] = monthly_area_ratio(samples);
  return out;
}

// Mean ad-area fraction per weekday, Monday first; absent weekdays stay empty.
inline std::array<std::optional<double>, 7> weekday_area_profile(
    std::span<const PageSample> pages) {
  std::array<std::vector<double>, 7> acc;
  for (const PageSample& p : pages)
    acc[p.date.weekday_index()].push_back(p.ad_area_fraction);
  std::array<std::optional<double>, 7> out;
  for (std::size_t i = 0; i < 7; ++i)
    if (!acc[i].empty())
      out[i] = detail::sorted_sum(acc[i]) / static_cast<double>(acc[i].size());
  return out;
}

// Histogram bin edges for ad sizes; the top bin is closed at 1.
inline constexpr std::array<double, 7> kSizeBinEdges = {0.0, 0.05, 0.10, 0.25,
                                                        0.50, 0.75, 1.0};

inline std::size_t size_bin(double area_fraction) {
  for (std::size_t k = 0; k + 1 < kSizeBinEdges.size(); ++k)
    if (area_fraction < kSizeBinEdges[k + 1]) return k;
  return kSizeBinEdges.size() - 2;  // area_fraction == 1 lands in the top bin
}

struct CompanyBreakdown {
  std::size_t ad_count = 0;
  double share_pct = 0;                          // of all company-matched ads
  std::map<std::string, std::size_t> by_source;  // ad counts per newspaper
};

struct EntityBreakdown {
  std::map<std::string, CompanyBreakdown> companies;       // omits absent companies
  std::map<std::string, std::array<std::size_t, 6>> sector_hist;
  std::vector<std::string> top_companies;                   // by count, ties lexicographic
};

// Per-company counts and source splits plus per-sector ad-size histograms.
// An ad matching several companies counts once for each.
inline EntityBreakdown entity_breakdown(std::span<const AdObservation> ads,
                                        const EntityRuleSet& rules, std::size_t top_n = 15) {
  EntityBreakdown out;
  std::size_t total = 0;
  for (const AdObservation& ad : ads) {
    for (const std::string& company : ad.companies) {
      CompanyBreakdown& c = out.companies[company];
      ++c.ad_count;
      ++c.by_source[ad.source()];
      ++total;
      std::string sector = rules.sector_of(company);
      if (sector.empty()) sector = "Other";
      ++out.sector_hist[sector][size_bin(ad.area_fraction)];
    }
  }
  if (total) {
    for (auto& [name, c] : out.companies)
      c.share_pct = 100.0 * static_cast<double>(c.ad_count) / static_cast<double>(total);
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (const auto& [name, c] : out.companies) ranked.emplace_back(name, c.ad_count);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (std::size_t i = 0; i < ranked.size() && i < top_n; ++i)
    out.top_companies.push_back(ranked[i].first);
  return out;
}

// Counting over ingested topic labels; the topic model itself lives upstream.
struct TopicCounts {
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // topic -> (ads, articles)
};

inline TopicCounts topic_counts(std::span<const AdObservation> ads,
                                std::span<const ArticleObservation> articles) {
  TopicCounts out;
  for (const AdObservation& a : ads)
    if (a.topic) out.counts[*a.topic].first++;
  for (const ArticleObservation& a : articles)
    if (a.topic) out.counts[*a.topic].second++;
  return out;
}

}  // namespace pressad
