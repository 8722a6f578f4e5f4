#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pressad/errors.hpp"
#include "pressad/model.hpp"
#include "pressad/rate_card.hpp"

namespace pressad {

// 1 -> Front, 3 -> Third, last -> Back, else Other. For tiny papers the
// precedence Front > Third > Back keeps the partition well-defined:
// (1,1) is Front, (3,3) is Third.
inline PageCategory page_category(int page_number, int total_pages) {
  if (total_pages < 1 || page_number < 1 || page_number > total_pages)
    throw DomainError("page_category: page " + std::to_string(page_number) + " of " +
                      std::to_string(total_pages) + " out of range");
  if (page_number == 1) return PageCategory::front;
  if (page_number == 3) return PageCategory::third;
  if (page_number == total_pages) return PageCategory::back;
  return PageCategory::other;
}

// Fraction of the page covered by the segment's box, in (0, 1] for boxes
// satisfying the model invariants.
inline double area_fraction(const Segment& seg, const PageRecord& page) {
  return seg.box.area() / (page.width * page.height);
}

// Scaling factor x area fraction: the prominence/investment proxy for one ad.
inline double weighted_ad_ratio(const Segment& seg, const PageRecord& page,
                                const RateCard& card) {
  if (seg.kind != SegmentKind::ad)
    throw DomainError("weighted_ad_ratio is defined for ads only");
  PageCategory cat = page_category(page.page_number, page.total_pages);
  return card.scaling_factor(page.source, page.city, cat) * area_fraction(seg, page);
}

// Physical page size used for pricing: the record's own dimensions when
// present, else the rate card's per-source (or global) default.
inline std::optional<PhysicalSize> physical_size(const PageRecord& page, const RateCard& card) {
  if (page.physical_width_cm && page.physical_height_cm)
    return PhysicalSize{*page.physical_width_cm, *page.physical_height_cm};
  return card.physical_default(page.source);
}

// Ad area in cm² times the category rate. Empty when the page has no
// physical dimensions and no default is configured ("unpriceable"); spend
// aggregates skip those and report the exclusion count.
inline std::optional<double> cost_estimate(const Segment& seg, const PageRecord& page,
                                           const RateCard& card) {
  if (seg.kind != SegmentKind::ad)
    throw DomainError("cost_estimate is defined for ads only");
  auto size = physical_size(page, card);
  if (!size) return std::nullopt;
  PageCategory cat = page_category(page.page_number, page.total_pages);
  return area_fraction(seg, page) * size->area_cm2() *
         card.rate(page.source, page.city, cat);
}

// Column-aware reading order: boxes are clustered into columns by horizontal
// overlap (>= 50% of the narrower box, transitively), columns run left to
// right, and boxes within a column top to bottom. Returns a permutation of
// the input indices, deterministic under input permutation because every
// sort key is geometric.
inline std::vector<std::size_t> reading_order(std::span<const BoundingBox> boxes) {
  const std::size_t n = boxes.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double overlap = std::min(boxes[i].right(), boxes[j].right()) -
                       std::max(boxes[i].x, boxes[j].x);
      double narrower = std::min(boxes[i].width, boxes[j].width);
      if (overlap >= 0.5 * narrower) unite(i, j);
    }
  }

  struct Column {
    double min_x = 0, min_y = 0;
    std::vector<std::size_t> members;
  };
  std::vector<std::optional<Column>> columns(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t root = find(i);
    if (!columns[root]) columns[root] = Column{boxes[i].x, boxes[i].y, {}};
    Column& col = *columns[root];
    col.min_x = std::min(col.min_x, boxes[i].x);
    col.min_y = std::min(col.min_y, boxes[i].y);
    col.members.push_back(i);
  }

  std::vector<Column> ordered;
  for (auto& c : columns)
    if (c) ordered.push_back(std::move(*c));
  std::sort(ordered.begin(), ordered.end(), [](const Column& a, const Column& b) {
    if (a.min_x != b.min_x) return a.min_x < b.min_x;
    return a.min_y < b.min_y;
  });

  std::vector<std::size_t> out;
  out.reserve(n);
  for (Column& col : ordered) {
    std::sort(col.members.begin(), col.members.end(), [&](std::size_t a, std::size_t b) {
      if (boxes[a].y != boxes[b].y) return boxes[a].y < boxes[b].y;
      if (boxes[a].x != boxes[b].x) return boxes[a].x < boxes[b].x;
      if (boxes[a].width != boxes[b].width) return boxes[a].width < boxes[b].width;
      return boxes[a].height < boxes[b].height;
    });
    out.insert(out.end(), col.members.begin(), col.members.end());
  }
  return out;
}

}  // namespace pressad
