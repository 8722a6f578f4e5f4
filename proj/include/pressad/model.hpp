#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "pressad/date.hpp"

namespace pressad {

enum class SegmentKind { ad, article };

inline const char* to_string(SegmentKind k) {
  return k == SegmentKind::ad ? "ad" : "article";
}

// Page-relative units as emitted by the upstream extractor (pixels),
// top-left origin.
struct BoundingBox {
  double x = 0;
  double y = 0;
  double width = 0;
  double height = 0;

  double area() const { return width * height; }
  double right() const { return x + width; }
  double bottom() const { return y + height; }
};

struct Segment {
  SegmentKind kind = SegmentKind::ad;
  BoundingBox box;
  std::string text;                  // may be empty, common for ads
  std::optional<int> sentiment;      // -1, 0, +1 when present
  std::optional<std::string> topic;
};

struct PageRecord {
  std::string source;
  std::string city;
  Date date;
  int page_number = 0;
  int total_pages = 0;
  double width = 0;
  double height = 0;
  std::optional<double> physical_width_cm;
  std::optional<double> physical_height_cm;
  std::vector<Segment> segments;
};

struct EditionKey {
  std::string source;
  std::string city;
  Date date;

  std::string str() const { return source + "|" + city + "|" + date.iso(); }

  friend bool operator==(const EditionKey& a, const EditionKey& b) {
    return a.source == b.source && a.city == b.city && a.date == b.date;
  }
  friend bool operator<(const EditionKey& a, const EditionKey& b) {
    return std::tie(a.source, a.city, a.date) < std::tie(b.source, b.city, b.date);
  }
};

// One daily issue of one newspaper for one city; pages ordered by page_number.
struct Edition {
  std::string source;
  std::string city;
  Date date;
  std::vector<PageRecord> pages;

  EditionKey key() const { return {source, city, date}; }
};

// Identifies one segment within a corpus.
struct SegmentId {
  std::string source;
  std::string city;
  Date date;
  int page_number = 0;
  int segment_index = 0;

  std::string str() const {
    return source + "|" + city + "|" + date.iso() + "|p" + std::to_string(page_number) +
           "|s" + std::to_string(segment_index);
  }

  friend bool operator==(const SegmentId& a, const SegmentId& b) {
    return a.page_number == b.page_number && a.segment_index == b.segment_index &&
           a.date == b.date && a.source == b.source && a.city == b.city;
  }
  friend bool operator<(const SegmentId& a, const SegmentId& b) {
    return std::tie(a.source, a.city, a.date, a.page_number, a.segment_index) <
           std::tie(b.source, b.city, b.date, b.page_number, b.segment_index);
  }
};

// Violations are data, not failures.
struct Violation {
  std::string where;   // record that violated the rule
  std::string rule;    // short rule name, e.g. "duplicate page_number"
  std::string detail;

  friend bool operator==(const Violation& a, const Violation& b) {
    return a.where == b.where && a.rule == b.rule && a.detail == b.detail;
  }
  friend bool operator<(const Violation& a, const Violation& b) {
    return std::tie(a.where, a.rule, a.detail) < std::tie(b.where, b.rule, b.detail);
  }
};

// Detection models emit slightly out-of-range boxes; overshoot up to
// `tolerance` of the page dimension per edge is snapped back to the page.
// Larger overshoot is left alone for validation to flag. Returns the number
// of boxes adjusted.
inline std::size_t clamp_overshoot(PageRecord& page, double tolerance = 0.02) {
  std::size_t clamped = 0;
  if (page.width <= 0 || page.height <= 0) return 0;
  const double tol_x = tolerance * page.width;
  const double tol_y = tolerance * page.height;
  for (Segment& seg : page.segments) {
    BoundingBox& b = seg.box;
    double left_over = std::max(0.0, -b.x);
    double right_over = std::max(0.0, b.right() - page.width);
    double top_over = std::max(0.0, -b.y);
    double bottom_over = std::max(0.0, b.bottom() - page.height);
    if (left_over == 0 && right_over == 0 && top_over == 0 && bottom_over == 0) continue;
    if (left_over > tol_x || right_over > tol_x || top_over > tol_y || bottom_over > tol_y)
      continue;  // too far out; validate_edition reports it
    double right = std::min(b.right(), page.width);
    double bottom = std::min(b.bottom(), page.height);
    b.x = std::max(b.x, 0.0);
    b.y = std::max(b.y, 0.0);
    b.width = right - b.x;
    b.height = bottom - b.y;
    ++clamped;
  }
  return clamped;
}

namespace detail {

inline void check_segment(const Segment& seg, const PageRecord& page, const std::string& where,
                          std::vector<Violation>& out) {
  const BoundingBox& b = seg.box;
  if (!(b.width > 0) || !(b.height > 0)) {
    out.push_back({where, "degenerate box", "width and height must be > 0"});
    return;
  }
  if (b.x < 0 || b.y < 0 || b.right() > page.width || b.bottom() > page.height) {
    out.push_back({where, "box out of page bounds",
                   "box exceeds page beyond the clamping tolerance"});
  }
  if (seg.sentiment && *seg.sentiment != -1 && *seg.sentiment != 0 && *seg.sentiment != 1) {
    out.push_back({where, "sentiment out of domain",
                   "sentiment must be -1, 0 or +1, got " + std::to_string(*seg.sentiment)});
  }
}

}  // namespace detail

// Pure invariant check; empty result means the edition satisfies every
// invariant. Run clamp_overshoot first when ingesting raw extractor output.
inline std::vector<Violation> validate_edition(const Edition& e) {
  std::vector<Violation> out;
  const std::string ekey = e.key().str();

  if (e.pages.empty()) {
    out.push_back({ekey, "empty edition", "edition has no pages"});
    return out;
  }

  int total = e.pages.front().total_pages;
  std::set<int> seen;
  for (const PageRecord& page : e.pages) {
    const std::string pkey = ekey + "|p" + std::to_string(page.page_number);
    if (page.source != e.source || page.city != e.city || !(page.date == e.date))
      out.push_back({pkey, "page key mismatch", "page does not belong to this edition"});
    if (page.total_pages != total)
      out.push_back({pkey, "inconsistent total_pages",
                     std::to_string(page.total_pages) + " vs " + std::to_string(total)});
    if (page.total_pages < 1)
      out.push_back({pkey, "nonpositive total_pages", ""});
    if (page.page_number < 1 || page.page_number > page.total_pages)
      out.push_back({pkey, "page_number out of range",
                     std::to_string(page.page_number) + " of " +
                         std::to_string(page.total_pages)});
    if (!seen.insert(page.page_number).second)
      out.push_back({pkey, "duplicate page_number", ""});
    if (!(page.width > 0) || !(page.height > 0))
      out.push_back({pkey, "nonpositive page dimensions", ""});
    if (page.physical_width_cm && !(*page.physical_width_cm > 0))
      out.push_back({pkey, "nonpositive physical width", ""});
    if (page.physical_height_cm && !(*page.physical_height_cm > 0))
      out.push_back({pkey, "nonpositive physical height", ""});
    for (std::size_t i = 0; i < page.segments.size(); ++i)
      detail::check_segment(page.segments[i], page,
                            pkey + "|s" + std::to_string(i), out);
  }

  if (total >= 1 && static_cast<int>(seen.size()) == static_cast<int>(e.pages.size())) {
    for (int p = 1; p <= total; ++p)
      if (!seen.count(p)) {
        out.push_back({ekey, "missing page_number", "page " + std::to_string(p)});
      }
  }
  return out;
}

}  // namespace pressad
