#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pressad/errors.hpp"
#include "pressad/model.hpp"

namespace pressad {

inline constexpr int kSchemaVersion = 1;

struct ParseResult {
  std::vector<Edition> editions;       // sorted by (source, city, date), validated
  std::vector<Violation> violations;   // malformed lines and invariant breaks
  std::size_t lines_read = 0;
  std::size_t clamped_boxes = 0;
  std::size_t duplicate_pages_dropped = 0;  // keep-first, warned not violated
  std::size_t editions_rejected = 0;        // editions excluded for violations
};

namespace detail {

inline bool get_number(const nlohmann::json& j, const char* key, double& out) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return false;
  out = it->get<double>();
  return true;
}

// One JSONL line -> PageRecord. Throws nlohmann::json::exception or
// std::runtime_error with a short reason; the caller converts to a Violation.
inline PageRecord page_from_json(const nlohmann::json& j) {
  auto it = j.find("schema");
  if (it == j.end() || !it->is_number_integer())
    throw std::runtime_error("missing schema field");
  if (it->get<int>() != kSchemaVersion)
    throw ConfigError("unsupported schema version " + it->dump() + ", expected " +
                      std::to_string(kSchemaVersion));

  PageRecord page;
  page.source = j.at("source").get<std::string>();
  page.city = j.at("city").get<std::string>();
  if (page.source.find('|') != std::string::npos || page.city.find('|') != std::string::npos)
    throw std::runtime_error("'|' is reserved in source/city labels");
  auto date = Date::parse(j.at("date").get<std::string>());
  if (!date) throw std::runtime_error("invalid date, expected YYYY-MM-DD");
  page.date = *date;
  page.page_number = j.at("page_number").get<int>();
  page.total_pages = j.at("total_pages").get<int>();
  if (!get_number(j, "width", page.width) || !get_number(j, "height", page.height))
    throw std::runtime_error("missing page width/height");

  double cm = 0;
  if (j.contains("physical_width_cm") && !j["physical_width_cm"].is_null()) {
    if (!get_number(j, "physical_width_cm", cm))
      throw std::runtime_error("physical_width_cm must be a number or null");
    page.physical_width_cm = cm;
  }
  if (j.contains("physical_height_cm") && !j["physical_height_cm"].is_null()) {
    if (!get_number(j, "physical_height_cm", cm))
      throw std::runtime_error("physical_height_cm must be a number or null");
    page.physical_height_cm = cm;
  }

  for (const auto& sj : j.at("segments")) {
    Segment seg;
    std::string kind = sj.at("kind").get<std::string>();
    if (kind == "ad") seg.kind = SegmentKind::ad;
    else if (kind == "article") seg.kind = SegmentKind::article;
    else throw std::runtime_error("unknown segment kind '" + kind + "'");
    const auto& bj = sj.at("box");
    seg.box.x = bj.at("x").get<double>();
    seg.box.y = bj.at("y").get<double>();
    seg.box.width = bj.at("w").get<double>();
    seg.box.height = bj.at("h").get<double>();
    seg.text = sj.value("text", std::string{});
    if (sj.contains("sentiment") && !sj["sentiment"].is_null()) {
      if (!sj["sentiment"].is_number_integer())
        throw std::runtime_error("sentiment must be an integer or null");
      seg.sentiment = sj["sentiment"].get<int>();
    }
    if (sj.contains("topic") && !sj["topic"].is_null())
      seg.topic = sj["topic"].get<std::string>();
    page.segments.push_back(std::move(seg));
  }
  return page;
}

inline nlohmann::json page_to_json(const PageRecord& page) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["source"] = page.source;
  j["city"] = page.city;
  j["date"] = page.date.iso();
  j["page_number"] = page.page_number;
  j["total_pages"] = page.total_pages;
  j["width"] = page.width;
  j["height"] = page.height;
  j["physical_width_cm"] =
      page.physical_width_cm ? nlohmann::json(*page.physical_width_cm) : nlohmann::json();
  j["physical_height_cm"] =
      page.physical_height_cm ? nlohmann::json(*page.physical_height_cm) : nlohmann::json();
  auto segs = nlohmann::json::array();
  for (const Segment& s : page.segments) {
    nlohmann::json sj;
    sj["kind"] = to_string(s.kind);
    sj["box"] = {{"x", s.box.x}, {"y", s.box.y}, {"w", s.box.width}, {"h", s.box.height}};
    sj["text"] = s.text;
    sj["sentiment"] = s.sentiment ? nlohmann::json(*s.sentiment) : nlohmann::json();
    sj["topic"] = s.topic ? nlohmann::json(*s.topic) : nlohmann::json();
    segs.push_back(std::move(sj));
  }
  j["segments"] = std::move(segs);
  return j;
}

}  // namespace detail

// Groups one-page-per-line records into editions keyed by (source, city,
// date). Malformed lines and invariant violations become Violations, never
// aborts; a schema-version mismatch is a configuration error and does abort.
// Editions with violations are reported and excluded from `editions`, so the
// result satisfies every model invariant by construction. Duplicate
// (source, city, date, page_number) keeps the first occurrence.
inline ParseResult parse_records(std::istream& in, const std::string& stream_name = "<input>") {
  if (!in) throw IoError("unreadable input stream: " + stream_name);

  ParseResult res;
  std::map<EditionKey, Edition> by_key;
  std::map<EditionKey, std::set<int>> seen_pages;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    ++res.lines_read;
    if (line.empty()) continue;
    PageRecord page;
    try {
      page = detail::page_from_json(nlohmann::json::parse(line));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      res.violations.push_back(
          {stream_name + ":" + std::to_string(lineno), "malformed record", e.what()});
      continue;
    }
    res.clamped_boxes += clamp_overshoot(page);
    EditionKey key{page.source, page.city, page.date};
    if (!seen_pages[key].insert(page.page_number).second) {
      ++res.duplicate_pages_dropped;  // keep-first
      continue;
    }
    Edition& e = by_key[key];
    if (e.pages.empty()) {
      e.source = page.source;
      e.city = page.city;
      e.date = page.date;
    }
    e.pages.push_back(std::move(page));
  }
  if (in.bad()) throw IoError("I/O error while reading " + stream_name);

  for (auto& [key, edition] : by_key) {
    std::sort(edition.pages.begin(), edition.pages.end(),
              [](const PageRecord& a, const PageRecord& b) {
                return a.page_number < b.page_number;
              });
    auto violations = validate_edition(edition);
    if (violations.empty()) {
      res.editions.push_back(std::move(edition));
    } else {
      ++res.editions_rejected;
      res.violations.insert(res.violations.end(), violations.begin(), violations.end());
    }
  }
  return res;
}

}  // namespace pressad
