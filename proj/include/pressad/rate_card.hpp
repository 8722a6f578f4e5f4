#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pressad/errors.hpp"

namespace pressad {

// Page placement taxonomy. Pages 1, 3 and the last page command premium
// rates; everything else prices at the base rate.
enum class PageCategory { front, third, back, other };

inline const char* to_string(PageCategory c) {
  switch (c) {
    case PageCategory::front: return "front";
    case PageCategory::third: return "third";
    case PageCategory::back: return "back";
    case PageCategory::other: return "other";
  }
  return "?";
}

inline constexpr PageCategory kAllCategories[] = {PageCategory::front, PageCategory::third,
                                                  PageCategory::back, PageCategory::other};

struct RateRow {
  double front = 0;
  double third = 0;
  double back = 0;
  double base = 0;

  double rate(PageCategory c) const {
    switch (c) {
      case PageCategory::front: return front;
      case PageCategory::third: return third;
      case PageCategory::back: return back;
      case PageCategory::other: return base;
    }
    return base;
  }
};

struct PhysicalSize {
  double width_cm = 0;
  double height_cm = 0;
  double area_cm2() const { return width_cm * height_cm; }
};

// Per (source, city) advertising rates in currency per cm². Rows missing a
// requested city fall back to the source's mean row. min_rate is the minimum
// base rate over all loaded rows.
class RateCard {
 public:
  struct Resolved {
    const RateRow* row;
    bool fallback;  // source mean used because (source, city) had no row
  };

  static RateCard from_json(const nlohmann::json& j) {
    RateCard card;
    for (const auto& rj : j.at("rows")) {
      std::string source = rj.at("source").get<std::string>();
      std::string city = rj.at("city").get<std::string>();
      RateRow row{rj.at("front").get<double>(), rj.at("third").get<double>(),
                  rj.at("back").get<double>(), rj.at("base").get<double>()};
      if (!(row.front > 0 && row.third > 0 && row.back > 0 && row.base > 0))
        throw ConfigError("non-positive rate for " + source + " / " + city);
      if (row.front < row.base)
        card.load_warnings_.push_back("front rate below base rate for " + source + " / " +
                                      city);
      if (!card.rows_.emplace(std::make_pair(source, city), row).second)
        throw ConfigError("duplicate rate row for " + source + " / " + city);
    }
    if (card.rows_.empty()) throw ConfigError("rate card has no rows");

    card.min_rate_ = std::numeric_limits<double>::infinity();
    std::map<std::string, std::pair<RateRow, int>> acc;
    for (const auto& [key, row] : card.rows_) {
      card.min_rate_ = std::min(card.min_rate_, row.base);
      auto& [sum, n] = acc[key.first];
      sum.front += row.front;
      sum.third += row.third;
      sum.back += row.back;
      sum.base += row.base;
      n += 1;
    }
    for (auto& [source, pair] : acc) {
      auto& [sum, n] = pair;
      card.source_mean_[source] =
          RateRow{sum.front / n, sum.third / n, sum.back / n, sum.base / n};
    }

    if (j.contains("physical_defaults")) {
      for (const auto& [key, pj] : j.at("physical_defaults").items()) {
        PhysicalSize size{pj.at("width_cm").get<double>(), pj.at("height_cm").get<double>()};
        if (!(size.width_cm > 0 && size.height_cm > 0))
          throw ConfigError("non-positive physical default for " + key);
        if (key == "default") card.default_physical_ = size;
        else card.physical_by_source_[key] = size;
      }
    }
    return card;
  }

  static RateCard load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read rate card: " + path.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ConfigError("malformed rate card " + path.string() + ": " + e.what());
    }
    return from_json(j);
  }

  static RateCard builtin_defaults();

  Resolved resolve(const std::string& source, const std::string& city) const {
    auto it = rows_.find({source, city});
    if (it != rows_.end()) return {&it->second, false};
    auto sit = source_mean_.find(source);
    if (sit != source_mean_.end()) return {&sit->second, true};
    throw ConfigError("rate card has no row or fallback for source '" + source + "'");
  }

  double rate(const std::string& source, const std::string& city, PageCategory cat) const {
    return resolve(source, city).row->rate(cat);
  }

  // rate(cat) / base rate of the same row; exactly 1 for Other pages.
  double scaling_factor(const std::string& source, const std::string& city,
                        PageCategory cat) const {
    if (cat == PageCategory::other) return 1.0;
    const RateRow* row = resolve(source, city).row;
    return row->rate(cat) / row->base;
  }

  // rate(cat) / global minimum base rate; >= 1 with a well-formed card.
  double normalized_rate(const std::string& source, const std::string& city,
                         PageCategory cat) const {
    return rate(source, city, cat) / min_rate_;
  }

  double min_rate() const { return min_rate_; }
  const std::vector<std::string>& load_warnings() const { return load_warnings_; }

  std::optional<PhysicalSize> physical_default(const std::string& source) const {
    auto it = physical_by_source_.find(source);
    if (it != physical_by_source_.end()) return it->second;
    return default_physical_;
  }

  const std::map<std::pair<std::string, std::string>, RateRow>& rows() const { return rows_; }

 private:
  std::map<std::pair<std::string, std::string>, RateRow> rows_;
  std::map<std::string, RateRow> source_mean_;
  std::map<std::string, PhysicalSize> physical_by_source_;
  std::optional<PhysicalSize> default_physical_;
  double min_rate_ = 0;
  std::vector<std::string> load_warnings_;
};

}  // namespace pressad
