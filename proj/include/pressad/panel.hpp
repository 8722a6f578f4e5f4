#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "pressad/csv.hpp"
#include "pressad/date.hpp"
#include "pressad/errors.hpp"
#include "pressad/observations.hpp"

namespace pressad {

// One (entity, source, period) row. The government panel treats all
// government advertising as a single advertiser observed per newspaper, so
// its entity label is the source itself.
struct PanelObservation {
  std::string entity;
  std::string source;
  std::string period;
  double weighted_ad_ratio = 0;   // summed over the entity's ads
  long long sentiment_total = 0;  // sum of per-article labels in {-1,0,+1}
  long long article_count = 0;
  std::optional<double> popularity;
};

enum class PanelFocus { government, companies };

inline std::optional<PanelFocus> focus_from_string(std::string_view s) {
  if (s == "government") return PanelFocus::government;
  if (s == "companies") return PanelFocus::companies;
  return std::nullopt;
}

struct PanelOptions {
  Bucket bucket = Bucket::monthly;
  PanelFocus focus = PanelFocus::companies;
  // Include zero rows for every (entity, source) pair with activity anywhere
  // in the window, over all periods in which the source published.
  bool zero_fill = true;
};

// Google-trends style series: (entity, period) -> value in [0, 100].
struct PopularitySeries {
  std::map<std::pair<std::string, std::string>, double> values;
  std::size_t ignored_rows = 0;  // rows naming entities absent from the panel

  static PopularitySeries load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read popularity series: " + path.string());
    PopularitySeries out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto fields = csv_split(line);
      if (header) {
        header = false;
        if (fields.size() >= 3 && fields[0] == "entity") continue;  // header row optional
      }
      if (fields.size() != 3)
        throw ConfigError("popularity rows need entity,period,popularity");
      double v = 0;
      try {
        v = std::stod(fields[2]);
      } catch (const std::exception&) {
        throw ConfigError("bad popularity value '" + fields[2] + "'");
      }
      if (v < 0 || v > 100)
        throw ConfigError("popularity out of [0,100]: " + fields[2]);
      out.values[{fields[0], fields[1]}] = v;
    }
    return out;
  }
};

namespace detail {

struct PanelKey {
  std::string entity;
  std::string source;
  std::string period;
  friend bool operator<(const PanelKey& a, const PanelKey& b) {
    return std::tie(a.entity, a.source, a.period) < std::tie(b.entity, b.source, b.period);
  }
};

}  // namespace detail

// Aggregates ads and articles into the regression panel. Ads contribute
// their weighted ad ratio to every entity they matched; articles contribute
// one count and their sentiment label (absent labels count as 0 sentiment).
inline std::vector<PanelObservation> build_panel(std::span<const AdObservation> ads,
                                                 std::span<const ArticleObservation> articles,
                                                 std::span<const PageSample> pages,
                                                 const PanelOptions& opts,
                                                 const PopularitySeries* popularity = nullptr) {
  std::map<detail::PanelKey, PanelObservation> rows;
  std::set<std::pair<std::string, std::string>> support;  // (entity, source)
  std::map<std::string, std::set<std::string>> source_periods;

  for (const PageSample& p : pages)
    source_periods[p.source].insert(period_key(p.date, opts.bucket));

  auto row = [&](const std::string& entity, const std::string& source,
                 const std::string& period) -> PanelObservation& {
    detail::PanelKey key{entity, source, period};
    auto it = rows.find(key);
    if (it == rows.end()) {
      PanelObservation obs;
      obs.entity = entity;
      obs.source = source;
      obs.period = period;
      it = rows.emplace(key, std::move(obs)).first;
      support.insert({entity, source});
    }
    return it->second;
  };

  if (opts.focus == PanelFocus::government) {
    for (const AdObservation& ad : ads) {
      if (!ad.government) continue;
      row(ad.source(), ad.source(), period_key(ad.date(), opts.bucket)).weighted_ad_ratio +=
          ad.weighted_ad_ratio;
    }
    for (const ArticleObservation& art : articles) {
      if (!art.government) continue;
      PanelObservation& r =
          row(art.source(), art.source(), period_key(art.date(), opts.bucket));
      r.article_count += 1;
      r.sentiment_total += art.sentiment.value_or(0);
    }
  } else {
    for (const AdObservation& ad : ads) {
      for (const std::string& company : ad.companies)
        row(company, ad.source(), period_key(ad.date(), opts.bucket)).weighted_ad_ratio +=
            ad.weighted_ad_ratio;
    }
    for (const ArticleObservation& art : articles) {
      for (const std::string& company : art.companies) {
        PanelObservation& r =
            row(company, art.source(), period_key(art.date(), opts.bucket));
        r.article_count += 1;
        r.sentiment_total += art.sentiment.value_or(0);
      }
    }
  }

  if (opts.zero_fill) {
    for (const auto& [entity, source] : std::set(support)) {
      auto it = source_periods.find(source);
      if (it == source_periods.end()) continue;
      for (const std::string& period : it->second) row(entity, source, period);
    }
  }

  std::vector<PanelObservation> out;
  out.reserve(rows.size());
  for (auto& [key, obs] : rows) {
    if (popularity) {
      auto it = popularity->values.find({obs.entity, obs.period});
      if (it != popularity->values.end()) obs.popularity = it->second;
    }
    out.push_back(std::move(obs));
  }
  return out;
}

// Series rows naming entities that never appear in the panel; ignored with a
// warning by the CLI.
inline std::size_t popularity_unmatched(const PopularitySeries& series,
                                        std::span<const PanelObservation> panel) {
  std::set<std::string> entities;
  for (const auto& r : panel) entities.insert(r.entity);
  std::size_t n = 0;
  for (const auto& [key, value] : series.values)
    if (!entities.count(key.first)) ++n;
  return n;
}

inline void write_panel_csv(const std::string& path,
                            std::span<const PanelObservation> panel) {
  CsvWriter w(path);
  w.row({"entity", "source", "period", "weighted_ad_ratio", "sentiment_total",
         "article_count", "popularity"});
  for (const PanelObservation& r : panel) {
    w.row({r.entity, r.source, r.period, fmt_double(r.weighted_ad_ratio),
           std::to_string(r.sentiment_total), std::to_string(r.article_count),
           r.popularity ? fmt_double(*r.popularity) : std::string{}});
  }
}

inline std::vector<PanelObservation> read_panel_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read panel: " + path.string());
  std::vector<PanelObservation> out;
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (first) {
      first = false;
      if (!fields.empty() && fields[0] == "entity") continue;
    }
    if (fields.size() != 7)
      throw ConfigError("panel row " + std::to_string(lineno) + ": expected 7 columns");
    PanelObservation r;
    r.entity = fields[0];
    r.source = fields[1];
    r.period = fields[2];
    try {
      r.weighted_ad_ratio = std::stod(fields[3]);
      r.sentiment_total = std::stoll(fields[4]);
      r.article_count = std::stoll(fields[5]);
      if (!fields[6].empty()) r.popularity = std::stod(fields[6]);
    } catch (const std::exception&) {
      throw ConfigError("panel row " + std::to_string(lineno) + ": bad numeric field");
    }
    if (r.popularity && (*r.popularity < 0 || *r.popularity > 100))
      throw ConfigError("panel row " + std::to_string(lineno) + ": popularity out of [0,100]");
    out.push_back(std::move(r));
  }
  std::set<std::tuple<std::string, std::string, std::string>> keys;
  for (const auto& r : out)
    if (!keys.insert({r.entity, r.source, r.period}).second)
      throw ConfigError("panel has duplicate (entity, source, period): " + r.entity + ", " +
                        r.source + ", " + r.period);
  return out;
}

}  // namespace pressad
