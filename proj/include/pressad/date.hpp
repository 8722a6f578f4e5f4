#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace pressad {

// Calendar date (no time zone; print editions are daily).
struct Date {
  std::chrono::year_month_day ymd{};

  Date() = default;
  Date(int y, unsigned m, unsigned d)
      : ymd(std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}) {}

  bool ok() const { return ymd.ok(); }

  // Strict ISO-8601 "YYYY-MM-DD"; rejects garbage and invalid calendar dates.
  static std::optional<Date> parse(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto digits = [](std::string_view v) {
      for (char c : v)
        if (c < '0' || c > '9') return false;
      return true;
    };
    if (!digits(s.substr(0, 4)) || !digits(s.substr(5, 2)) || !digits(s.substr(8, 2)))
      return std::nullopt;
    int y = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
    unsigned m = static_cast<unsigned>((s[5] - '0') * 10 + (s[6] - '0'));
    unsigned d = static_cast<unsigned>((s[8] - '0') * 10 + (s[9] - '0'));
    Date out{y, m, d};
    if (!out.ok()) return std::nullopt;
    return out;
  }

  std::string iso() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }

  std::chrono::sys_days days() const { return std::chrono::sys_days(ymd); }

  // 0 = Monday ... 6 = Sunday
  unsigned weekday_index() const {
    return std::chrono::weekday(days()).iso_encoding() - 1;
  }

  // "YYYY-MM"
  std::string month_key() const {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()));
    return buf;
  }

  // Monday of the ISO week containing this date.
  Date week_start() const {
    auto monday = days() - std::chrono::days{weekday_index()};
    Date out;
    out.ymd = std::chrono::year_month_day{monday};
    return out;
  }

  friend bool operator==(const Date& a, const Date& b) { return a.ymd == b.ymd; }
  friend std::strong_ordering operator<=>(const Date& a, const Date& b) {
    return a.ymd <=> b.ymd;
  }
};

enum class Bucket { daily, weekly, monthly };

inline std::optional<Bucket> bucket_from_string(std::string_view s) {
  if (s == "daily") return Bucket::daily;
  if (s == "weekly") return Bucket::weekly;
  if (s == "monthly") return Bucket::monthly;
  return std::nullopt;
}

inline const char* to_string(Bucket b) {
  switch (b) {
    case Bucket::daily: return "daily";
    case Bucket::weekly: return "weekly";
    case Bucket::monthly: return "monthly";
  }
  return "?";
}

// Period label used as the panel time key. Weekly periods are keyed by the
// date of their Monday.
inline std::string period_key(const Date& d, Bucket b) {
  switch (b) {
    case Bucket::daily: return d.iso();
    case Bucket::weekly: return d.week_start().iso();
    case Bucket::monthly: return d.month_key();
  }
  return {};
}

}  // namespace pressad
