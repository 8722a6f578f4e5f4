#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pressad/errors.hpp"
#include "pressad/model.hpp"

namespace pressad {

// Entity label for government ads and government-corruption articles.
inline constexpr const char* kGovernmentEntity = "Government";

// Case fold + whitespace collapse + trim. Folding covers ASCII and the
// Latin-1 supplement (two-byte UTF-8), which spans every character in the
// shipped keyword tables; other scripts pass through unchanged. U+00A0 is
// treated as whitespace. Idempotent.
inline std::string normalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  auto push = [&](char c) {
    if (pending_space) {
      if (!out.empty()) out += ' ';
      pending_space = false;
    }
    out += c;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r') {
      pending_space = true;
      continue;
    }
    if (c == 0xC2 && i + 1 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0xA0) {
      pending_space = true;  // NBSP
      ++i;
      continue;
    }
    if (c < 0x80) {
      push(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
      continue;
    }
    if (c == 0xC3 && i + 1 < text.size()) {
      unsigned char d = static_cast<unsigned char>(text[i + 1]);
      if (d >= 0x80 && d <= 0x9E && d != 0x97) {  // À..Þ except ×
        push(static_cast<char>(0xC3));
        push(static_cast<char>(d + 0x20));
        ++i;
        continue;
      }
    }
    push(static_cast<char>(c));
  }
  return out;
}

struct CompanyRule {
  std::string name;
  std::string sector;
  std::vector<std::string> keywords;  // normalized at load
};

struct EntityRuleSet {
  std::vector<std::string> government_ad_keywords;
  std::vector<std::string> corruption_keywords;
  std::vector<std::string> government_terms;
  std::vector<CompanyRule> companies;  // sorted by name

  std::string sector_of(const std::string& company) const {
    for (const CompanyRule& c : companies)
      if (c.name == company) return c.sector;
    return {};
  }

  static EntityRuleSet from_json(const nlohmann::json& j);
  static EntityRuleSet load(const std::filesystem::path& path);
  static EntityRuleSet builtin_defaults();
};

namespace detail {

inline std::vector<std::string> normalized_keyword_list(const nlohmann::json& arr,
                                                        const std::string& list_name) {
  if (!arr.is_array() || arr.empty())
    throw ConfigError("rule list '" + list_name + "' must be a non-empty array");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& item : arr) {
    std::string kw = normalize(item.get<std::string>());
    if (kw.empty())
      throw ConfigError("empty keyword after normalization in list '" + list_name + "'");
    if (!seen.insert(kw).second)
      throw ConfigError("duplicate keyword '" + kw + "' in list '" + list_name + "'");
    out.push_back(std::move(kw));
  }
  return out;
}

}  // namespace detail

inline EntityRuleSet EntityRuleSet::from_json(const nlohmann::json& j) {
  EntityRuleSet rules;
  rules.government_ad_keywords =
      detail::normalized_keyword_list(j.at("government_ad_keywords"), "government_ad_keywords");
  rules.corruption_keywords =
      detail::normalized_keyword_list(j.at("corruption_keywords"), "corruption_keywords");
  rules.government_terms =
      detail::normalized_keyword_list(j.at("government_terms"), "government_terms");
  for (const auto& cj : j.at("companies")) {
    CompanyRule rule;
    rule.name = cj.at("name").get<std::string>();
    if (rule.name.empty()) throw ConfigError("company with empty name");
    rule.sector = cj.value("sector", std::string{});
    rule.keywords = detail::normalized_keyword_list(cj.at("keywords"), rule.name);
    rules.companies.push_back(std::move(rule));
  }
  std::sort(rules.companies.begin(), rules.companies.end(),
            [](const CompanyRule& a, const CompanyRule& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < rules.companies.size(); ++i)
    if (rules.companies[i].name == rules.companies[i - 1].name)
      throw ConfigError("duplicate company '" + rules.companies[i].name + "'");
  return rules;
}

inline EntityRuleSet EntityRuleSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read rule file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("malformed rule file " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

// All keyword arguments below are assumed normalized (load does this).

inline std::vector<std::string> matching_keywords(const std::string& normalized_text,
                                                  const std::vector<std::string>& keywords) {
  std::vector<std::string> hits;
  for (const std::string& kw : keywords)
    if (normalized_text.find(kw) != std::string::npos) hits.push_back(kw);
  return hits;
}

inline bool any_keyword(const std::string& normalized_text,
                        const std::vector<std::string>& keywords) {
  for (const std::string& kw : keywords)
    if (normalized_text.find(kw) != std::string::npos) return true;
  return false;
}

// True iff any government ad keyword occurs as a substring.
inline bool is_government_ad(const std::string& normalized_text, const EntityRuleSet& rules) {
  return any_keyword(normalized_text, rules.government_ad_keywords);
}

// True iff at least one corruption keyword and one government term occur.
inline bool is_corruption_article(const std::string& normalized_text,
                                  const EntityRuleSet& rules) {
  return any_keyword(normalized_text, rules.corruption_keywords) &&
         any_keyword(normalized_text, rules.government_terms);
}

// Every company with at least one keyword hit; sorted by name.
inline std::vector<std::string> match_companies(const std::string& normalized_text,
                                                const EntityRuleSet& rules) {
  std::vector<std::string> out;
  if (normalized_text.empty()) return out;
  for (const CompanyRule& c : rules.companies)
    if (any_keyword(normalized_text, c.keywords)) out.push_back(c.name);
  return out;
}

struct MatchResult {
  SegmentId id;
  SegmentKind kind = SegmentKind::ad;
  std::set<std::string> entities;
  std::map<std::string, std::vector<std::string>> keywords;  // entity -> fired keywords
};

// Ads are evaluated against government + company rules, articles against
// corruption + company rules.
inline MatchResult classify_segment(const SegmentId& id, SegmentKind kind,
                                    const std::string& raw_text, const EntityRuleSet& rules) {
  MatchResult res;
  res.id = id;
  res.kind = kind;
  const std::string text = normalize(raw_text);
  if (kind == SegmentKind::ad) {
    auto hits = matching_keywords(text, rules.government_ad_keywords);
    if (!hits.empty()) {
      res.entities.insert(kGovernmentEntity);
      res.keywords[kGovernmentEntity] = std::move(hits);
    }
  } else {
    auto corruption = matching_keywords(text, rules.corruption_keywords);
    auto terms = matching_keywords(text, rules.government_terms);
    if (!corruption.empty() && !terms.empty()) {
      res.entities.insert(kGovernmentEntity);
      auto& kws = res.keywords[kGovernmentEntity];
      kws = std::move(corruption);
      kws.insert(kws.end(), terms.begin(), terms.end());
    }
  }
  for (const CompanyRule& c : rules.companies) {
    auto hits = matching_keywords(text, c.keywords);
    if (!hits.empty()) {
      res.entities.insert(c.name);
      res.keywords[c.name] = std::move(hits);
    }
  }
  return res;
}

inline nlohmann::json match_to_json(const MatchResult& m) {
  nlohmann::json j;
  j["id"] = m.id.str();
  j["kind"] = to_string(m.kind);
  j["entities"] = m.entities;
  j["keywords"] = m.keywords;
  return j;
}

// Classification result joined back onto segments by id string.
struct MatchIndex {
  struct Entry {
    bool government = false;
    std::vector<std::string> companies;
  };
  std::map<std::string, Entry> by_id;

  void add(const MatchResult& m) {
    Entry e;
    for (const std::string& ent : m.entities) {
      if (ent == kGovernmentEntity) e.government = true;
      else e.companies.push_back(ent);
    }
    by_id[m.id.str()] = std::move(e);
  }

  const Entry* find(const std::string& id) const {
    auto it = by_id.find(id);
    return it == by_id.end() ? nullptr : &it->second;
  }

  static MatchIndex load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read matches file: " + path.string());
    MatchIndex index;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const std::exception& e) {
        throw IoError("malformed matches line: " + std::string(e.what()));
      }
      Entry e;
      for (const auto& ent : j.at("entities")) {
        std::string name = ent.get<std::string>();
        if (name == kGovernmentEntity) e.government = true;
        else e.companies.push_back(std::move(name));
      }
      std::sort(e.companies.begin(), e.companies.end());
      index.by_id[j.at("id").get<std::string>()] = std::move(e);
    }
    return index;
  }
};

}  // namespace pressad
