#pragma once

#include <filesystem>

#include <json.hpp>

#include "pressad/default_configs.hpp"
#include "pressad/rate_card.hpp"
#include "pressad/rules.hpp"

namespace pressad {

inline EntityRuleSet EntityRuleSet::builtin_defaults() {
  return from_json(nlohmann::json::parse(kDefaultRulesJson));
}

inline RateCard RateCard::builtin_defaults() {
  return from_json(nlohmann::json::parse(kDefaultRatesJson));
}

inline EntityRuleSet load_rules_or_default(const std::filesystem::path& path) {
  return path.empty() ? EntityRuleSet::builtin_defaults() : EntityRuleSet::load(path);
}

inline RateCard load_rates_or_default(const std::filesystem::path& path) {
  return path.empty() ? RateCard::builtin_defaults() : RateCard::load(path);
}

}  // namespace pressad
