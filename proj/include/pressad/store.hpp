#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pressad/digest.hpp"
#include "pressad/errors.hpp"
#include "pressad/jsonl.hpp"
#include "pressad/model.hpp"

namespace pressad {

struct SourceStats {
  std::size_t editions = 0;
  std::size_t pages = 0;
  std::size_t articles = 0;
  std::size_t ads = 0;

  friend bool operator==(const SourceStats&, const SourceStats&) = default;
};

using StatsTable = std::map<std::string, SourceStats>;

struct IndexEntry {
  EditionKey key;
  std::string file;  // relative to store root
  std::size_t pages = 0;
  std::size_t ads = 0;
  std::size_t articles = 0;
};

struct AddReport {
  std::size_t added = 0;
  std::size_t deduped = 0;              // skipped silently under dedup
  std::vector<Violation> violations;    // duplicate editions without dedup
};

// On-disk corpus: a directory of per-edition JSONL files plus an index file.
// Analytics passes are full scans, so no database is involved.
class CorpusStore {
 public:
  static CorpusStore create(const std::filesystem::path& root) {
    std::filesystem::create_directories(root / "data");
    CorpusStore store(root);
    store.save_index();
    return store;
  }

  static CorpusStore open(const std::filesystem::path& root) {
    CorpusStore store(root);
    store.load_index();
    return store;
  }

  static CorpusStore open_or_create(const std::filesystem::path& root) {
    if (std::filesystem::exists(root / "index.json")) return open(root);
    return create(root);
  }

  const std::filesystem::path& root() const { return root_; }
  std::size_t edition_count() const { return index_.size(); }
  bool contains(const EditionKey& key) const { return index_.count(key) != 0; }

  // Editions must already be violation-free (parse_records guarantees this).
  AddReport add_editions(const std::vector<Edition>& editions, bool dedup) {
    AddReport report;
    for (const Edition& e : editions) {
      EditionKey key = e.key();
      if (index_.count(key)) {
        if (dedup) {
          ++report.deduped;
        } else {
          report.violations.push_back({key.str(), "duplicate edition",
                                       "already present in store (keep-first)"});
        }
        continue;
      }
      IndexEntry entry;
      entry.key = key;
      entry.file = "data/" + slug(key) + ".jsonl";
      entry.pages = e.pages.size();
      for (const PageRecord& p : e.pages)
        for (const Segment& s : p.segments)
          (s.kind == SegmentKind::ad ? entry.ads : entry.articles)++;

      std::ofstream out(root_ / entry.file, std::ios::binary);
      if (!out) throw IoError("cannot write " + (root_ / entry.file).string());
      for (const PageRecord& p : e.pages) out << detail::page_to_json(p).dump() << '\n';
      out.close();
      if (!out) throw IoError("failed writing " + (root_ / entry.file).string());

      index_.emplace(key, std::move(entry));
      ++report.added;
    }
    save_index();
    return report;
  }

  Edition load_edition(const EditionKey& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) throw IoError("edition not in store: " + key.str());
    std::ifstream in(root_ / it->second.file, std::ios::binary);
    ParseResult parsed = parse_records(in, it->second.file);
    if (parsed.editions.size() != 1 || !parsed.violations.empty())
      throw IoError("corrupt edition file: " + it->second.file);
    return std::move(parsed.editions.front());
  }

  // Streams editions in index order: sorted by (source, city, date).
  void for_each_edition(const std::function<void(const Edition&)>& fn) const {
    for (const auto& [key, entry] : index_) fn(load_edition(key));
  }

  std::vector<Edition> load_all() const {
    std::vector<Edition> out;
    out.reserve(index_.size());
    for (const auto& [key, entry] : index_) out.push_back(load_edition(key));
    return out;
  }

  // Per-source counts of editions, pages, articles, ads; exact integers.
  // Empty store yields an empty table.
  StatsTable stats() const {
    StatsTable table;
    for (const auto& [key, entry] : index_) {
      SourceStats& s = table[key.source];
      s.editions += 1;
      s.pages += entry.pages;
      s.ads += entry.ads;
      s.articles += entry.articles;
    }
    return table;
  }

  // Recomputes stats from the stored records and compares with the index.
  bool verify() const {
    StatsTable from_index = stats();
    StatsTable recomputed;
    for (const auto& [key, entry] : index_) {
      Edition e = load_edition(key);
      SourceStats& s = recomputed[key.source];
      s.editions += 1;
      s.pages += e.pages.size();
      for (const PageRecord& p : e.pages)
        for (const Segment& seg : p.segments)
          (seg.kind == SegmentKind::ad ? s.ads : s.articles)++;
    }
    if (from_index.size() != recomputed.size()) return false;
    for (const auto& [src, s] : from_index) {
      auto it = recomputed.find(src);
      if (it == recomputed.end()) return false;
      const SourceStats& r = it->second;
      if (s.editions != r.editions || s.pages != r.pages || s.articles != r.articles ||
          s.ads != r.ads)
        return false;
    }
    return true;
  }

  const std::map<EditionKey, IndexEntry>& index() const { return index_; }

 private:
  explicit CorpusStore(std::filesystem::path root) : root_(std::move(root)) {}

  static std::string slug(const EditionKey& key) {
    std::string raw = key.str();
    std::string out;
    for (char c : raw) {
      if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-') out += c;
      else if (c >= 'A' && c <= 'Z') out += static_cast<char>(c - 'A' + 'a');
      else out += '_';
    }
    // short fingerprint guards against distinct keys sanitizing identically
    return out + "__" + digest_hex(raw).substr(0, 8);
  }

  void load_index() {
    std::ifstream in(root_ / "index.json", std::ios::binary);
    if (!in) throw IoError("not a corpus store (missing index.json): " + root_.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw IoError("corrupt index.json: " + std::string(e.what()));
    }
    if (j.value("schema", 0) != kSchemaVersion)
      throw ConfigError("store index schema mismatch in " + root_.string());
    for (const auto& ej : j.at("editions")) {
      IndexEntry entry;
      entry.key.source = ej.at("source").get<std::string>();
      entry.key.city = ej.at("city").get<std::string>();
      auto date = Date::parse(ej.at("date").get<std::string>());
      if (!date) throw IoError("corrupt index entry date");
      entry.key.date = *date;
      entry.file = ej.at("file").get<std::string>();
      entry.pages = ej.at("pages").get<std::size_t>();
      entry.ads = ej.at("ads").get<std::size_t>();
      entry.articles = ej.at("articles").get<std::size_t>();
      index_.emplace(entry.key, std::move(entry));
    }
  }

  void save_index() const {
    nlohmann::json j;
    j["schema"] = kSchemaVersion;
    auto arr = nlohmann::json::array();
    for (const auto& [key, entry] : index_) {
      arr.push_back({{"source", key.source},
                     {"city", key.city},
                     {"date", key.date.iso()},
                     {"file", entry.file},
                     {"pages", entry.pages},
                     {"ads", entry.ads},
                     {"articles", entry.articles}});
    }
    j["editions"] = std::move(arr);
    std::ofstream out(root_ / "index.json", std::ios::binary);
    if (!out) throw IoError("cannot write index.json in " + root_.string());
    out << j.dump(2) << '\n';
  }

  std::filesystem::path root_;
  std::map<EditionKey, IndexEntry> index_;
};

}  // namespace pressad
