#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "jobml/builtin_catalog.hpp"
#include "jobml/error.hpp"
#include "jobml/rng.hpp"
#include "jobml/unicode.hpp"

namespace jobml {

// Ordered list of canonical job titles; position defines the one-hot index.
// Raw titles resolve by exact match first, then through aliases, both after
// case folding and whitespace collapsing.
class LabelCatalog {
 public:
  static LabelCatalog builtin() {
    LabelCatalog c;
    for (const auto title : kBuiltinJobTitles) c.add_title(std::string(title));
    return c;
  }

  std::size_t size() const { return titles_.size(); }
  const std::vector<std::string>& titles() const { return titles_; }
  const std::string& title(std::size_t i) const { return titles_[i]; }
  const std::map<std::string, std::size_t>& aliases() const { return aliases_; }

  void add_title(const std::string& title) {
    const std::string key = uni::fold_collapse(title);
    if (key.empty()) throw ValidationError("catalog: empty title");
    if (canonical_.count(key)) throw ValidationError("catalog: duplicate title \"" + title + "\"");
    canonical_.emplace(key, titles_.size());
    titles_.push_back(title);
  }

  void add_alias(const std::string& alias, std::size_t index) {
    const std::string key = uni::fold_collapse(alias);
    if (key.empty()) throw ValidationError("catalog: empty alias");
    if (index >= titles_.size())
      throw ValidationError("catalog: alias \"" + alias + "\" points past the title list");
    aliases_.emplace(alias, index);
    alias_keys_.emplace(key, index);
  }

  std::optional<std::size_t> find(std::string_view raw) const {
    const std::string key = uni::fold_collapse(raw);
    if (const auto it = canonical_.find(key); it != canonical_.end()) return it->second;
    if (const auto it = alias_keys_.find(key); it != alias_keys_.end()) return it->second;
    return std::nullopt;
  }

  bool operator==(const LabelCatalog& other) const {
    return titles_ == other.titles_ && aliases_ == other.aliases_;
  }

 private:
  std::vector<std::string> titles_;
  std::map<std::string, std::size_t> aliases_;               // raw alias -> index
  std::unordered_map<std::string, std::size_t> canonical_;   // folded title -> index
  std::unordered_map<std::string, std::size_t> alias_keys_;  // folded alias -> index
};

// Catalog file: one canonical title per line, optionally followed by
// tab-separated aliases for that title.
inline LabelCatalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("catalog: cannot open " + path);
  LabelCatalog catalog;
  std::vector<std::vector<std::string>> pending_aliases;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    catalog.add_title(fields[0]);
    fields.erase(fields.begin());
    pending_aliases.push_back(std::move(fields));
  }
  if (catalog.size() == 0) throw ValidationError("catalog: " + path + " has no titles");
  // Aliases may reference any title, so they attach after all titles exist.
  for (std::size_t i = 0; i < pending_aliases.size(); ++i)
    for (const auto& alias : pending_aliases[i])
      if (!alias.empty()) catalog.add_alias(alias, i);
  return catalog;
}

// Resolve a raw title string to its catalog index.
inline std::size_t normalize_title(std::string_view raw, const LabelCatalog& catalog) {
  if (uni::fold_collapse(raw).empty()) throw ValidationError("normalize_title: empty title");
  if (const auto idx = catalog.find(raw)) return *idx;
  throw ValidationError("unknown job title \"" + std::string(raw) + "\"");
}

// One job posting.
struct JobRecord {
  std::string id;
  std::string description;
  std::set<std::size_t> labels;  // catalog indices, non-empty
  std::string language;          // "vi", "en" or empty
};

struct LoadOptions {
  // With skip_unknown_labels, unresolvable raw labels are dropped and records
  // left with none are skipped (counted in the report); otherwise any unknown
  // label aborts the load.
  bool skip_unknown_labels = false;
};

struct LoadReport {
  std::vector<JobRecord> records;
  std::size_t skipped_records = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string trimmed(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\n' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\n' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

// JSONL corpus: one object per line with `id`, `description`, `labels` (raw
// title strings) and optional `language` ("vi" or "en").
inline LoadReport load_corpus_report(const std::string& path, const LabelCatalog& catalog,
                                     const LoadOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw ValidationError("corpus: cannot open " + path);
  LoadReport report;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trimmed(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    const auto where = [&] { return path + ":" + std::to_string(line_no) + ": "; };
    if (!obj.is_object()) throw ValidationError(where() + "expected a JSON object");
    if (!obj.contains("id") || !obj["id"].is_string())
      throw ValidationError(where() + "missing string field \"id\"");
    if (!obj.contains("description") || !obj["description"].is_string())
      throw ValidationError(where() + "missing string field \"description\"");
    if (!obj.contains("labels") || !obj["labels"].is_array())
      throw ValidationError(where() + "missing array field \"labels\"");

    JobRecord rec;
    rec.id = obj["id"].get<std::string>();
    rec.description = obj["description"].get<std::string>();
    if (rec.id.empty()) throw ValidationError(where() + "empty id");
    if (!seen_ids.insert(rec.id).second)
      throw ValidationError(where() + "duplicate record id \"" + rec.id + "\"");
    if (detail::trimmed(rec.description).empty())
      throw ValidationError(where() + "empty description");
    if (obj["labels"].empty()) throw ValidationError(where() + "empty labels array");
    if (obj.contains("language") && !obj["language"].is_null()) {
      if (!obj["language"].is_string())
        throw ValidationError(where() + "language must be a string");
      rec.language = obj["language"].get<std::string>();
      if (rec.language != "vi" && rec.language != "en")
        throw ValidationError(where() + "language must be \"vi\" or \"en\", got \"" + rec.language + "\"");
    }
    for (const auto& raw : obj["labels"]) {
      if (!raw.is_string()) throw ValidationError(where() + "labels must be strings");
      const auto idx = catalog.find(raw.get<std::string>());
      if (idx) {
        rec.labels.insert(*idx);
      } else if (!options.skip_unknown_labels) {
        throw ValidationError(where() + "unknown job title \"" + raw.get<std::string>() + "\"");
      }
    }
    if (rec.labels.empty()) {
      if (options.skip_unknown_labels) {
        ++report.skipped_records;
        report.warnings.push_back(where() + "skipped record \"" + rec.id + "\": no resolvable labels");
        continue;
      }
      throw ValidationError(where() + "record \"" + rec.id + "\" has no resolvable labels");
    }
    report.records.push_back(std::move(rec));
  }
  return report;
}

inline std::vector<JobRecord> load_corpus(const std::string& path, const LabelCatalog& catalog,
                                          const LoadOptions& options = {}) {
  return load_corpus_report(path, catalog, options).records;
}

struct CorpusSplit {
  std::vector<JobRecord> train;
  std::vector<JobRecord> dev;
  std::vector<JobRecord> test;
};

// Carve the dev set out of both pools: floor(fraction * |pool|) records from
// each, sampled without replacement by a seeded generator. Remaining records
// keep their pool and original order.
inline CorpusSplit split_corpus(std::vector<JobRecord> train_pool, std::vector<JobRecord> test_pool,
                                double dev_fraction, std::uint64_t seed) {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0))
    throw ValidationError("split: dev_fraction must be in (0, 1), got " + std::to_string(dev_fraction));
  std::unordered_set<std::string> train_ids;
  for (const auto& r : train_pool) train_ids.insert(r.id);
  for (const auto& r : test_pool)
    if (train_ids.count(r.id))
      throw ValidationError("split: id \"" + r.id + "\" appears in both pools");

  Rng rng(seed);
  CorpusSplit split;
  const auto carve = [&rng, dev_fraction](std::vector<JobRecord>& pool, std::vector<JobRecord>& kept,
                                          std::vector<JobRecord>& dev) {
    const std::size_t take = static_cast<std::size_t>(
        std::floor(dev_fraction * static_cast<double>(pool.size())));
    const std::vector<std::size_t> picked = rng.sample_indices(pool.size(), take);
    std::vector<bool> is_dev(pool.size(), false);
    for (const std::size_t i : picked) is_dev[i] = true;
    for (std::size_t i = 0; i < pool.size(); ++i)
      (is_dev[i] ? dev : kept).push_back(std::move(pool[i]));
  };
  carve(train_pool, split.train, split.dev);
  carve(test_pool, split.test, split.dev);
  return split;
}

struct CorpusStats {
  std::size_t count = 0;
  std::size_t max_char_len = 0;
  double mean_char_len = 0.0;  // rounded to 2 decimals
  std::size_t single_label_count = 0;
  std::size_t multi_label_count = 0;
  std::size_t max_labels_per_record = 0;
  std::map<std::size_t, std::size_t> label_cardinality_histogram;
  std::map<std::string, std::size_t> per_language_counts;
};

// Lengths are counted in Unicode scalar values over the raw description.
inline CorpusStats compute_stats(const std::vector<JobRecord>& records) {
  if (records.empty()) throw ValidationError("stats: empty record list");
  CorpusStats stats;
  stats.count = records.size();
  std::size_t total_len = 0;
  for (const auto& rec : records) {
    const std::size_t len = uni::scalar_count(rec.description);
    total_len += len;
    stats.max_char_len = std::max(stats.max_char_len, len);
    const std::size_t cardinality = rec.labels.size();
    ++stats.label_cardinality_histogram[cardinality];
    if (cardinality == 1)
      ++stats.single_label_count;
    else
      ++stats.multi_label_count;
    stats.max_labels_per_record = std::max(stats.max_labels_per_record, cardinality);
    if (!rec.language.empty()) ++stats.per_language_counts[rec.language];
  }
  const double mean = static_cast<double>(total_len) / static_cast<double>(records.size());
  stats.mean_char_len = std::round(mean * 100.0) / 100.0;
  return stats;
}

inline nlohmann::json stats_to_json(const CorpusStats& stats) {
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [k, v] : stats.label_cardinality_histogram) hist[std::to_string(k)] = v;
  nlohmann::json langs = nlohmann::json::object();
  for (const auto& [k, v] : stats.per_language_counts) langs[k] = v;
  return nlohmann::json{{"count", stats.count},
                        {"max_char_len", stats.max_char_len},
                        {"mean_char_len", stats.mean_char_len},
                        {"single_label_count", stats.single_label_count},
                        {"multi_label_count", stats.multi_label_count},
                        {"max_labels_per_record", stats.max_labels_per_record},
                        {"label_cardinality_histogram", hist},
                        {"per_language_counts", langs}};
}

}  // namespace jobml
