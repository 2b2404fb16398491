#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "jobml/corpus.hpp"
#include "jobml/error.hpp"

namespace jobml {

struct LabelSetPair {
  std::string id;  // optional; used by misprediction samples
  std::set<std::size_t> truth;
  std::set<std::size_t> predicted;
};

inline std::size_t intersection_size(const std::set<std::size_t>& a,
                                     const std::set<std::size_t>& b) {
  std::size_t n = 0;
  for (const std::size_t x : a) n += b.count(x);
  return n;
}

// Per-example F1 between the true and predicted label sets:
// 2*|truth ∩ predicted| / (|truth| + |predicted|).
inline double example_f1(const LabelSetPair& pair) {
  if (pair.truth.empty()) throw ValidationError("example_f1: empty truth set");
  const double overlap = static_cast<double>(intersection_size(pair.truth, pair.predicted));
  return 2.0 * overlap / static_cast<double>(pair.truth.size() + pair.predicted.size());
}

inline double mean_f1(const std::vector<LabelSetPair>& pairs) {
  if (pairs.empty()) throw ValidationError("mean_f1: empty pair list");
  double total = 0.0;
  for (const LabelSetPair& p : pairs) total += example_f1(p);
  return total / static_cast<double>(pairs.size());
}

// How a prediction counts as "correct" in the per-cardinality table.
enum class MatchMode {
  kExact,    // predicted set equals the truth set
  kOverlap,  // partial credit: any shared label counts
};

struct CardinalityBucket {
  std::size_t correct = 0;
  std::size_t wrong = 0;
};

inline bool pair_matches(const LabelSetPair& pair, MatchMode mode) {
  if (mode == MatchMode::kExact) return pair.predicted == pair.truth;
  return intersection_size(pair.truth, pair.predicted) > 0;
}

// Buckets pairs by |truth| and counts correct/wrong per bucket.
inline std::map<std::size_t, CardinalityBucket> exact_match_table(
    const std::vector<LabelSetPair>& pairs, MatchMode mode = MatchMode::kExact) {
  if (pairs.empty()) throw ValidationError("exact_match_table: empty pair list");
  std::map<std::size_t, CardinalityBucket> buckets;
  for (const LabelSetPair& p : pairs) {
    if (p.truth.empty()) throw ValidationError("exact_match_table: empty truth set");
    CardinalityBucket& b = buckets[p.truth.size()];
    if (pair_matches(p, mode))
      ++b.correct;
    else
      ++b.wrong;
  }
  return buckets;
}

struct MispredictionSample {
  std::string id;
  std::vector<std::string> truth_titles;
  std::vector<std::string> predicted_titles;
};

// First `limit` pairs (input order) whose predicted set differs from truth,
// with indices resolved to canonical titles.
inline std::vector<MispredictionSample> misprediction_samples(
    const std::vector<LabelSetPair>& pairs, const LabelCatalog& catalog, std::size_t limit) {
  std::vector<MispredictionSample> out;
  for (const LabelSetPair& p : pairs) {
    if (out.size() >= limit) break;
    if (p.predicted == p.truth) continue;
    MispredictionSample s;
    s.id = p.id;
    for (const std::size_t i : p.truth) s.truth_titles.push_back(catalog.title(i));
    for (const std::size_t i : p.predicted) s.predicted_titles.push_back(catalog.title(i));
    out.push_back(std::move(s));
  }
  return out;
}

struct EvalReport {
  double mean_f1 = 0.0;
  std::size_t n = 0;
  std::map<std::size_t, CardinalityBucket> per_cardinality;
  std::vector<MispredictionSample> samples;
};

inline EvalReport evaluate_pairs(const std::vector<LabelSetPair>& pairs,
                                 const LabelCatalog& catalog, std::size_t sample_limit = 10,
                                 MatchMode mode = MatchMode::kExact) {
  EvalReport report;
  report.mean_f1 = mean_f1(pairs);
  report.n = pairs.size();
  report.per_cardinality = exact_match_table(pairs, mode);
  report.samples = misprediction_samples(pairs, catalog, sample_limit);
  return report;
}

inline nlohmann::json eval_report_to_json(const EvalReport& report) {
  nlohmann::json buckets = nlohmann::json::object();
  for (const auto& [card, b] : report.per_cardinality)
    buckets[std::to_string(card)] = {{"correct", b.correct}, {"wrong", b.wrong}};
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : report.samples)
    samples.push_back(
        {{"id", s.id}, {"truth", s.truth_titles}, {"predicted", s.predicted_titles}});
  return nlohmann::json{{"mean_f1", report.mean_f1},
                        {"f1_percent", std::round(report.mean_f1 * 10000.0) / 100.0},
                        {"n", report.n},
                        {"per_cardinality", buckets},
                        {"samples", samples}};
}

// Human-readable per-cardinality table in the style of a results appendix.
inline std::string render_match_table(const EvalReport& report) {
  std::string out = "labels | correct | wrong\n-------+---------+------\n";
  for (const auto& [card, b] : report.per_cardinality) {
    char line[64];
    std::snprintf(line, sizeof(line), "%6zu | %7zu | %5zu\n", card, b.correct, b.wrong);
    out += line;
  }
  return out;
}

}  // namespace jobml
