#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "exemplar/jsonl.hpp"
#include "exemplar/mining.hpp"
#include "exemplar/ranking.hpp"
#include "exemplar/store.hpp"

namespace exemplar::eval {

inline const std::vector<std::size_t> kDefaultKs = {1, 3, 5, 10, 50, 100};

// Percentage of results whose gold unit ranks within the top k.
double recall_at_k(std::span<const RankingResult> results, std::size_t k);
double average_rank(std::span<const RankingResult> results);

struct MetricsConfig {
  std::vector<std::size_t> ks = kDefaultKs;
  std::string method = "unknown";
  store::QueryMode mode = store::QueryMode::kLR;
};

struct MetricsReport {
  std::map<std::size_t, double> recall_at;  // k -> percentage
  double avg_rank = 0.0;
  std::size_t n_queries = 0;
  std::size_t n_candidates = 0;  // 0 when the results do not record it
  std::string method;
  store::QueryMode mode = store::QueryMode::kLR;
};

// Throws EmptyResults, MixedPool (results ranked over different pool sizes).
MetricsReport evaluate_run(std::span<const RankingResult> results, const MetricsConfig& config = {});

// Count-weighted combination of two reports over disjoint query shards.
// Throws MixedPool when the reports disagree on pool, ks, method or mode.
MetricsReport merge_reports(const MetricsReport& a, const MetricsReport& b);

io::Json metrics_to_json(const MetricsReport& r);
MetricsReport metrics_from_json(const io::Json& j);
// "k,recall" rows, percentages to one decimal.
std::string metrics_to_csv(const MetricsReport& r);
// Recall-vs-k curve over a log-scaled k axis.
std::string recall_curve_svg(const std::vector<MetricsReport>& reports);
// One-line table row in the usual "R@1 ... avg rank" layout, one decimal.
std::string format_metrics_row(const MetricsReport& r);

struct WordAverages {
  std::size_t n_instances = 0;
  double avg_context_words = 0.0;
  double avg_example_words = 0.0;
  double avg_right_words = 0.0;
};

struct CorpusStats : WordAverages {
  std::map<std::string, WordAverages> per_source;
};

// Words are whitespace tokens.
CorpusStats corpus_stats(std::span<const mining::ExemplificationInstance> instances);

struct UnitLengths {
  std::size_t n = 0;
  std::size_t n_anchor = 0;  // instances with an annotated anchor
  double anchor_sentences = 0.0;
  double anchor_words = 0.0;
  double example_sentences = 0.0;
  double example_words = 0.0;
};

struct ValidityCounts {
  std::size_t valid = 0;
  std::size_t extracted = 0;
  double pct_valid = 0.0;
};

struct Distribution {
  std::size_t n = 0;
  double pct_first = 0.0;   // real / personal
  double pct_second = 0.0;  // hypothetical / not personal
};

struct AnnotationStats {
  ValidityCounts overall;
  std::map<std::string, ValidityCounts> by_source;
  Distribution type_overall;  // real vs hypothetical, valid instances only
  std::map<std::string, Distribution> type_by_source;
  Distribution personal_overall;  // personal vs not personal
  std::map<std::string, Distribution> personal_by_source;
  // Keys: source names, "real", "hypothetical", "personal", "not_personal".
  std::map<std::string, UnitLengths> lengths;
};

// Aggregates labelled instances (unlabelled ones are ignored). The example
// text is labels.example_text when present, else the mined unit. Throws NoLabels.
AnnotationStats annotation_stats(std::span<const mining::ExemplificationInstance> instances);

io::Json corpus_stats_to_json(const CorpusStats& s);
io::Json annotation_stats_to_json(const AnnotationStats& s);

}  // namespace exemplar::eval
