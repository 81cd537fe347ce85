#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace exemplar {

struct RankingResult {
  std::string query_id;
  std::string gold_id;
  std::size_t gold_rank = 0;  // 1-based, over the whole pool
  std::vector<std::string> top_k;
  std::vector<double> scores_topk;
  std::size_t n_candidates = 0;  // 0 when unknown (older result files)

  bool operator==(const RankingResult&) const = default;
};

// Orders candidates by score descending, ties by ascending pool position.
// gold_rank counts every candidate ordered before the gold one.
RankingResult rank_scores(std::span<const double> scores, const std::vector<std::string>& ids,
                          std::string query_id, std::size_t gold_index, std::size_t k);

// Full ordering (all positions) under the same rule; used by oracles and tools.
std::vector<std::size_t> full_order(std::span<const double> scores);

void write_results(std::ostream& out, const std::vector<RankingResult>& results);
void write_results(const std::string& path, const std::vector<RankingResult>& results);
std::vector<RankingResult> read_results(std::istream& in, const std::string& origin = "<stream>");
std::vector<RankingResult> read_results(const std::string& path);

}  // namespace exemplar
