#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "exemplar/ranking.hpp"
#include "exemplar/simd/kernels.hpp"
#include "exemplar/store.hpp"

namespace exemplar::dense {

// Row-major float32 vectors keyed by id.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  // Throws DuplicateId, FormatError (shape mismatch or non-finite values).
  EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim, std::vector<float> values);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return ids_.empty(); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const float> values() const { return values_; }
  std::span<const float> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  // Rows rearranged to follow `order`; throws GoldMissing naming the first
  // id that has no row.
  EmbeddingMatrix reordered(const std::vector<std::string>& order) const;

 private:
  std::vector<std::string> ids_;
  std::size_t dim_ = 0;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

// "pool.emb" -> "pool.ids.jsonl"; a path without extension gets the suffix appended.
std::string sidecar_path(const std::string& path);

// Binary layout: "EMB1", u32 LE count, u32 LE dim, count*dim binary32 LE,
// row-major. Ids come from the JSONL sidecar {"id": ...}, one per row.
EmbeddingMatrix load_embeddings(const std::string& path);
void write_embeddings(const std::string& path, const EmbeddingMatrix& m);

enum class Similarity { kDot, kCosine };

// Throws DimMismatch.
std::vector<double> dense_score(std::span<const float> query, const EmbeddingMatrix& candidates,
                                Similarity sim = Similarity::kDot,
                                const simd::Kernels& kernels = simd::active_kernels());

// Throws GoldMissing, DimMismatch.
RankingResult rank_dense(std::span<const float> query, const EmbeddingMatrix& candidates,
                         const std::string& query_id, const std::string& gold_id, std::size_t k,
                         Similarity sim = Similarity::kDot);

// Deterministic per-query permutation of [0, n).
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed,
                                            std::string_view query_id);

// Ranks the pool by a seeded uniform permutation. Scores are all zero.
RankingResult rank_random(const std::vector<std::string>& pool_ids, const std::string& query_id,
                          std::size_t gold_index, std::uint64_t seed, std::size_t k);
RankingResult rank_random(const store::CandidatePool& pool, const store::RetrievalQuery& query,
                          std::uint64_t seed, std::size_t k);

}  // namespace exemplar::dense
