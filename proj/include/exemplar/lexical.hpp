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

namespace exemplar::lexical {

// Lowercased runs of letters/digits; everything else separates. No stemming,
// no stopwords.
std::vector<std::string> tokenize_lexical(std::string_view text);

// How negative idf values are floored to epsilon * average idf.
enum class IdfFloor {
  kPositiveMean,  // average over terms with idf > 0 (default)
  kAllTermsMean,  // average over every term, as in the rank_bm25 package
};

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
  double epsilon = 0.25;
  IdfFloor floor = IdfFloor::kPositiveMean;
};

// Okapi BM25 over a fixed candidate pool. Immutable after build; scoring is
// safe from many threads.
class Bm25Index {
 public:
  // Throws EmptyPool for an empty corpus.
  static Bm25Index build(const std::vector<std::vector<std::string>>& tokenized_docs,
                         const Bm25Params& params = {});
  static Bm25Index build(const store::CandidatePool& pool, const Bm25Params& params = {});

  std::size_t size() const { return doc_len_.size(); }
  const Bm25Params& params() const { return params_; }
  double avgdl() const { return avgdl_; }
  std::size_t doc_len(std::size_t d) const { return doc_len_[d]; }
  std::size_t vocabulary_size() const { return df_.size(); }
  std::size_t doc_freq(std::string_view term) const;
  // nullopt for out-of-vocabulary terms.
  std::optional<double> idf(std::string_view term) const;

  // sum over query tokens (repeats included) of
  //   idf(t) * f(t,d)*(k1+1) / (f(t,d) + k1*(1 - b + b*len(d)/avgdl))
  double score(std::span<const std::string> query_terms, std::size_t candidate) const;

  // Reference path: score() for every candidate.
  std::vector<double> score_all_exhaustive(std::span<const std::string> query_terms) const;

  // Posting-list path with SIMD weights; bit-identical to the reference.
  std::vector<double> score_all(std::span<const std::string> query_terms,
                                const simd::Kernels& kernels = simd::active_kernels()) const;

 private:
  std::optional<std::uint32_t> term_id(std::string_view term) const;

  Bm25Params params_;
  double avgdl_ = 0.0;
  std::unordered_map<std::string, std::uint32_t> vocab_;
  std::vector<std::uint32_t> df_;
  std::vector<double> idf_;
  std::vector<std::uint32_t> doc_len_;
  std::vector<double> length_norm_;  // k1 * (1 - b + b * len / avgdl)
  // Per-document (term id, tf), sorted by term id.
  std::vector<std::size_t> fwd_offset_;
  std::vector<std::uint32_t> fwd_term_;
  std::vector<std::uint32_t> fwd_tf_;
  // Per-term postings in ascending document order.
  std::vector<std::size_t> post_offset_;
  std::vector<std::uint32_t> post_doc_;
  std::vector<std::uint32_t> post_tf_;
};

Bm25Index build_bm25(const store::CandidatePool& pool, double k1 = 1.5, double b = 0.75,
                     double epsilon = 0.25);

double bm25_score(const Bm25Index& index, std::span<const std::string> query_terms,
                  std::size_t candidate_index);

// Throws GoldMissing when the query's gold id is not in the pool.
RankingResult rank_bm25(const Bm25Index& index, const store::CandidatePool& pool,
                        const store::RetrievalQuery& query, std::size_t k);

}  // namespace exemplar::lexical
