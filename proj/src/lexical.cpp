#include "exemplar/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exemplar/errors.hpp"
#include "exemplar/text.hpp"

namespace exemplar::lexical {

std::vector<std::string> tokenize_lexical(std::string_view text) { return text::word_runs(text); }

Bm25Index Bm25Index::build(const std::vector<std::vector<std::string>>& docs, const Bm25Params& params) {
  if (docs.empty()) throw EmptyPool("cannot build BM25 over an empty pool");
  Bm25Index ix;
  ix.params_ = params;
  const std::size_t n = docs.size();
  ix.doc_len_.resize(n);
  ix.fwd_offset_.reserve(n + 1);
  ix.fwd_offset_.push_back(0);

  std::uint64_t total_len = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> counts;
  for (std::size_t d = 0; d < n; ++d) {
    counts.clear();
    for (const auto& term : docs[d]) {
      auto [it, inserted] = ix.vocab_.emplace(term, static_cast<std::uint32_t>(ix.df_.size()));
      if (inserted) ix.df_.push_back(0);
      counts.emplace_back(it->second, 1);
    }
    std::sort(counts.begin(), counts.end());
    for (std::size_t i = 0; i < counts.size();) {
      std::size_t j = i;
      std::uint32_t tf = 0;
      while (j < counts.size() && counts[j].first == counts[i].first) {
        ++tf;
        ++j;
      }
      ix.fwd_term_.push_back(counts[i].first);
      ix.fwd_tf_.push_back(tf);
      ++ix.df_[counts[i].first];
      i = j;
    }
    ix.fwd_offset_.push_back(ix.fwd_term_.size());
    ix.doc_len_[d] = static_cast<std::uint32_t>(docs[d].size());
    total_len += docs[d].size();
  }

  ix.avgdl_ = static_cast<double>(total_len) / static_cast<double>(n);
  // A pool of term-less units scores zero everywhere; keep the norm finite.
  const double avgdl = ix.avgdl_ > 0 ? ix.avgdl_ : 1.0;
  const double k1 = params.k1;
  const double b = params.b;
  ix.length_norm_.resize(n);
  for (std::size_t d = 0; d < n; ++d) {
    ix.length_norm_[d] = k1 * (1.0 - b + b * static_cast<double>(ix.doc_len_[d]) / avgdl);
  }

  const std::size_t v = ix.df_.size();
  ix.idf_.resize(v);
  double sum_all = 0.0;
  double sum_pos = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t t = 0; t < v; ++t) {
    const double df = ix.df_[t];
    const double idf = std::log(static_cast<double>(n) - df + 0.5) - std::log(df + 0.5);
    ix.idf_[t] = idf;
    sum_all += idf;
    if (idf > 0) {
      sum_pos += idf;
      ++n_pos;
    }
  }
  double average = 0.0;
  if (params.floor == IdfFloor::kAllTermsMean) {
    average = v ? sum_all / static_cast<double>(v) : 0.0;
  } else {
    average = n_pos ? sum_pos / static_cast<double>(n_pos) : 0.0;
  }
  const double floor = params.epsilon * average;
  for (auto& idf : ix.idf_) {
    if (idf < 0) idf = floor;
  }

  ix.post_offset_.assign(v + 1, 0);
  for (std::size_t t = 0; t < v; ++t) ix.post_offset_[t + 1] = ix.post_offset_[t] + ix.df_[t];
  ix.post_doc_.resize(ix.fwd_term_.size());
  ix.post_tf_.resize(ix.fwd_term_.size());
  std::vector<std::size_t> cursor(ix.post_offset_.begin(), ix.post_offset_.end() - 1);
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t i = ix.fwd_offset_[d]; i < ix.fwd_offset_[d + 1]; ++i) {
      const std::size_t slot = cursor[ix.fwd_term_[i]]++;
      ix.post_doc_[slot] = static_cast<std::uint32_t>(d);
      ix.post_tf_[slot] = ix.fwd_tf_[i];
    }
  }
  return ix;
}

Bm25Index Bm25Index::build(const store::CandidatePool& pool, const Bm25Params& params) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(pool.size());
  for (const auto& t : pool.unit_texts()) docs.push_back(tokenize_lexical(t));
  return build(docs, params);
}

std::optional<std::uint32_t> Bm25Index::term_id(std::string_view term) const {
  auto it = vocab_.find(std::string(term));
  if (it == vocab_.end()) return std::nullopt;
  return it->second;
}

std::size_t Bm25Index::doc_freq(std::string_view term) const {
  auto id = term_id(term);
  return id ? df_[*id] : 0;
}

std::optional<double> Bm25Index::idf(std::string_view term) const {
  auto id = term_id(term);
  if (!id) return std::nullopt;
  return idf_[*id];
}

double Bm25Index::score(std::span<const std::string> query_terms, std::size_t candidate) const {
  if (candidate >= size()) throw std::out_of_range("candidate index outside the pool");
  const auto first = fwd_term_.begin() + static_cast<std::ptrdiff_t>(fwd_offset_[candidate]);
  const auto last = fwd_term_.begin() + static_cast<std::ptrdiff_t>(fwd_offset_[candidate + 1]);
  const double k1_plus_1 = params_.k1 + 1.0;
  double s = 0.0;
  for (const auto& term : query_terms) {
    const auto id = term_id(term);
    if (!id) continue;
    const auto it = std::lower_bound(first, last, *id);
    if (it == last || *it != *id) continue;
    const double f = fwd_tf_[static_cast<std::size_t>(it - fwd_term_.begin())];
    s += idf_[*id] * ((f * k1_plus_1) / (f + length_norm_[candidate]));
  }
  return s;
}

std::vector<double> Bm25Index::score_all_exhaustive(std::span<const std::string> query_terms) const {
  std::vector<double> out(size());
  for (std::size_t d = 0; d < size(); ++d) out[d] = score(query_terms, d);
  return out;
}

std::vector<double> Bm25Index::score_all(std::span<const std::string> query_terms,
                                         const simd::Kernels& kernels) const {
  std::vector<double> scores(size(), 0.0);
  std::vector<double> weights;
  const double k1_plus_1 = params_.k1 + 1.0;
  for (const auto& term : query_terms) {
    const auto id = term_id(term);
    if (!id) continue;
    const std::size_t begin = post_offset_[*id];
    const std::size_t n = post_offset_[*id + 1] - begin;
    weights.resize(n);
    kernels.bm25_weights(post_doc_.data() + begin, post_tf_.data() + begin, n, length_norm_.data(),
                         idf_[*id], k1_plus_1, weights.data());
    for (std::size_t i = 0; i < n; ++i) scores[post_doc_[begin + i]] += weights[i];
  }
  return scores;
}

Bm25Index build_bm25(const store::CandidatePool& pool, double k1, double b, double epsilon) {
  return Bm25Index::build(pool, Bm25Params{k1, b, epsilon, IdfFloor::kPositiveMean});
}

double bm25_score(const Bm25Index& index, std::span<const std::string> query_terms,
                  std::size_t candidate_index) {
  return index.score(query_terms, candidate_index);
}

RankingResult rank_bm25(const Bm25Index& index, const store::CandidatePool& pool,
                        const store::RetrievalQuery& query, std::size_t k) {
  const auto gold = pool.index_of(query.gold_id);
  if (!gold) throw GoldMissing("gold id '" + query.gold_id + "' not in the candidate pool");
  if (pool.size() != index.size()) throw std::invalid_argument("index was built over another pool");
  const auto terms = tokenize_lexical(query.text);
  const auto scores = index.score_all(terms);
  return rank_scores(scores, pool.unit_ids(), query.query_id, *gold, k);
}

}  // namespace exemplar::lexical
