#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "exemplar/mining.hpp"

namespace exemplar::store {

// Ordered retrieval corpus of exemplifying units. Order is the canonical
// tie-break order for every ranker. Immutable after construction.
class CandidatePool {
 public:
  CandidatePool() = default;
  // Throws DuplicateId on repeated ids, std::invalid_argument on length mismatch.
  CandidatePool(std::vector<std::string> unit_ids, std::vector<std::string> unit_texts);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<std::string>& unit_ids() const { return ids_; }
  const std::vector<std::string>& unit_texts() const { return texts_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> texts_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class QueryMode { kL, kLR };

std::string_view mode_name(QueryMode m);  // "L" / "LR"
QueryMode parse_mode(std::string_view name);  // accepts "L", "LR", "L+R"

struct RetrievalQuery {
  std::string query_id;
  QueryMode mode = QueryMode::kLR;
  std::string text;
  std::string gold_id;

  bool operator==(const RetrievalQuery&) const = default;
};

struct StoreConfig {
  std::string mask_placeholder = "[MASK]";
  bool include_question = true;
};

CandidatePool build_candidate_pool(const std::vector<mining::ExemplificationInstance>& instances);

// L:  [question] left
// LR: [question] left mask right
// Parts are single-space joined; empty parts are skipped (the mask never is).
// Throws EmptyContext when both contexts are empty.
RetrievalQuery build_query(const mining::ExemplificationInstance& inst, QueryMode mode,
                           const StoreConfig& config = {});

// Whitespace-normalised substring test of the gold unit inside the query.
bool query_leaks_unit(const RetrievalQuery& query, std::string_view unit_text);

void write_pool(std::ostream& out, const CandidatePool& pool);
void write_pool(const std::string& path, const CandidatePool& pool);
CandidatePool read_pool(std::istream& in, const std::string& origin = "<stream>");
CandidatePool read_pool(const std::string& path);

void write_queries(std::ostream& out, const std::vector<RetrievalQuery>& queries);
void write_queries(const std::string& path, const std::vector<RetrievalQuery>& queries);
std::vector<RetrievalQuery> read_queries(std::istream& in, const std::string& origin = "<stream>");
std::vector<RetrievalQuery> read_queries(const std::string& path);

}  // namespace exemplar::store
