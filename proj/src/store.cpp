#include "exemplar/store.hpp"

#include <stdexcept>

#include "exemplar/errors.hpp"
#include "exemplar/jsonl.hpp"
#include "exemplar/text.hpp"

namespace exemplar::store {

CandidatePool::CandidatePool(std::vector<std::string> unit_ids, std::vector<std::string> unit_texts)
    : ids_(std::move(unit_ids)), texts_(std::move(unit_texts)) {
  if (ids_.size() != texts_.size()) {
    throw std::invalid_argument("candidate pool ids and texts differ in length");
  }
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) throw DuplicateId("unit id '" + ids_[i] + "'");
  }
}

std::optional<std::size_t> CandidatePool::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string_view mode_name(QueryMode m) { return m == QueryMode::kL ? "L" : "LR"; }

QueryMode parse_mode(std::string_view name) {
  if (name == "L") return QueryMode::kL;
  if (name == "LR" || name == "L+R") return QueryMode::kLR;
  throw std::invalid_argument("unknown query mode '" + std::string(name) + "'");
}

CandidatePool build_candidate_pool(const std::vector<mining::ExemplificationInstance>& instances) {
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  ids.reserve(instances.size());
  texts.reserve(instances.size());
  for (const auto& inst : instances) {
    ids.push_back(inst.instance_id);
    texts.push_back(inst.unit);
  }
  return CandidatePool(std::move(ids), std::move(texts));
}

RetrievalQuery build_query(const mining::ExemplificationInstance& inst, QueryMode mode,
                           const StoreConfig& config) {
  if (inst.left_context.empty() && inst.right_context.empty()) {
    throw EmptyContext("instance '" + inst.instance_id + "' has no context on either side");
  }
  if (config.mask_placeholder.empty()) throw std::invalid_argument("mask placeholder must be non-empty");
  std::string out;
  auto add = [&out](std::string_view part) {
    if (part.empty()) return;
    if (!out.empty()) out.push_back(' ');
    out.append(part);
  };
  if (config.include_question && inst.question) add(text::trim(*inst.question));
  add(inst.left_context);
  if (mode == QueryMode::kLR) {
    add(config.mask_placeholder);
    add(inst.right_context);
  }
  return {inst.instance_id, mode, std::move(out), inst.instance_id};
}

bool query_leaks_unit(const RetrievalQuery& query, std::string_view unit_text) {
  const std::string unit = text::normalize_whitespace(unit_text);
  if (unit.empty()) return false;
  return text::normalize_whitespace(query.text).find(unit) != std::string::npos;
}

void write_pool(std::ostream& out, const CandidatePool& pool) {
  for (std::size_t i = 0; i < pool.size(); ++i) {
    io::Json j = io::Json::object();
    j["unit_id"] = pool.unit_ids()[i];
    j["text"] = pool.unit_texts()[i];
    out << io::dump_line(j) << '\n';
  }
}

void write_pool(const std::string& path, const CandidatePool& pool) {
  io::OutputFile out(path);
  write_pool(out.stream(), pool);
  out.commit();
}

CandidatePool read_pool(std::istream& in, const std::string& origin) {
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  io::for_each_jsonl(in, origin, [&](const io::Json& j, std::size_t line) {
    io::FieldReader f{j, origin, line};
    ids.push_back(f.string("unit_id"));
    texts.push_back(f.string("text"));
  });
  return CandidatePool(std::move(ids), std::move(texts));
}

CandidatePool read_pool(const std::string& path) {
  io::InputFile in(path);
  return read_pool(in.stream(), path);
}

void write_queries(std::ostream& out, const std::vector<RetrievalQuery>& queries) {
  for (const auto& q : queries) {
    io::Json j = io::Json::object();
    j["query_id"] = q.query_id;
    j["mode"] = mode_name(q.mode);
    j["text"] = q.text;
    j["gold_id"] = q.gold_id;
    out << io::dump_line(j) << '\n';
  }
}

void write_queries(const std::string& path, const std::vector<RetrievalQuery>& queries) {
  io::OutputFile out(path);
  write_queries(out.stream(), queries);
  out.commit();
}

std::vector<RetrievalQuery> read_queries(std::istream& in, const std::string& origin) {
  std::vector<RetrievalQuery> qs;
  io::for_each_jsonl(in, origin, [&](const io::Json& j, std::size_t line) {
    io::FieldReader f{j, origin, line};
    RetrievalQuery q;
    q.query_id = f.string("query_id");
    try {
      q.mode = parse_mode(f.string("mode"));
    } catch (const std::invalid_argument& e) {
      f.fail(e.what());
    }
    q.text = f.string("text");
    q.gold_id = f.string("gold_id");
    qs.push_back(std::move(q));
  });
  return qs;
}

std::vector<RetrievalQuery> read_queries(const std::string& path) {
  io::InputFile in(path);
  return read_queries(in.stream(), path);
}

}  // namespace exemplar::store
