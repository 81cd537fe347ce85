#include "exemplar/ranking.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "exemplar/jsonl.hpp"

namespace exemplar {

namespace {

struct ScoreOrder {
  std::span<const double> scores;
  bool operator()(std::size_t a, std::size_t b) const {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  }
};

}  // namespace

RankingResult rank_scores(std::span<const double> scores, const std::vector<std::string>& ids,
                          std::string query_id, std::size_t gold_index, std::size_t k) {
  if (scores.size() != ids.size()) throw std::invalid_argument("scores and ids differ in length");
  if (gold_index >= scores.size()) throw std::out_of_range("gold index outside the pool");
  if (k == 0) throw std::invalid_argument("k must be >= 1");

  RankingResult r;
  r.query_id = std::move(query_id);
  r.gold_id = ids[gold_index];
  r.n_candidates = scores.size();

  const double g = scores[gold_index];
  std::size_t ahead = 0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] > g || (scores[j] == g && j < gold_index)) ++ahead;
  }
  r.gold_rank = ahead + 1;

  const std::size_t kk = std::min(k, scores.size());
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kk), idx.end(),
                    ScoreOrder{scores});
  r.top_k.reserve(kk);
  r.scores_topk.reserve(kk);
  for (std::size_t i = 0; i < kk; ++i) {
    r.top_k.push_back(ids[idx[i]]);
    r.scores_topk.push_back(scores[idx[i]]);
  }
  return r;
}

std::vector<std::size_t> full_order(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), ScoreOrder{scores});
  return idx;
}

void write_results(std::ostream& out, const std::vector<RankingResult>& results) {
  for (const auto& r : results) {
    io::Json j = io::Json::object();
    j["query_id"] = r.query_id;
    j["gold_id"] = r.gold_id;
    j["gold_rank"] = r.gold_rank;
    j["top_k"] = r.top_k;
    j["scores_topk"] = r.scores_topk;
    j["n_candidates"] = r.n_candidates;
    out << io::dump_line(j) << '\n';
  }
}

void write_results(const std::string& path, const std::vector<RankingResult>& results) {
  io::OutputFile out(path);
  write_results(out.stream(), results);
  out.commit();
}

std::vector<RankingResult> read_results(std::istream& in, const std::string& origin) {
  std::vector<RankingResult> out;
  io::for_each_jsonl(in, origin, [&](const io::Json& j, std::size_t line) {
    io::FieldReader f{j, origin, line};
    RankingResult r;
    r.query_id = f.string("query_id");
    r.gold_id = f.string("gold_id");
    const io::Json& rank = f.require("gold_rank");
    if (!rank.is_number_unsigned() || rank.get<std::size_t>() == 0) {
      f.fail("gold_rank must be a positive integer");
    }
    r.gold_rank = rank.get<std::size_t>();
    const io::Json& top = f.require("top_k");
    const io::Json& scores = f.require("scores_topk");
    if (!top.is_array() || !scores.is_array() || top.size() != scores.size()) {
      f.fail("top_k and scores_topk must be arrays of equal length");
    }
    for (const auto& id : top) {
      if (!id.is_string()) f.fail("top_k entries must be strings");
      r.top_k.push_back(id.get<std::string>());
    }
    for (const auto& s : scores) {
      if (!s.is_number()) f.fail("scores_topk entries must be numbers");
      r.scores_topk.push_back(s.get<double>());
    }
    if (auto it = j.find("n_candidates"); it != j.end() && !it->is_null()) {
      if (!it->is_number_unsigned()) f.fail("n_candidates must be a non-negative integer");
      r.n_candidates = it->get<std::size_t>();
      if (r.n_candidates != 0 && r.gold_rank > r.n_candidates) f.fail("gold_rank exceeds n_candidates");
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<RankingResult> read_results(const std::string& path) {
  io::InputFile in(path);
  return read_results(in.stream(), path);
}

}  // namespace exemplar
