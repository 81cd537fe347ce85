#include <doctest.h>

#include <cmath>
#include <random>

#include "exemplar/corpus_io.hpp"
#include "exemplar/errors.hpp"
#include "exemplar/eval.hpp"
#include "oracles.hpp"

using namespace exemplar;

namespace {

RankingResult result(std::size_t rank, std::size_t n = 0) {
  RankingResult r;
  r.query_id = "q";
  r.gold_id = "g";
  r.gold_rank = rank;
  r.n_candidates = n;
  return r;
}

std::vector<RankingResult> results(std::initializer_list<std::size_t> ranks, std::size_t n = 0) {
  std::vector<RankingResult> v;
  for (auto r : ranks) v.push_back(result(r, n));
  return v;
}

}  // namespace

TEST_CASE("recall and average rank, hand values") {
  const auto rs = results({1, 5, 200});
  CHECK(eval::recall_at_k(rs, 1) == doctest::Approx(100.0 / 3));
  CHECK(eval::recall_at_k(rs, 5) == doctest::Approx(66.666666666666671));
  CHECK(eval::recall_at_k(rs, 199) == doctest::Approx(66.666666666666671));
  CHECK(eval::recall_at_k(rs, 200) == 100.0);
  CHECK(eval::average_rank(rs) == doctest::Approx(206.0 / 3));
  CHECK_THROWS_AS(eval::recall_at_k(std::vector<RankingResult>{}, 1), EmptyResults);
  CHECK_THROWS_AS(eval::average_rank(std::vector<RankingResult>{}), EmptyResults);
}

TEST_CASE("evaluate_run builds the report and rejects mixed pools") {
  eval::MetricsConfig c;
  c.ks = {1, 10};
  c.method = "bm25";
  c.mode = store::QueryMode::kL;
  const auto m = eval::evaluate_run(results({1, 2, 30}, 100), c);
  CHECK(m.recall_at.size() == 2);
  CHECK(m.recall_at.at(10) == doctest::Approx(200.0 / 3));
  CHECK(m.n_queries == 3);
  CHECK(m.n_candidates == 100);

  auto mixed = results({1, 2}, 100);
  mixed.push_back(result(3, 50));
  CHECK_THROWS_AS(eval::evaluate_run(mixed, c), MixedPool);
  CHECK_THROWS_AS(eval::evaluate_run(std::vector<RankingResult>{}, c), EmptyResults);
}

TEST_CASE("metrics JSON, CSV, SVG and text rendering") {
  eval::MetricsConfig c;
  c.ks = {1, 5};
  c.method = "random";
  const auto m = eval::evaluate_run(results({1, 5, 200}, 300), c);
  const auto j = eval::metrics_to_json(m);
  CHECK(j["recall_at"]["5"].get<double>() == doctest::Approx(66.666666666666671));
  CHECK(j["mode"] == "LR");
  const auto back = eval::metrics_from_json(j);
  CHECK(back.recall_at == m.recall_at);
  CHECK(back.avg_rank == m.avg_rank);
  CHECK(eval::metrics_to_csv(m) == "k,recall\n1,33.3\n5,66.7\n");
  CHECK(eval::format_metrics_row(m) == "random (LR)  R@1 33.3  R@5 66.7  avg rank 68.7  (3 queries, 300 candidates)");
  const auto svg = eval::recall_curve_svg({m});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK_THROWS_AS(eval::metrics_from_json(io::Json::object()), SchemaError);
}

TEST_CASE("metric properties over random result sets") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 500;
    const std::size_t q = 1 + rng() % 40;
    std::vector<RankingResult> rs;
    std::vector<std::size_t> ranks;
    for (std::size_t i = 0; i < q; ++i) {
      ranks.push_back(1 + rng() % n);
      rs.push_back(result(ranks.back(), n));
    }
    double prev = 0;
    for (std::size_t k = 1; k <= n; k += 1 + k / 4) {
      const double r = eval::recall_at_k(rs, k);
      CHECK(r >= prev);
      CHECK(r == doctest::Approx(oracle::recall(ranks, k)));
      prev = r;
    }
    CHECK(eval::recall_at_k(rs, n) == 100.0);
    const double avg = eval::average_rank(rs);
    CHECK(avg >= 1.0);
    CHECK(avg <= static_cast<double>(n));
  }
}

TEST_CASE("shard merging is count weighted and associative") {
  eval::MetricsConfig c;
  c.ks = {1, 3, 10};
  const auto a = results({1, 4, 9}, 20);
  const auto b = results({2, 2}, 20);
  const auto d = results({11, 1, 3, 5}, 20);
  auto all = a;
  all.insert(all.end(), b.begin(), b.end());
  all.insert(all.end(), d.begin(), d.end());
  const auto ma = eval::evaluate_run(a, c), mb = eval::evaluate_run(b, c), md = eval::evaluate_run(d, c);
  const auto left = eval::merge_reports(eval::merge_reports(ma, mb), md);
  const auto right = eval::merge_reports(ma, eval::merge_reports(mb, md));
  const auto whole = eval::evaluate_run(all, c);
  for (auto k : c.ks) {
    CHECK(left.recall_at.at(k) == doctest::Approx(whole.recall_at.at(k)).epsilon(1e-12));
    CHECK(right.recall_at.at(k) == doctest::Approx(whole.recall_at.at(k)).epsilon(1e-12));
  }
  CHECK(left.avg_rank == doctest::Approx(whole.avg_rank).epsilon(1e-12));
  CHECK(left.n_queries == 9);

  auto other = ma;
  other.n_candidates = 21;
  CHECK_THROWS_AS(eval::merge_reports(ma, other), MixedPool);
  other = ma;
  other.recall_at.erase(3);
  CHECK_THROWS_AS(eval::merge_reports(ma, other), MixedPool);
}

TEST_CASE("corpus statistics count whitespace words") {
  mining::ExemplificationInstance a, b;
  a.source = mining::Source::kEli5;
  a.left_context = "one two three";
  a.unit = "For example, x.";
  a.right_context = "";
  b.source = mining::Source::kNq;
  b.left_context = "one";
  b.unit = "e.g. y z";
  b.right_context = "r1 r2 r3 r4";
  const auto s = eval::corpus_stats(std::vector<mining::ExemplificationInstance>{a, b});
  CHECK(s.n_instances == 2);
  CHECK(s.avg_context_words == 2.0);
  CHECK(s.avg_example_words == 3.0);
  CHECK(s.avg_right_words == 2.0);
  CHECK(s.per_source.at("nq").avg_right_words == 4.0);
}

TEST_CASE("annotation statistics on the labelled fixture") {
  const auto xs = io::read_instances(std::string(EXEMPLAR_TEST_DATA) + "/labeled_annotations.jsonl");
  const auto s = eval::annotation_stats(xs);
  CHECK(s.overall.valid == 261);
  CHECK(s.overall.extracted == 282);
  CHECK(std::lround(s.overall.pct_valid) == 93);
  CHECK(std::lround(s.by_source.at("eli5").pct_valid) == 94);
  CHECK(std::lround(s.by_source.at("nq").pct_valid) == 94);
  CHECK(std::lround(s.by_source.at("books3").pct_valid) == 90);
  CHECK(s.type_overall.n == 261);
  CHECK(std::lround(s.type_overall.pct_second * 261 / 100) == 52);
  CHECK(std::lround(s.personal_overall.pct_first * 261 / 100) == 13);
  CHECK(std::lround(s.type_by_source.at("eli5").pct_second) == 32);
  CHECK(s.lengths.at("hypothetical").n == 52);
  CHECK(s.lengths.at("not_personal").n == 248);
  CHECK(s.lengths.at("real").example_sentences == 1.0);

  CHECK_THROWS_AS(eval::annotation_stats(std::vector<mining::ExemplificationInstance>{}), NoLabels);
}

TEST_CASE("annotation lengths prefer the annotated example text") {
  mining::ExemplificationInstance x;
  x.source = mining::Source::kBooks3;
  x.unit = "For example, a b c.";
  x.labels = mining::AnnotationLabels{true, mining::ExampleType::kReal, false,
                                      "Anchor one. Anchor two.", "Just this. And this."};
  const auto s = eval::annotation_stats(std::vector<mining::ExemplificationInstance>{x});
  const auto& l = s.lengths.at("books3");
  CHECK(l.example_sentences == 2.0);
  CHECK(l.example_words == 4.0);
  CHECK(l.anchor_sentences == 2.0);
  CHECK(l.anchor_words == 4.0);
}
