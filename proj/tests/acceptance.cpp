// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "exemplar/corpus_io.hpp"
#include "exemplar/dense.hpp"
#include "exemplar/errors.hpp"
#include "exemplar/eval.hpp"
#include "exemplar/lexical.hpp"
#include "exemplar/mining.hpp"
#include "exemplar/store.hpp"
#include "exemplar/text.hpp"
#include "oracles.hpp"

using namespace exemplar;
namespace fs = std::filesystem;

namespace {

const std::string kData = EXEMPLAR_TEST_DATA;

struct Outcome {
  enum Status { kPass, kFail, kSkip } status;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::kPass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::kFail, std::move(d)}; }
Outcome skip(std::string d) { return {Outcome::kSkip, std::move(d)}; }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.status == Outcome::kPass && budget_s > 0 && secs > budget_s) {
    o = fail(o.detail + fmt("; over the %.0f s budget", budget_s));
  }
  const char* tag = o.status == Outcome::kPass ? "PASS" : o.status == Outcome::kFail ? "FAIL" : "SKIP";
  if (o.status == Outcome::kFail) ++failures;
  std::printf("%s  %-28s %7.2fs  %s\n", tag, name, secs, o.detail.c_str());
  std::fflush(stdout);
}

Outcome mining_golden() {
  const auto docs = io::read_documents(kData + "/golden/corpus.jsonl", io::DocumentFormat::kJsonl);
  const auto out = mining::mine_corpus(docs, mining::MinerConfig{});
  std::ostringstream ss;
  io::write_instances(ss, out.instances);
  const std::string want = slurp(kData + "/golden/instances.jsonl");
  if (ss.str() != want) return fail("mined output differs from the golden file");
  return pass(std::to_string(docs.size()) + " docs, " + std::to_string(out.instances.size()) +
              " instances byte-identical");
}

Outcome reference_fixtures() {
  std::ifstream in(kData + "/reference_snippets.jsonl");
  std::size_t n = 0, ok = 0;
  std::string bad;
  for (std::string line; std::getline(in, line);) {
    const auto j = io::Json::parse(line);
    mining::Document d;
    d.doc_id = j["doc_id"].get<std::string>();
    d.text = j["text"].get<std::string>();
    const auto xs = mining::mine_document(d, mining::MinerConfig{});
    ++n;
    const std::string want = text::normalize_whitespace(j["expected_unit"].get<std::string>());
    if (xs.size() == 1 && text::normalize_whitespace(xs[0].unit) == want) {
      ++ok;
    } else {
      bad += " " + d.doc_id;
    }
  }
  if (n != 6 || ok != n) return fail(std::to_string(ok) + "/" + std::to_string(n) + " matched; wrong:" + bad);
  return pass("6/6 snippets mined to the quoted units");
}

Outcome bm25_oracle() {
  std::mt19937_64 rng(20240601);
  double worst = 0;
  std::size_t queries = 0;
  std::size_t path_mismatch = 0;
  for (int c = 0; c < 200; ++c) {
    const std::size_t n_docs = 1 + rng() % 100;
    const std::size_t vocab = 1 + rng() % 50;
    std::vector<oracle::Tokens> docs(n_docs);
    for (auto& d : docs) {
      // Empty documents are allowed, but not a corpus of nothing but.
      const std::size_t len = (&d == &docs[0] ? 1 : 0) + rng() % 30;
      for (std::size_t i = 0; i < len; ++i) d.push_back("t" + std::to_string(rng() % vocab));
    }
    const auto ix = lexical::Bm25Index::build(docs);
    for (int q = 0; q < 10; ++q) {
      oracle::Tokens query;
      const std::size_t len = 1 + rng() % 8;
      // A few out-of-vocabulary ids on purpose.
      for (std::size_t i = 0; i < len; ++i) query.push_back("t" + std::to_string(rng() % (vocab + 3)));
      const auto want = oracle::bm25_scores(docs, query, 1.5, 0.75, 0.25);
      const auto fast = ix.score_all(query);
      const auto slow = ix.score_all_exhaustive(query);
      if (fast != slow) ++path_mismatch;
      for (std::size_t d = 0; d < n_docs; ++d) worst = std::max(worst, std::abs(fast[d] - want[d]));
      ++queries;
    }
  }
  const std::string detail = "200 corpora, " + std::to_string(queries) + " queries, max |d| " + fmt("%.2e", worst);
  if (worst > 1e-9 || path_mismatch) {
    return fail(detail + ", " + std::to_string(path_mismatch) + " posting/exhaustive mismatches");
  }
  return pass(detail);
}

Outcome metric_properties() {
  std::mt19937_64 rng(4242);
  std::size_t violations = 0;
  for (int s = 0; s < 1000; ++s) {
    const std::size_t n = 1 + rng() % 2000;
    const std::size_t q = 3 + rng() % 60;
    std::vector<RankingResult> rs(q);
    for (auto& r : rs) {
      r.query_id = "q";
      r.gold_id = "g";
      r.gold_rank = 1 + rng() % n;
      r.n_candidates = n;
    }
    double last = -1;
    for (std::size_t k = 1; k <= n; k = k * 2 + 1) {
      const double r = eval::recall_at_k(rs, k);
      if (r < last) ++violations;
      last = r;
    }
    if (eval::recall_at_k(rs, n) != 100.0) ++violations;
    const double avg = eval::average_rank(rs);
    if (avg < 1.0 || avg > static_cast<double>(n)) ++violations;

    eval::MetricsConfig cfg;
    const std::size_t cut1 = 1 + rng() % (q - 2);
    const std::size_t cut2 = cut1 + 1 + rng() % (q - cut1 - 1);
    const std::span<const RankingResult> all(rs);
    const auto a = eval::evaluate_run(all.subspan(0, cut1), cfg);
    const auto b = eval::evaluate_run(all.subspan(cut1, cut2 - cut1), cfg);
    const auto c = eval::evaluate_run(all.subspan(cut2), cfg);
    const auto left = eval::merge_reports(eval::merge_reports(a, b), c);
    const auto right = eval::merge_reports(a, eval::merge_reports(b, c));
    const auto whole = eval::evaluate_run(all, cfg);
    for (const auto& [k, v] : whole.recall_at) {
      if (std::abs(left.recall_at.at(k) - v) > 1e-9 || std::abs(right.recall_at.at(k) - v) > 1e-9) ++violations;
    }
    if (std::abs(left.avg_rank - whole.avg_rank) > 1e-9 * whole.avg_rank ||
        std::abs(right.avg_rank - whole.avg_rank) > 1e-9 * whole.avg_rank) {
      ++violations;
    }
  }
  if (violations) return fail(std::to_string(violations) + " property violations");
  return pass("1000 sets: monotone, recall@N=100, 1<=avg<=N, merge associative");
}

Outcome random_baseline() {
  const std::size_t n = 66342;
  const std::size_t queries = 10000;
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = "u" + std::to_string(i);
  std::mt19937_64 gold_rng(1);
  std::vector<RankingResult> rs;
  rs.reserve(queries);
  for (std::size_t q = 0; q < queries; ++q) {
    rs.push_back(dense::rank_random(ids, "q" + std::to_string(q), gold_rng() % n, 12345, 100));
  }
  const double avg = eval::average_rank(rs);
  const double r100 = eval::recall_at_k(rs, 100);
  const double expected_avg = (static_cast<double>(n) + 1) / 2;  // 33,171.5
  const double p = 100.0 / static_cast<double>(n);
  const double se = 100.0 * std::sqrt(p * (1 - p) / static_cast<double>(queries));
  const double expected_r100 = 100.0 * p;  // 0.1507 %
  const bool ok = std::abs(avg - expected_avg) <= 0.02 * expected_avg && std::abs(r100 - expected_r100) <= 3 * se;
  const std::string detail = fmt("avg rank %.1f (target 33171.5 +-2%%), recall@100 %.3f%% (target 0.151%% +- ", avg,
                                 r100) +
                             fmt("%.3f%%)", 3 * se);
  return ok ? pass(detail) : fail(detail);
}

Outcome dense_oracle() {
  std::mt19937_64 rng(777);
  std::normal_distribution<float> dist(0.0f, 1.0f);
  std::size_t order_mismatch = 0, scale_mismatch = 0, cases = 0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 1 + rng() % 1000;
    const std::size_t dim = 1 + rng() % 64;
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = "c" + std::to_string(i);
    std::vector<float> vals(n * dim), q(dim);
    for (auto& v : vals) v = dist(rng);
    for (auto& v : q) v = dist(rng);
    const dense::EmbeddingMatrix m(ids, dim, vals);
    const std::size_t gold = rng() % n;

    std::vector<double> ref(n);
    for (std::size_t i = 0; i < n; ++i) ref[i] = oracle::dot_lanes(q.data(), vals.data() + i * dim, dim);
    const auto want = oracle::order(ref);
    const auto got = dense::rank_dense(q, m, "q", ids[gold], n);
    bool same = got.gold_rank == oracle::rank_of(ref, gold) && got.top_k.size() == n;
    for (std::size_t i = 0; same && i < n; ++i) same = got.top_k[i] == ids[want[i]];
    if (!same) ++order_mismatch;

    // Exact scalings (powers of two) must give the identical order; a generic
    // factor may only reorder candidates whose scores tie to float precision.
    for (float s : {0.5f, 4.0f, 3.7f}) {
      std::vector<float> scaled(vals);
      for (auto& v : scaled) v *= s;
      const dense::EmbeddingMatrix ms(ids, dim, scaled);
      const auto r = dense::rank_dense(q, ms, "q", ids[gold], n);
      if (s != 3.7f) {
        if (r.top_k != got.top_k) ++scale_mismatch;
        continue;
      }
      double scale_max = 0;
      for (double x : ref) scale_max = std::max(scale_max, std::abs(x));
      for (std::size_t i = 1; i < n; ++i) {
        const std::size_t prev = std::stoul(r.top_k[i - 1].substr(1));
        const std::size_t cur = std::stoul(r.top_k[i].substr(1));
        if (ref[prev] < ref[cur] - 1e-6 * (1 + scale_max)) {
          ++scale_mismatch;
          break;
        }
      }
    }
    ++cases;
  }
  const std::string detail = std::to_string(cases) + " cases (pool<=1000, dim<=64); order mismatches " +
                             std::to_string(order_mismatch) + ", scaling mismatches " + std::to_string(scale_mismatch);
  return order_mismatch || scale_mismatch ? fail(detail) : pass(detail);
}

Outcome eli5_full() {
  const char* dir = std::getenv("EXEMPLAR_ELI5_DIR");
  if (!dir) return skip("set EXEMPLAR_ELI5_DIR to a folder with eli5-train-kilt.jsonl and eli5-dev-kilt.jsonl");
  const fs::path train_path = fs::path(dir) / "eli5-train-kilt.jsonl";
  const fs::path dev_path = fs::path(dir) / "eli5-dev-kilt.jsonl";
  if (!fs::exists(train_path) || !fs::exists(dev_path)) return skip("KILT ELI5 files not found in " + std::string(dir));

  auto mine = [](const fs::path& p) {
    io::DocumentReader reader(p.string(), io::DocumentFormat::kKiltEli5);
    mining::CorpusMiner miner(mining::MinerConfig{});
    std::vector<mining::Document> batch;
    bool more = true;
    while (more) {
      batch.clear();
      more = reader.next_batch(batch, 4096);
      miner.add_batch(batch);
    }
    return std::move(miner).finish().instances;
  };
  const auto t0 = std::chrono::steady_clock::now();
  const auto train = mine(train_path);
  const auto dev = mine(dev_path);
  const double mine_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<mining::ExemplificationInstance> all(train);
  all.insert(all.end(), dev.begin(), dev.end());
  const auto stats = eval::corpus_stats(train);

  const store::CandidatePool pool = store::build_candidate_pool(all);
  const auto index = lexical::build_bm25(pool);
  std::vector<RankingResult> rs;
  for (const auto& inst : dev) {
    try {
      rs.push_back(lexical::rank_bm25(index, pool, store::build_query(inst, store::QueryMode::kLR), 1));
    } catch (const EmptyContext&) {
    }
  }
  const double r1 = eval::recall_at_k(rs, 1);

  auto within = [](double got, double want, double rel) { return std::abs(got - want) <= rel * want; };
  const bool ok = within(static_cast<double>(train.size()), 65157, 0.02) &&
                  within(static_cast<double>(dev.size()), 1185, 0.02) &&
                  within(stats.avg_context_words, 123.7, 0.10) && within(stats.avg_example_words, 23.3, 0.10) &&
                  within(stats.avg_right_words, 135.3, 0.10) && std::abs(r1 - 8.7) <= 2.0 && mine_secs < 600;
  std::ostringstream d;
  d << "train " << train.size() << " (65157), dev " << dev.size() << " (1185), words "
    << fmt("%.1f/%.1f/%.1f", stats.avg_context_words, stats.avg_example_words, stats.avg_right_words)
    << " (123.7/23.3/135.3), BM25 L+R R@1 " << fmt("%.1f", r1) << " (8.7)";
  return ok ? pass(d.str()) : fail(d.str());
}

}  // namespace

int main() {
  criterion("mining-golden-suite", 1.0, mining_golden);
  criterion("reference-example-fixtures", 0, reference_fixtures);
  criterion("bm25-oracle-equivalence", 30.0, bm25_oracle);
  criterion("metric-properties", 10.0, metric_properties);
  criterion("random-baseline-analytics", 60.0, random_baseline);
  criterion("dense-ranking-oracle", 30.0, dense_oracle);
  criterion("eli5-full-scale", 0, eli5_full);
  return failures == 0 ? 0 : 1;
}
