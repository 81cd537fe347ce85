#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "exemplar/corpus_io.hpp"
#include "exemplar/dense.hpp"
#include "exemplar/errors.hpp"
#include "exemplar/eval.hpp"
#include "exemplar/lexical.hpp"
#include "exemplar/manifest.hpp"
#include "exemplar/parallel.hpp"
#include "exemplar/ranking.hpp"
#include "exemplar/store.hpp"

using namespace exemplar;
using io::Json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MineArgs {
  std::string input;
  std::string format = "text";
  std::string out = "-";
  std::string report;
  std::string manifest;
  std::string source = "other";
  std::vector<std::string> markers = {"for_example", "eg"};
  std::size_t context_budget = 256;
  std::size_t min_unit_tokens = 3;
  std::size_t max_unit_sentences = 3;
};

struct PoolArgs {
  std::vector<std::string> instances;
  std::string out = "-";
  std::string manifest;
};

struct QueriesArgs {
  std::vector<std::string> instances;
  std::string mode = "LR";
  std::string mask = "[MASK]";
  bool no_question = false;
  std::string out = "-";
  std::string manifest;
};

struct RankArgs {
  std::string queries;
  std::string pool;
  std::string method = "bm25";
  std::string embeddings;
  std::string query_embeddings;
  bool cosine = false;
  std::size_t k = 100;
  std::uint64_t seed = 0;
  double k1 = 1.5;
  double b = 0.75;
  double epsilon = 0.25;
  std::string out = "-";
  std::string manifest;
};

struct EvalArgs {
  std::vector<std::string> results;
  std::vector<std::size_t> ks = eval::kDefaultKs;
  std::string method;
  std::string mode;
  std::string out = "-";
  std::string csv;
  std::string svg;
  std::string manifest;
};

struct StatsArgs {
  std::vector<std::string> instances;
  std::vector<std::string> labeled;
  std::string out = "-";
  std::string manifest;
};

mining::MinerConfig miner_config(const MineArgs& a) {
  mining::MinerConfig c;
  c.context_budget = a.context_budget;
  c.min_unit_tokens = a.min_unit_tokens;
  c.max_unit_sentences = a.max_unit_sentences;
  c.use_for_example = false;
  c.use_eg = false;
  for (const auto& m : a.markers) {
    auto marker = mining::parse_marker(m);
    if (!marker) throw UsageError("unknown marker '" + m + "' (expected for_example or eg)");
    (*marker == mining::Marker::kForExample ? c.use_for_example : c.use_eg) = true;
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

int run_mine(const MineArgs& a) {
  RunManifest manifest("mine");
  const mining::MinerConfig config = miner_config(a);
  const auto format = io::parse_document_format(a.format);
  const auto source = mining::parse_source(a.source);
  if (mining::source_name(source) != a.source) throw UsageError("unknown source '" + a.source + "'");

  Json cfg = Json::object();
  cfg["format"] = a.format;
  cfg["source"] = a.source;
  cfg["markers"] = a.markers;
  cfg["context_budget"] = a.context_budget;
  cfg["min_unit_tokens"] = a.min_unit_tokens;
  cfg["max_unit_sentences"] = a.max_unit_sentences;
  manifest.set_config(cfg);

  io::DocumentReader reader(a.input, format, source);
  mining::CorpusMiner miner(config);
  std::vector<mining::Document> batch;
  bool more = true;
  while (more) {
    batch.clear();
    more = reader.next_batch(batch, 1024);
    miner.add_batch(batch);
  }
  for (std::size_t i = 0; i < reader.io_errors(); ++i) miner.add_io_error();
  mining::MiningOutput result = std::move(miner).finish();

  io::OutputFile out(a.out);
  io::write_instances(out.stream(), result.instances);
  out.commit();

  const std::string report_text = io::report_to_json(result.report).dump(2) + "\n";
  std::string report_path = a.report;
  if (report_path.empty() && a.out != "-") report_path = a.out + ".report.json";
  if (report_path.empty()) {
    std::cerr << report_text;
  } else {
    io::OutputFile rep(report_path);
    rep.stream() << report_text;
    rep.commit();
  }

  for (const auto& f : reader.files()) manifest.add_input(f);
  manifest.add_output(a.out);
  if (!report_path.empty()) manifest.add_output(report_path);
  manifest.write(a.out, a.manifest);
  return 0;
}

std::vector<mining::ExemplificationInstance> read_all_instances(const std::vector<std::string>& paths,
                                                                RunManifest& manifest) {
  std::vector<mining::ExemplificationInstance> all;
  for (const auto& p : paths) {
    auto xs = io::read_instances(p);
    all.insert(all.end(), std::make_move_iterator(xs.begin()), std::make_move_iterator(xs.end()));
    manifest.add_input(p);
  }
  return all;
}

int run_pool(const PoolArgs& a) {
  RunManifest manifest("pool");
  const auto instances = read_all_instances(a.instances, manifest);
  const store::CandidatePool pool = store::build_candidate_pool(instances);
  io::OutputFile out(a.out);
  store::write_pool(out.stream(), pool);
  out.commit();
  manifest.set_config(Json{{"n_units", pool.size()}});
  manifest.add_output(a.out);
  manifest.write(a.out, a.manifest);
  return 0;
}

int run_queries(const QueriesArgs& a) {
  RunManifest manifest("queries");
  const store::QueryMode mode = store::parse_mode(a.mode);
  store::StoreConfig config;
  config.mask_placeholder = a.mask;
  config.include_question = !a.no_question;
  const auto instances = read_all_instances(a.instances, manifest);

  std::vector<store::RetrievalQuery> queries;
  queries.reserve(instances.size());
  std::size_t skipped = 0;
  for (const auto& inst : instances) {
    try {
      queries.push_back(store::build_query(inst, mode, config));
    } catch (const EmptyContext& e) {
      std::cerr << "warning: skipping " << inst.instance_id << ": " << e.what() << "\n";
      ++skipped;
    }
  }
  io::OutputFile out(a.out);
  store::write_queries(out.stream(), queries);
  out.commit();

  manifest.set_config(Json{{"mode", store::mode_name(mode)},
                           {"mask", a.mask},
                           {"include_question", config.include_question},
                           {"n_queries", queries.size()},
                           {"skipped_empty_context", skipped}});
  manifest.add_output(a.out);
  manifest.write(a.out, a.manifest);
  return 0;
}

int run_rank(const RankArgs& a) {
  RunManifest manifest("rank");
  if (a.method != "bm25" && a.method != "dense" && a.method != "random") {
    throw UsageError("unknown method '" + a.method + "'");
  }
  if (a.method == "dense" && (a.embeddings.empty() || a.query_embeddings.empty())) {
    throw UsageError("--method dense requires --embeddings and --query-embeddings");
  }
  if (a.k == 0) throw UsageError("--k must be >= 1");

  const store::CandidatePool pool = store::read_pool(a.pool);
  if (pool.empty()) throw EmptyPool("pool '" + a.pool + "' has no units");
  const std::vector<store::RetrievalQuery> queries = store::read_queries(a.queries);
  manifest.add_input(a.queries);
  manifest.add_input(a.pool);

  Json cfg{{"method", a.method}, {"k", a.k}};
  for (const auto& q : queries) {
    if (!pool.index_of(q.gold_id)) {
      throw GoldMissing("query " + q.query_id + ": gold unit " + q.gold_id + " is not in the pool");
    }
  }

  std::vector<RankingResult> results(queries.size());
  const std::size_t threads = worker_count();

  if (a.method == "bm25") {
    lexical::Bm25Params params;
    params.k1 = a.k1;
    params.b = a.b;
    params.epsilon = a.epsilon;
    cfg["k1"] = a.k1;
    cfg["b"] = a.b;
    cfg["epsilon"] = a.epsilon;
    const lexical::Bm25Index index = lexical::Bm25Index::build(pool, params);
    parallel_for(queries.size(), threads, [&](std::size_t i) {
      results[i] = lexical::rank_bm25(index, pool, queries[i], a.k);
    });
  } else if (a.method == "dense") {
    const dense::EmbeddingMatrix cand = dense::load_embeddings(a.embeddings).reordered(pool.unit_ids());
    const dense::EmbeddingMatrix qemb = dense::load_embeddings(a.query_embeddings);
    manifest.add_input(a.embeddings);
    manifest.add_input(dense::sidecar_path(a.embeddings));
    manifest.add_input(a.query_embeddings);
    manifest.add_input(dense::sidecar_path(a.query_embeddings));
    if (cand.dim() != qemb.dim()) {
      throw DimMismatch("candidate dim " + std::to_string(cand.dim()) + " vs query dim " +
                        std::to_string(qemb.dim()));
    }
    std::vector<std::size_t> rows(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
      auto r = qemb.index_of(queries[i].query_id);
      if (!r) throw GoldMissing("no query embedding for " + queries[i].query_id);
      rows[i] = *r;
    }
    const auto sim = a.cosine ? dense::Similarity::kCosine : dense::Similarity::kDot;
    cfg["similarity"] = a.cosine ? "cosine" : "dot";
    parallel_for(queries.size(), threads, [&](std::size_t i) {
      results[i] = dense::rank_dense(qemb.row(rows[i]), cand, queries[i].query_id, queries[i].gold_id, a.k, sim);
    });
  } else {
    manifest.set_seed(a.seed);
    parallel_for(queries.size(), threads, [&](std::size_t i) {
      results[i] = dense::rank_random(pool, queries[i], a.seed, a.k);
    });
  }

  io::OutputFile out(a.out);
  write_results(out.stream(), results);
  out.commit();
  manifest.set_config(cfg);
  manifest.add_output(a.out);
  manifest.write(a.out, a.manifest);
  return 0;
}

int run_eval(const EvalArgs& a) {
  RunManifest manifest("eval");
  if (a.ks.empty()) throw UsageError("--ks must list at least one k");
  for (std::size_t k : a.ks) {
    if (k == 0) throw UsageError("--ks values must be >= 1");
  }
  eval::MetricsConfig config;
  config.ks = a.ks;
  config.method = a.method.empty() ? "unknown" : a.method;
  if (!a.mode.empty()) config.mode = store::parse_mode(a.mode);

  std::optional<eval::MetricsReport> report;
  for (const auto& path : a.results) {
    const auto results = read_results(path);
    manifest.add_input(path);
    auto shard = eval::evaluate_run(results, config);
    report = report ? eval::merge_reports(*report, shard) : shard;
  }

  io::OutputFile out(a.out);
  out.stream() << eval::metrics_to_json(*report).dump(2) << "\n";
  out.commit();
  manifest.add_output(a.out);
  if (!a.csv.empty()) {
    io::OutputFile csv(a.csv);
    csv.stream() << eval::metrics_to_csv(*report);
    csv.commit();
    manifest.add_output(a.csv);
  }
  if (!a.svg.empty()) {
    io::OutputFile svg(a.svg);
    svg.stream() << eval::recall_curve_svg({*report});
    svg.commit();
    manifest.add_output(a.svg);
  }
  if (a.out != "-") std::cerr << eval::format_metrics_row(*report) << "\n";

  Json ks = Json::array();
  for (std::size_t k : a.ks) ks.push_back(k);
  manifest.set_config(Json{{"ks", ks}, {"method", config.method}, {"mode", store::mode_name(config.mode)}});
  manifest.write(a.out, a.manifest);
  return 0;
}

int run_stats(const StatsArgs& a) {
  RunManifest manifest("stats");
  if (a.instances.empty() && a.labeled.empty()) {
    throw UsageError("stats needs --instances and/or --labeled");
  }
  Json j = Json::object();
  if (!a.instances.empty()) {
    const auto xs = read_all_instances(a.instances, manifest);
    j["corpus"] = eval::corpus_stats_to_json(eval::corpus_stats(xs));
  }
  if (!a.labeled.empty()) {
    const auto xs = read_all_instances(a.labeled, manifest);
    j["annotation"] = eval::annotation_stats_to_json(eval::annotation_stats(xs));
  }
  io::OutputFile out(a.out);
  out.stream() << j.dump(2) << "\n";
  out.commit();
  manifest.add_output(a.out);
  manifest.write(a.out, a.manifest);
  return 0;
}

int report_error(const char* kind, const std::string& what, int code) {
  std::cerr << "exemplar: " << kind << what << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine exemplification units and evaluate example retrieval."};
  app.set_config("--config", "", "Read option defaults from a key = value file");
  app.require_subcommand(1);

  MineArgs mine;
  auto* mine_cmd = app.add_subcommand("mine", "Extract exemplification instances from a corpus");
  mine_cmd->add_option("--input", mine.input, "Corpus file or directory, - for stdin")->required();
  mine_cmd->add_option("--format", mine.format, "text | jsonl | kilt-eli5")->capture_default_str();
  mine_cmd->add_option("--out", mine.out, "Instance JSONL")->capture_default_str();
  mine_cmd->add_option("--report", mine.report, "Mining report (default <out>.report.json)");
  mine_cmd->add_option("--source", mine.source, "Source tag for text input")->capture_default_str();
  mine_cmd->add_option("--markers", mine.markers, "for_example,eg")->delimiter(',')->capture_default_str();
  mine_cmd->add_option("--context-budget", mine.context_budget, "Tokens per context side")->capture_default_str();
  mine_cmd->add_option("--min-unit-tokens", mine.min_unit_tokens)->capture_default_str();
  mine_cmd->add_option("--max-unit-sentences", mine.max_unit_sentences)->capture_default_str();
  mine_cmd->add_option("--manifest", mine.manifest, "Manifest path (default <out>.manifest.json)");

  PoolArgs pool;
  auto* pool_cmd = app.add_subcommand("pool", "Build the candidate pool from instances");
  pool_cmd->add_option("--instances", pool.instances, "Instance JSONL (repeatable)")->required();
  pool_cmd->add_option("--out", pool.out)->capture_default_str();
  pool_cmd->add_option("--manifest", pool.manifest);

  QueriesArgs queries;
  auto* queries_cmd = app.add_subcommand("queries", "Build retrieval queries from instances");
  queries_cmd->add_option("--instances", queries.instances, "Instance JSONL (repeatable)")->required();
  queries_cmd->add_option("--mode", queries.mode, "L | LR")->capture_default_str();
  queries_cmd->add_option("--mask", queries.mask, "Placeholder for the removed unit")->capture_default_str();
  queries_cmd->add_flag("--no-question", queries.no_question, "Leave the question out of the query");
  queries_cmd->add_option("--out", queries.out)->capture_default_str();
  queries_cmd->add_option("--manifest", queries.manifest);

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Rank the pool for every query");
  rank_cmd->add_option("--queries", rank.queries)->required();
  rank_cmd->add_option("--pool", rank.pool)->required();
  rank_cmd->add_option("--method", rank.method, "bm25 | dense | random")->capture_default_str();
  rank_cmd->add_option("--embeddings", rank.embeddings, "Candidate EMB1 file (dense)");
  rank_cmd->add_option("--query-embeddings", rank.query_embeddings, "Query EMB1 file (dense)");
  rank_cmd->add_flag("--cosine", rank.cosine, "Cosine instead of dot product (dense)");
  rank_cmd->add_option("--k", rank.k, "Top-k ids to keep")->capture_default_str();
  rank_cmd->add_option("--seed", rank.seed, "Seed for the random ranker")->capture_default_str();
  rank_cmd->add_option("--k1", rank.k1)->capture_default_str();
  rank_cmd->add_option("--b", rank.b)->capture_default_str();
  rank_cmd->add_option("--epsilon", rank.epsilon)->capture_default_str();
  rank_cmd->add_option("--out", rank.out)->capture_default_str();
  rank_cmd->add_option("--manifest", rank.manifest);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Recall@k and average rank");
  eval_cmd->add_option("--results", ev.results, "Ranking JSONL; several files are merged as shards")->required();
  eval_cmd->add_option("--ks", ev.ks, "Comma-separated cutoffs")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--method", ev.method, "Label stored in the report");
  eval_cmd->add_option("--mode", ev.mode, "Query mode label (L | LR)");
  eval_cmd->add_option("--out", ev.out)->capture_default_str();
  eval_cmd->add_option("--csv", ev.csv);
  eval_cmd->add_option("--svg", ev.svg);
  eval_cmd->add_option("--manifest", ev.manifest);

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus and annotation statistics");
  stats_cmd->add_option("--instances", stats.instances);
  stats_cmd->add_option("--labeled", stats.labeled);
  stats_cmd->add_option("--out", stats.out)->capture_default_str();
  stats_cmd->add_option("--manifest", stats.manifest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (*mine_cmd) return run_mine(mine);
    if (*pool_cmd) return run_pool(pool);
    if (*queries_cmd) return run_queries(queries);
    if (*rank_cmd) return run_rank(rank);
    if (*eval_cmd) return run_eval(ev);
    if (*stats_cmd) return run_stats(stats);
  } catch (const UsageError& e) {
    return report_error("usage: ", e.what(), static_cast<int>(ExitCode::kUsage));
  } catch (const Error& e) {
    return report_error("", e.what(), static_cast<int>(e.code()));
  } catch (const std::invalid_argument& e) {
    return report_error("usage: ", e.what(), static_cast<int>(ExitCode::kUsage));
  } catch (const std::exception& e) {
    return report_error("", e.what(), static_cast<int>(ExitCode::kIo));
  }
  return static_cast<int>(ExitCode::kUsage);
}
