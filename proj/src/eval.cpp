#include "exemplar/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "exemplar/errors.hpp"
#include "exemplar/text.hpp"

namespace exemplar::eval {

namespace {

std::string one_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

double pct(std::size_t part, std::size_t whole) {
  return whole ? 100.0 * static_cast<double>(part) / static_cast<double>(whole) : 0.0;
}

}  // namespace

double recall_at_k(std::span<const RankingResult> results, std::size_t k) {
  if (results.empty()) throw EmptyResults("recall@k over no results");
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  std::size_t hits = 0;
  for (const auto& r : results) {
    if (r.gold_rank <= k) ++hits;
  }
  return pct(hits, results.size());
}

double average_rank(std::span<const RankingResult> results) {
  if (results.empty()) throw EmptyResults("average rank over no results");
  double sum = 0.0;
  for (const auto& r : results) sum += static_cast<double>(r.gold_rank);
  return sum / static_cast<double>(results.size());
}

MetricsReport evaluate_run(std::span<const RankingResult> results, const MetricsConfig& config) {
  if (results.empty()) throw EmptyResults("no ranking results to evaluate");
  std::set<std::size_t> pools;
  for (const auto& r : results) {
    if (r.n_candidates != 0) pools.insert(r.n_candidates);
  }
  if (pools.size() > 1) {
    throw MixedPool("results were ranked over " + std::to_string(pools.size()) + " different pool sizes");
  }
  MetricsReport m;
  m.method = config.method;
  m.mode = config.mode;
  m.n_queries = results.size();
  m.n_candidates = pools.empty() ? 0 : *pools.begin();
  for (std::size_t k : config.ks) m.recall_at[k] = recall_at_k(results, k);
  m.avg_rank = average_rank(results);
  return m;
}

MetricsReport merge_reports(const MetricsReport& a, const MetricsReport& b) {
  if (a.n_candidates != b.n_candidates) throw MixedPool("reports cover different pool sizes");
  if (a.method != b.method || a.mode != b.mode) throw MixedPool("reports come from different runs");
  if (a.recall_at.size() != b.recall_at.size() ||
      !std::equal(a.recall_at.begin(), a.recall_at.end(), b.recall_at.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw MixedPool("reports use different k values");
  }
  const double na = static_cast<double>(a.n_queries);
  const double nb = static_cast<double>(b.n_queries);
  const double n = na + nb;
  MetricsReport m = a;
  m.n_queries = a.n_queries + b.n_queries;
  if (m.n_queries == 0) return m;
  for (auto& [k, v] : m.recall_at) v = (a.recall_at.at(k) * na + b.recall_at.at(k) * nb) / n;
  m.avg_rank = (a.avg_rank * na + b.avg_rank * nb) / n;
  return m;
}

io::Json metrics_to_json(const MetricsReport& r) {
  io::Json j = io::Json::object();
  io::Json recall = io::Json::object();
  for (const auto& [k, v] : r.recall_at) recall[std::to_string(k)] = v;
  j["recall_at"] = recall;
  j["avg_rank"] = r.avg_rank;
  j["n_queries"] = r.n_queries;
  j["n_candidates"] = r.n_candidates;
  j["method"] = r.method;
  j["mode"] = store::mode_name(r.mode);
  return j;
}

MetricsReport metrics_from_json(const io::Json& j) {
  MetricsReport r;
  try {
    for (const auto& [k, v] : j.at("recall_at").items()) r.recall_at[std::stoul(k)] = v.get<double>();
    r.avg_rank = j.at("avg_rank").get<double>();
    r.n_queries = j.at("n_queries").get<std::size_t>();
    r.n_candidates = j.at("n_candidates").get<std::size_t>();
    r.method = j.at("method").get<std::string>();
    r.mode = store::parse_mode(j.at("mode").get<std::string>());
  } catch (const std::exception& e) {
    throw SchemaError(std::string("metrics report: ") + e.what());
  }
  return r;
}

std::string metrics_to_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "k,recall\n";
  for (const auto& [k, v] : r.recall_at) out << k << ',' << one_decimal(v) << '\n';
  return out.str();
}

std::string format_metrics_row(const MetricsReport& r) {
  std::ostringstream out;
  out << r.method << " (" << store::mode_name(r.mode) << ")";
  for (const auto& [k, v] : r.recall_at) out << "  R@" << k << " " << one_decimal(v);
  out << "  avg rank " << one_decimal(r.avg_rank) << "  (" << r.n_queries << " queries";
  if (r.n_candidates) out << ", " << r.n_candidates << " candidates";
  out << ")";
  return out.str();
}

std::string recall_curve_svg(const std::vector<MetricsReport>& reports) {
  constexpr double kW = 520, kH = 340, kLeft = 50, kRight = 140, kTop = 20, kBottom = 40;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;
  std::size_t max_k = 1;
  for (const auto& r : reports) {
    if (!r.recall_at.empty()) max_k = std::max(max_k, r.recall_at.rbegin()->first);
  }
  const double log_max = std::max(std::log10(static_cast<double>(max_k)), 1.0);
  auto x_of = [&](std::size_t k) { return kLeft + plot_w * std::log10(static_cast<double>(k)) / log_max; };
  auto y_of = [&](double v) { return kTop + plot_h * (1.0 - v / 100.0); };
  static const char* kColors[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#999\"/>\n";
  for (int v = 0; v <= 100; v += 25) {
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << y_of(v) + 4 << "\" font-size=\"10\" text-anchor=\"end\">" << v
        << "</text>\n";
  }
  std::set<std::size_t> ks;
  for (const auto& r : reports) {
    for (const auto& [k, v] : r.recall_at) ks.insert(k);
  }
  for (std::size_t k : ks) {
    out << "<text x=\"" << x_of(k) << "\" y=\"" << kH - kBottom + 14 << "\" font-size=\"10\" text-anchor=\"middle\">"
        << k << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 6
      << "\" font-size=\"11\" text-anchor=\"middle\">k</text>\n";
  out << "<text x=\"12\" y=\"" << kTop + plot_h / 2 << "\" font-size=\"11\" transform=\"rotate(-90 12 "
      << kTop + plot_h / 2 << ")\" text-anchor=\"middle\">recall@k (%)</text>\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const char* color = kColors[i % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& [k, v] : reports[i].recall_at) {
      if (!first) out << ' ';
      first = false;
      out << x_of(k) << ',' << y_of(v);
    }
    out << "\"/>\n";
    const double ly = kTop + 14 + 16 * static_cast<double>(i);
    out << "<text x=\"" << kW - kRight + 8 << "\" y=\"" << ly << "\" font-size=\"11\" fill=\"" << color << "\">"
        << xml_escape(reports[i].method + " (" + std::string(store::mode_name(reports[i].mode)) + ")")
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

namespace {

struct WordSums {
  std::size_t n = 0;
  double left = 0, unit = 0, right = 0;

  void add(const mining::ExemplificationInstance& inst) {
    ++n;
    left += static_cast<double>(text::count_whitespace_tokens(inst.left_context));
    unit += static_cast<double>(text::count_whitespace_tokens(inst.unit));
    right += static_cast<double>(text::count_whitespace_tokens(inst.right_context));
  }
  WordAverages averages() const {
    WordAverages a;
    a.n_instances = n;
    if (n) {
      a.avg_context_words = left / static_cast<double>(n);
      a.avg_example_words = unit / static_cast<double>(n);
      a.avg_right_words = right / static_cast<double>(n);
    }
    return a;
  }
};

struct LengthSums {
  std::size_t n = 0, n_anchor = 0;
  double anchor_sent = 0, anchor_words = 0, example_sent = 0, example_words = 0;

  void add(const std::optional<std::string>& anchor, const std::string& example) {
    ++n;
    example_sent += static_cast<double>(mining::segment_sentences(example).size());
    example_words += static_cast<double>(text::count_whitespace_tokens(example));
    if (anchor && !text::trim(*anchor).empty()) {
      ++n_anchor;
      anchor_sent += static_cast<double>(mining::segment_sentences(*anchor).size());
      anchor_words += static_cast<double>(text::count_whitespace_tokens(*anchor));
    }
  }
  UnitLengths finish() const {
    UnitLengths u;
    u.n = n;
    u.n_anchor = n_anchor;
    if (n) {
      u.example_sentences = example_sent / static_cast<double>(n);
      u.example_words = example_words / static_cast<double>(n);
    }
    if (n_anchor) {
      u.anchor_sentences = anchor_sent / static_cast<double>(n_anchor);
      u.anchor_words = anchor_words / static_cast<double>(n_anchor);
    }
    return u;
  }
};

struct PairCount {
  std::size_t first = 0, second = 0;
  Distribution finish() const {
    const std::size_t n = first + second;
    return {n, pct(first, n), pct(second, n)};
  }
};

}  // namespace

CorpusStats corpus_stats(std::span<const mining::ExemplificationInstance> instances) {
  WordSums all;
  std::map<std::string, WordSums> by_source;
  for (const auto& inst : instances) {
    all.add(inst);
    by_source[std::string(mining::source_name(inst.source))].add(inst);
  }
  CorpusStats s;
  static_cast<WordAverages&>(s) = all.averages();
  for (const auto& [src, sums] : by_source) s.per_source[src] = sums.averages();
  return s;
}

AnnotationStats annotation_stats(std::span<const mining::ExemplificationInstance> instances) {
  std::size_t valid = 0, extracted = 0;
  std::map<std::string, std::pair<std::size_t, std::size_t>> validity;
  PairCount type_all, personal_all;
  std::map<std::string, PairCount> type_src, personal_src;
  std::map<std::string, LengthSums> lengths;

  for (const auto& inst : instances) {
    if (!inst.labels) continue;
    const auto& l = *inst.labels;
    const std::string src(mining::source_name(inst.source));
    ++extracted;
    ++validity[src].second;
    if (!l.valid) continue;
    ++valid;
    ++validity[src].first;

    const std::string& example = l.example_text ? *l.example_text : inst.unit;
    lengths[src].add(l.anchor_text, example);
    if (l.example_type) {
      const bool real = *l.example_type == mining::ExampleType::kReal;
      (real ? type_all.first : type_all.second)++;
      (real ? type_src[src].first : type_src[src].second)++;
      lengths[real ? "real" : "hypothetical"].add(l.anchor_text, example);
    }
    if (l.personal) {
      const bool personal = *l.personal;
      (personal ? personal_all.first : personal_all.second)++;
      (personal ? personal_src[src].first : personal_src[src].second)++;
      lengths[personal ? "personal" : "not_personal"].add(l.anchor_text, example);
    }
  }
  if (extracted == 0) throw NoLabels("no labelled instances");

  AnnotationStats s;
  s.overall = {valid, extracted, pct(valid, extracted)};
  for (const auto& [src, c] : validity) s.by_source[src] = {c.first, c.second, pct(c.first, c.second)};
  s.type_overall = type_all.finish();
  for (const auto& [src, c] : type_src) s.type_by_source[src] = c.finish();
  s.personal_overall = personal_all.finish();
  for (const auto& [src, c] : personal_src) s.personal_by_source[src] = c.finish();
  for (const auto& [key, sums] : lengths) s.lengths[key] = sums.finish();
  return s;
}

namespace {

io::Json averages_json(const WordAverages& a) {
  io::Json j = io::Json::object();
  j["n_instances"] = a.n_instances;
  j["avg_context_words"] = a.avg_context_words;
  j["avg_example_words"] = a.avg_example_words;
  j["avg_right_words"] = a.avg_right_words;
  return j;
}

io::Json validity_json(const ValidityCounts& v) {
  return io::Json{{"valid", v.valid}, {"extracted", v.extracted}, {"pct_valid", v.pct_valid}};
}

io::Json distribution_json(const Distribution& d, const char* first, const char* second) {
  return io::Json{{"n", d.n}, {first, d.pct_first}, {second, d.pct_second}};
}

}  // namespace

io::Json corpus_stats_to_json(const CorpusStats& s) {
  io::Json j = averages_json(s);
  io::Json per = io::Json::object();
  for (const auto& [src, a] : s.per_source) per[src] = averages_json(a);
  j["per_source"] = per;
  return j;
}

io::Json annotation_stats_to_json(const AnnotationStats& s) {
  io::Json j = io::Json::object();
  j["valid_count"] = s.overall.valid;
  j["extracted_count"] = s.overall.extracted;
  j["pct_valid"] = s.overall.pct_valid;
  io::Json by_source = io::Json::object();
  for (const auto& [src, v] : s.by_source) by_source[src] = validity_json(v);
  j["by_source"] = by_source;

  io::Json type = io::Json::object();
  type["overall"] = distribution_json(s.type_overall, "real", "hypothetical");
  for (const auto& [src, d] : s.type_by_source) type[src] = distribution_json(d, "real", "hypothetical");
  j["type_distribution"] = type;

  io::Json personal = io::Json::object();
  personal["overall"] = distribution_json(s.personal_overall, "personal", "not_personal");
  for (const auto& [src, d] : s.personal_by_source) {
    personal[src] = distribution_json(d, "personal", "not_personal");
  }
  j["personal_distribution"] = personal;

  io::Json lengths = io::Json::object();
  for (const auto& [key, u] : s.lengths) {
    lengths[key] = io::Json{{"n", u.n},
                            {"n_anchor", u.n_anchor},
                            {"anchor_sentences", u.anchor_sentences},
                            {"anchor_words", u.anchor_words},
                            {"example_sentences", u.example_sentences},
                            {"example_words", u.example_words}};
  }
  j["length_by_type"] = lengths;
  return j;
}

}  // namespace exemplar::eval
