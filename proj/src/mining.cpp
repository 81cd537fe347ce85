#include "exemplar/mining.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "exemplar/errors.hpp"
#include "exemplar/parallel.hpp"

namespace exemplar::mining {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Abbreviations whose final period never ends a sentence (compared without
// the final period, ASCII case-insensitively).
constexpr std::array<std::string_view, 17> kAbbreviations = {
    "e.g", "i.e", "etc", "vs", "mr", "mrs", "ms", "dr", "prof", "st",
    "jr", "sr", "cf", "viz", "approx", "al", "incl"};

constexpr std::array<std::string_view, 11> kConnectives = {
    "and", "but", "or", "so", "then", "also", "yet", "nor", "thus", "hence", "otherwise"};

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

// Closing quote or bracket at `pos`; returns its byte length or 0.
std::size_t closer_length(std::string_view t, std::size_t pos) {
  const char c = t[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  std::size_t len = 1;
  const char32_t cp = text::decode_utf8(t, pos, &len);
  if (cp == 0x201D || cp == 0x2019 || cp == 0x00BB) return len;
  return 0;
}

bool is_opening_code_point(char32_t cp) {
  return cp == '"' || cp == '\'' || cp == '(' || cp == '[' || cp == 0x201C || cp == 0x2018 ||
         cp == 0x00AB;
}

bool is_quote_code_point(char32_t cp) {
  return cp == '"' || cp == '\'' || cp == 0x201C || cp == 0x201D || cp == 0x2018 ||
         cp == 0x2019 || cp == 0x00AB || cp == 0x00BB;
}

bool is_word_char_at(std::string_view t, std::size_t pos) {
  std::size_t len = 1;
  return text::is_word_code_point(text::decode_utf8(t, pos, &len));
}

bool word_boundary_before(std::string_view t, std::size_t pos) {
  if (pos == 0) return true;
  return !is_word_char_at(t, text::previous_code_point(t, pos));
}

bool word_boundary_after(std::string_view t, std::size_t pos) {
  return pos >= t.size() || !is_word_char_at(t, pos);
}

bool lower_ascii_equals(std::string_view t, std::size_t pos, std::string_view lit) {
  if (pos + lit.size() > t.size()) return false;
  return text::iequals(t.substr(pos, lit.size()), lit);
}

// The period at `dot` closes an abbreviation.
bool is_abbreviation(std::string_view t, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0) {
    const char c = t[start - 1];
    if (text::is_space(c) || c == '(' || c == '[' || c == '"' || c == '\'') break;
    --start;
  }
  const std::string_view word = t.substr(start, dot - start);
  for (auto abbr : kAbbreviations) {
    if (text::iequals(word, abbr)) return true;
  }
  // Spaced variants "e. g." and "i. e.".
  if (start >= 3 && t[start - 1] == ' ' && t[start - 2] == '.') {
    const std::string_view first = t.substr(start - 3, 1);
    if ((text::iequals(word, "g") && text::iequals(first, "e")) ||
        (text::iequals(word, "e") && text::iequals(first, "i"))) {
      return true;
    }
  }
  return false;
}

std::size_t sentence_of(const std::vector<ByteSpan>& sentences, std::size_t pos) {
  auto it = std::upper_bound(sentences.begin(), sentences.end(), pos,
                             [](std::size_t p, const ByteSpan& s) { return p < s.end; });
  if (it == sentences.end()) return sentences.empty() ? 0 : sentences.size() - 1;
  return static_cast<std::size_t>(it - sentences.begin());
}

struct Paren {
  std::size_t open;
  std::size_t close;  // kNone when unmatched
};

std::vector<Paren> match_parentheses(std::string_view t) {
  std::vector<Paren> parens;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == '(') {
      stack.push_back(parens.size());
      parens.push_back({i, kNone});
    } else if (t[i] == ')' && !stack.empty()) {
      parens[stack.back()].close = i;
      stack.pop_back();
    }
  }
  return parens;
}

// Innermost parenthesis enclosing `pos`. An unmatched '(' only counts when it
// opens inside `sentence`.
const Paren* enclosing_paren(const std::vector<Paren>& parens, std::size_t pos,
                             const ByteSpan& sentence) {
  auto it = std::lower_bound(parens.begin(), parens.end(), pos,
                             [](const Paren& p, std::size_t v) { return p.open < v; });
  while (it != parens.begin()) {
    --it;
    if (it->close == kNone) {
      if (it->open >= sentence.start) return &*it;
      continue;
    }
    if (it->close > pos) return &*it;
  }
  return nullptr;
}

struct DocumentIndex {
  std::vector<ByteSpan> sentences;
  std::vector<Paren> parens;
};

bool begins_continuation(std::string_view t, const ByteSpan& s) {
  std::size_t i = s.start;
  while (i < s.end) {
    std::size_t len = 1;
    const char32_t cp = text::decode_utf8(t, i, &len);
    if (!is_opening_code_point(cp) && !is_quote_code_point(cp)) break;
    i += len;
  }
  if (i >= s.end) return false;
  std::size_t len = 1;
  const char32_t first = text::decode_utf8(t, i, &len);
  if (text::is_lower_code_point(first)) return true;
  std::size_t j = i;
  while (j < s.end && ((t[j] >= 'a' && t[j] <= 'z') || (t[j] >= 'A' && t[j] <= 'Z'))) ++j;
  if (!word_boundary_after(t, j)) return false;
  const std::string_view word = t.substr(i, j - i);
  for (auto c : kConnectives) {
    if (text::iequals(word, c)) return true;
  }
  return false;
}

bool paragraph_break_between(std::string_view t, std::size_t from, std::size_t to) {
  int newlines = 0;
  for (std::size_t i = from; i < to; ++i) {
    if (t[i] == '\n') ++newlines;
  }
  return newlines >= 2;
}

std::pair<ByteSpan, std::string> extract_with_index(std::string_view t, const MarkerMatch& match,
                                                    const MinerConfig& config,
                                                    const DocumentIndex& index) {
  if (index.sentences.empty()) throw MalformedSpan("document has no sentences");
  const std::size_t si = sentence_of(index.sentences, match.byte_start);
  const ByteSpan& sentence = index.sentences[si];

  ByteSpan span;
  if (const Paren* p = enclosing_paren(index.parens, match.byte_start, sentence)) {
    if (p->close == kNone) {
      throw MalformedSpan("unclosed parenthesis at byte " + std::to_string(p->open));
    }
    span = {p->open, p->close + 1};
  } else {
    bool initial = true;
    for (std::size_t i = sentence.start; i < match.byte_start;) {
      std::size_t len = 1;
      const char32_t cp = text::decode_utf8(t, i, &len);
      if (!(cp < 0x80 && text::is_space(static_cast<char>(cp))) && !is_quote_code_point(cp)) {
        initial = false;
        break;
      }
      i += len;
    }
    if (initial) {
      span = sentence;
      const std::size_t cap = std::max<std::size_t>(config.max_unit_sentences, 1);
      for (std::size_t next = si + 1; next < index.sentences.size() && next - si < cap; ++next) {
        const ByteSpan& ns = index.sentences[next];
        if (paragraph_break_between(t, span.end, ns.start) || !begins_continuation(t, ns)) break;
        span.end = ns.end;
      }
    } else {
      span = {match.byte_start, std::max(sentence.end, match.byte_end)};
    }
  }
  return {span, std::string(t.substr(span.start, span.size()))};
}

DocumentIndex build_index(std::string_view t) {
  return {segment_sentences(t), match_parentheses(t)};
}

}  // namespace

std::string_view source_name(Source s) {
  switch (s) {
    case Source::kEli5: return "eli5";
    case Source::kNq: return "nq";
    case Source::kBooks3: return "books3";
    case Source::kOther: break;
  }
  return "other";
}

Source parse_source(std::string_view name) {
  if (text::iequals(name, "eli5")) return Source::kEli5;
  if (text::iequals(name, "nq")) return Source::kNq;
  if (text::iequals(name, "books3")) return Source::kBooks3;
  return Source::kOther;
}

std::string_view marker_name(Marker m) { return m == Marker::kEg ? "eg" : "for_example"; }

std::optional<Marker> parse_marker(std::string_view name) {
  if (name == "for_example") return Marker::kForExample;
  if (name == "eg") return Marker::kEg;
  return std::nullopt;
}

std::vector<std::string> MinerConfig::default_filter_patterns() {
  return {R"([Ff]igure\s+\d)", R"([Tt]able\s+\d)", R"([Ss]ee\s+(above|below))"};
}

void MinerConfig::validate() const {
  if (context_budget == 0) throw std::invalid_argument("context_budget must be > 0");
  if (min_unit_tokens == 0) throw std::invalid_argument("min_unit_tokens must be >= 1");
  if (max_unit_sentences == 0) throw std::invalid_argument("max_unit_sentences must be >= 1");
  if (!use_for_example && !use_eg) throw std::invalid_argument("at least one marker required");
}

std::string_view filter_reason_name(FilterReason r) {
  switch (r) {
    case FilterReason::kTooShort: return "too_short";
    case FilterReason::kMarkerOnly: return "marker_only";
    case FilterReason::kPattern: return "pattern";
  }
  return "unknown";
}

MiningReport& MiningReport::operator+=(const MiningReport& o) {
  documents += o.documents;
  empty_documents += o.empty_documents;
  io_errors += o.io_errors;
  markers_for_example += o.markers_for_example;
  markers_eg += o.markers_eg;
  malformed += o.malformed;
  overlapping += o.overlapping;
  extracted += o.extracted;
  filtered_too_short += o.filtered_too_short;
  filtered_marker_only += o.filtered_marker_only;
  filtered_pattern += o.filtered_pattern;
  kept += o.kept;
  return *this;
}

std::vector<ByteSpan> segment_sentences(std::string_view t) {
  std::vector<std::size_t> cuts;
  const std::size_t n = t.size();
  std::size_t i = 0;
  while (i < n) {
    const char c = t[i];
    if (c == '\n') {
      std::size_t j = i + 1;
      while (j < n && (t[j] == ' ' || t[j] == '\t' || t[j] == '\r')) ++j;
      if (j < n && t[j] == '\n') {
        cuts.push_back(i);
        i = j;
        continue;
      }
      ++i;
      continue;
    }
    if (!is_terminal(c)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && is_terminal(t[j])) ++j;
    const bool single_period = c == '.' && j == i + 1;
    while (j < n) {
      const std::size_t len = closer_length(t, j);
      if (len == 0) break;
      j += len;
    }
    if (j >= n) break;
    if (!text::is_space(t[j])) {
      i = j;
      continue;
    }
    std::size_t k = j;
    while (k < n && text::is_space(t[k])) ++k;
    if (k >= n) break;
    std::size_t len = 1;
    const char32_t next = text::decode_utf8(t, k, &len);
    if (!text::is_upper_code_point(next) && !is_opening_code_point(next)) {
      i = j;
      continue;
    }
    if (single_period && is_abbreviation(t, i)) {
      i = j;
      continue;
    }
    cuts.push_back(j);
    i = k;
  }
  cuts.push_back(n);

  std::vector<ByteSpan> spans;
  std::size_t prev = 0;
  for (std::size_t cut : cuts) {
    const std::string_view piece = t.substr(prev, cut - prev);
    const std::string_view trimmed = text::trim(piece);
    if (!trimmed.empty()) {
      const std::size_t start = prev + static_cast<std::size_t>(trimmed.data() - piece.data());
      spans.push_back({start, start + trimmed.size()});
    }
    prev = cut;
  }
  return spans;
}

std::vector<MarkerMatch> find_markers(std::string_view t, const MinerConfig& config) {
  return find_markers(t, config, segment_sentences(t));
}

std::vector<MarkerMatch> find_markers(std::string_view t, const MinerConfig& config,
                                      const std::vector<ByteSpan>& sentences) {
  std::vector<MarkerMatch> out;
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char c = t[i];
    if (config.use_for_example && (c == 'f' || c == 'F') && word_boundary_before(t, i) &&
        lower_ascii_equals(t, i, "for")) {
      std::size_t j = i + 3;
      const std::size_t ws = j;
      while (j < n && text::is_space(t[j])) ++j;
      if (j > ws && lower_ascii_equals(t, j, "example") && word_boundary_after(t, j + 7)) {
        out.push_back({Marker::kForExample, i, j + 7, false, 0});
        i = j + 6;
        continue;
      }
    }
    if (config.use_eg && (c == 'e' || c == 'E') && word_boundary_before(t, i) && i + 2 < n &&
        t[i + 1] == '.') {
      std::size_t j = i + 2;
      if (j < n && t[j] == ' ') ++j;
      if (j < n && (t[j] == 'g' || t[j] == 'G')) {
        ++j;
        if (j < n && t[j] == '.') {
          out.push_back({Marker::kEg, i, j + 1, false, 0});
          i = j;
        } else if (word_boundary_after(t, j)) {
          out.push_back({Marker::kEg, i, j, false, 0});
          i = j - 1;
        }
      }
    }
  }
  if (out.empty()) return out;
  const auto parens = match_parentheses(t);
  for (auto& m : out) {
    m.sentence_index = sentence_of(sentences, m.byte_start);
    const ByteSpan sentence = sentences.empty() ? ByteSpan{0, n} : sentences[m.sentence_index];
    m.parenthetical = enclosing_paren(parens, m.byte_start, sentence) != nullptr;
  }
  return out;
}

std::pair<ByteSpan, std::string> extract_unit(const Document& doc, const MarkerMatch& match,
                                              const MinerConfig& config) {
  return extract_with_index(doc.text, match, config, build_index(doc.text));
}

std::pair<ByteSpan, std::string> extract_unit(const Document& doc, const MarkerMatch& match,
                                              const MinerConfig& config,
                                              const std::vector<ByteSpan>& sentences) {
  return extract_with_index(doc.text, match, config, {sentences, match_parentheses(doc.text)});
}

std::pair<std::string, std::string> window_context(const Document& doc, ByteSpan unit_span,
                                                   std::size_t context_budget) {
  const std::string_view t = doc.text;
  const std::string_view before = t.substr(0, unit_span.start);
  const std::string_view after = t.substr(unit_span.end);

  std::string left;
  const auto lt = text::whitespace_tokens(before);
  if (!lt.empty() && context_budget > 0) {
    const std::size_t first = lt.size() > context_budget ? lt.size() - context_budget : 0;
    left.assign(before.substr(lt[first].start, lt.back().end - lt[first].start));
  }
  std::string right;
  const auto rt = text::whitespace_tokens(after);
  if (!rt.empty() && context_budget > 0) {
    const std::size_t last = std::min(rt.size(), context_budget) - 1;
    right.assign(after.substr(rt.front().start, rt[last].end - rt.front().start));
  }
  return {std::move(left), std::move(right)};
}

Miner::Miner(MinerConfig config) : config_(std::move(config)) {
  config_.validate();
  filters_.reserve(config_.filter_patterns.size());
  for (const auto& p : config_.filter_patterns) filters_.emplace_back(p, std::regex::ECMAScript);
}

std::optional<FilterReason> Miner::filter_reason(const ExemplificationInstance& inst) const {
  if (text::count_word_runs(inst.unit) < config_.min_unit_tokens) return FilterReason::kTooShort;

  std::string rest = inst.unit;
  if (!inst.marker_text.empty()) {
    for (std::size_t i = 0; i + inst.marker_text.size() <= rest.size(); ++i) {
      if (text::iequals(std::string_view(rest).substr(i, inst.marker_text.size()), inst.marker_text)) {
        rest.erase(i, inst.marker_text.size());
        break;
      }
    }
  }
  if (text::count_word_runs(rest) == 0) return FilterReason::kMarkerOnly;

  for (const auto& re : filters_) {
    if (std::regex_search(inst.unit, re)) return FilterReason::kPattern;
  }
  return std::nullopt;
}

std::vector<ExemplificationInstance> Miner::mine(const Document& doc, MiningReport* report) const {
  MiningReport local;
  local.documents = 1;
  std::vector<ExemplificationInstance> out;
  if (text::trim(doc.text).empty()) {
    local.empty_documents = 1;
    if (report) *report += local;
    return out;
  }

  const DocumentIndex index = build_index(doc.text);
  const auto matches = find_markers(doc.text, config_, index.sentences);

  struct Candidate {
    ByteSpan span;
    std::string unit;
    const MarkerMatch* match;
  };
  std::vector<Candidate> candidates;
  for (const auto& m : matches) {
    (m.marker == Marker::kEg ? local.markers_eg : local.markers_for_example)++;
    try {
      auto [span, unit] = extract_with_index(doc.text, m, config_, index);
      candidates.push_back({span, std::move(unit), &m});
    } catch (const MalformedSpan&) {
      ++local.malformed;
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.span.start != b.span.start) return a.span.start < b.span.start;
    return a.span.end > b.span.end;
  });

  std::size_t covered_to = 0;
  bool any = false;
  std::size_t ordinal = 0;
  for (auto& c : candidates) {
    if (any && c.span.start < covered_to) {
      ++local.overlapping;
      continue;
    }
    any = true;
    covered_to = c.span.end;
    ++local.extracted;

    ExemplificationInstance inst;
    inst.doc_id = doc.doc_id;
    inst.source = doc.source;
    inst.question = doc.question;
    inst.marker_text = doc.text.substr(c.match->byte_start, c.match->byte_end - c.match->byte_start);
    inst.unit = std::move(c.unit);
    inst.unit_byte_span = c.span;
    auto [left, right] = window_context(doc, c.span, config_.context_budget);
    inst.left_context = std::move(left);
    inst.right_context = std::move(right);

    if (auto reason = filter_reason(inst)) {
      switch (*reason) {
        case FilterReason::kTooShort: ++local.filtered_too_short; break;
        case FilterReason::kMarkerOnly: ++local.filtered_marker_only; break;
        case FilterReason::kPattern: ++local.filtered_pattern; break;
      }
      continue;
    }
    inst.instance_id = doc.doc_id + "#" + std::to_string(ordinal++);
    out.push_back(std::move(inst));
  }
  local.kept = out.size();
  if (report) *report += local;
  return out;
}

bool filter_instance(const ExemplificationInstance& inst, const MinerConfig& config) {
  return Miner(config).keep(inst);
}

std::vector<ExemplificationInstance> mine_document(const Document& doc, const MinerConfig& config,
                                                   MiningReport* report) {
  return Miner(config).mine(doc, report);
}

CorpusMiner::CorpusMiner(MinerConfig config, std::size_t threads)
    : miner_(std::move(config)), threads_(threads) {}

void CorpusMiner::add_batch(const std::vector<Document>& docs) {
  std::vector<std::vector<ExemplificationInstance>> results(docs.size());
  std::vector<MiningReport> reports(docs.size());
  parallel_for(docs.size(), threads_,
               [&](std::size_t i) { results[i] = miner_.mine(docs[i], &reports[i]); });
  for (std::size_t i = 0; i < docs.size(); ++i) {
    report_ += reports[i];
    per_doc_.emplace_back(docs[i].doc_id, std::move(results[i]));
  }
}

MiningOutput CorpusMiner::finish() && {
  std::stable_sort(per_doc_.begin(), per_doc_.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < per_doc_.size(); ++i) {
    if (per_doc_[i].first == per_doc_[i - 1].first) {
      throw DuplicateId("document id '" + per_doc_[i].first + "' appears more than once");
    }
  }
  MiningOutput out;
  out.report = report_;
  for (auto& [id, insts] : per_doc_) {
    for (auto& inst : insts) out.instances.push_back(std::move(inst));
  }
  per_doc_.clear();
  return out;
}

MiningOutput mine_corpus(const std::vector<Document>& docs, const MinerConfig& config,
                         std::size_t threads) {
  CorpusMiner miner(config, threads);
  miner.add_batch(docs);
  return std::move(miner).finish();
}

}  // namespace exemplar::mining
