#pragma once

#include <cstddef>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "exemplar/text.hpp"

namespace exemplar::mining {

using text::ByteSpan;

enum class Source { kEli5, kNq, kBooks3, kOther };

std::string_view source_name(Source s);
// Unknown names map to kOther.
Source parse_source(std::string_view name);

struct Document {
  std::string doc_id;
  Source source = Source::kOther;
  std::optional<std::string> question;
  std::string text;
};

enum class Marker { kForExample, kEg };

std::string_view marker_name(Marker m);  // "for_example" / "eg"
std::optional<Marker> parse_marker(std::string_view name);

struct MarkerMatch {
  Marker marker = Marker::kForExample;
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;
  bool parenthetical = false;
  std::size_t sentence_index = 0;
};

enum class ExampleType { kReal, kHypothetical };

struct AnnotationLabels {
  bool valid = false;
  // Present only when valid.
  std::optional<ExampleType> example_type;
  std::optional<bool> personal;
  std::optional<std::string> anchor_text;
  std::optional<std::string> example_text;

  bool operator==(const AnnotationLabels&) const = default;
};

struct ExemplificationInstance {
  std::string instance_id;
  std::string doc_id;
  Source source = Source::kOther;
  std::optional<std::string> question;
  std::string left_context;
  std::string marker_text;
  std::string unit;
  std::string right_context;
  ByteSpan unit_byte_span;
  std::optional<AnnotationLabels> labels;

  bool operator==(const ExemplificationInstance&) const = default;
};

struct MinerConfig {
  std::size_t context_budget = 256;
  bool use_for_example = true;
  bool use_eg = true;
  std::size_t min_unit_tokens = 3;
  std::size_t max_unit_sentences = 3;
  std::vector<std::string> filter_patterns = default_filter_patterns();

  static std::vector<std::string> default_filter_patterns();
  // Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

enum class FilterReason { kTooShort, kMarkerOnly, kPattern };
std::string_view filter_reason_name(FilterReason r);

struct MiningReport {
  std::size_t documents = 0;
  std::size_t empty_documents = 0;
  std::size_t io_errors = 0;
  std::size_t markers_for_example = 0;
  std::size_t markers_eg = 0;
  std::size_t malformed = 0;
  std::size_t overlapping = 0;  // units dropped because an earlier unit covers them
  std::size_t extracted = 0;    // candidate units after overlap removal
  std::size_t filtered_too_short = 0;
  std::size_t filtered_marker_only = 0;
  std::size_t filtered_pattern = 0;
  std::size_t kept = 0;

  std::size_t filtered() const { return filtered_too_short + filtered_marker_only + filtered_pattern; }
  MiningReport& operator+=(const MiningReport& o);
  bool operator==(const MiningReport&) const = default;
};

// Sentence spans (trimmed byte ranges). A sentence ends after '.', '!' or '?'
// (plus closing quotes/brackets) when followed by whitespace and an uppercase
// or opening character, unless the period closes a known abbreviation. A
// blank line also ends a sentence.
std::vector<ByteSpan> segment_sentences(std::string_view text);

std::vector<MarkerMatch> find_markers(std::string_view text, const MinerConfig& config);

// Variant that reuses a precomputed sentence segmentation of `text`.
std::vector<MarkerMatch> find_markers(std::string_view text, const MinerConfig& config,
                                      const std::vector<ByteSpan>& sentences);

// Throws MalformedSpan when the enclosing parenthesis never closes.
std::pair<ByteSpan, std::string> extract_unit(const Document& doc, const MarkerMatch& match,
                                              const MinerConfig& config = {});
std::pair<ByteSpan, std::string> extract_unit(const Document& doc, const MarkerMatch& match,
                                              const MinerConfig& config,
                                              const std::vector<ByteSpan>& sentences);

std::pair<std::string, std::string> window_context(const Document& doc, ByteSpan unit_span,
                                                   std::size_t context_budget = 256);

// Precompiled miner. Safe for concurrent use on distinct documents.
class Miner {
 public:
  explicit Miner(MinerConfig config);

  const MinerConfig& config() const { return config_; }

  std::optional<FilterReason> filter_reason(const ExemplificationInstance& inst) const;
  bool keep(const ExemplificationInstance& inst) const { return !filter_reason(inst); }

  std::vector<ExemplificationInstance> mine(const Document& doc, MiningReport* report = nullptr) const;

 private:
  MinerConfig config_;
  std::vector<std::regex> filters_;
};

bool filter_instance(const ExemplificationInstance& inst, const MinerConfig& config);

std::vector<ExemplificationInstance> mine_document(const Document& doc, const MinerConfig& config,
                                                   MiningReport* report = nullptr);

struct MiningOutput {
  std::vector<ExemplificationInstance> instances;
  MiningReport report;
};

// Mines every document (in parallel up to `threads` workers, 0 = default) and
// returns instances ordered by (doc_id, ordinal). Throws DuplicateId when two
// documents share an id.
MiningOutput mine_corpus(const std::vector<Document>& docs, const MinerConfig& config,
                         std::size_t threads = 0);

// Incremental form of mine_corpus for streamed input.
class CorpusMiner {
 public:
  explicit CorpusMiner(MinerConfig config, std::size_t threads = 0);

  void add_batch(const std::vector<Document>& docs);
  void add_io_error() { ++report_.io_errors; }
  MiningOutput finish() &&;

 private:
  Miner miner_;
  std::size_t threads_;
  std::vector<std::pair<std::string, std::vector<ExemplificationInstance>>> per_doc_;
  MiningReport report_;
};

}  // namespace exemplar::mining
