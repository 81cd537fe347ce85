#include <doctest.h>

#include <fstream>
#include <sstream>

#include "exemplar/corpus_io.hpp"
#include "exemplar/errors.hpp"
#include "exemplar/mining.hpp"
#include "exemplar/text.hpp"

using namespace exemplar;
using namespace exemplar::mining;

namespace {

std::string data(const std::string& name) { return std::string(EXEMPLAR_TEST_DATA) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> sentences(std::string_view t) {
  std::vector<std::string> out;
  for (auto s : segment_sentences(t)) out.emplace_back(t.substr(s.start, s.size()));
  return out;
}

Document doc(std::string text, std::string id = "d") {
  Document d;
  d.doc_id = std::move(id);
  d.text = std::move(text);
  return d;
}

std::vector<std::string> units(const std::string& text, const MinerConfig& config = {}) {
  std::vector<std::string> out;
  for (const auto& i : mine_document(doc(text), config)) out.push_back(i.unit);
  return out;
}

}  // namespace

TEST_CASE("segmenter splits on terminal punctuation before a capital") {
  CHECK(sentences("One here. Two there! Three? Four.") ==
        std::vector<std::string>{"One here.", "Two there!", "Three?", "Four."});
  CHECK(sentences("no split. lower case follows") == std::vector<std::string>{"no split. lower case follows"});
  CHECK(sentences("Value 3.14 is pi. Next") == std::vector<std::string>{"Value 3.14 is pi.", "Next"});
}

TEST_CASE("segmenter keeps abbreviations inside the sentence") {
  CHECK(sentences("Ask Dr. Smith about it. Then go.") ==
        std::vector<std::string>{"Ask Dr. Smith about it.", "Then go."});
  CHECK(sentences("Fruit, e.g. Apples, are fine.").size() == 1);
  CHECK(sentences("Fruit, e. g. Apples, are fine.").size() == 1);
  CHECK(sentences("Cats vs. Dogs is old. New one.").size() == 2);
  CHECK(sentences("Smith et al. Found it.").size() == 1);
}

TEST_CASE("segmenter handles closers, openers and blank lines") {
  CHECK(sentences("He said \"stop.\" Then left.") ==
        std::vector<std::string>{"He said \"stop.\"", "Then left."});
  CHECK(sentences("It ended. (Mostly.) Fine.") ==
        std::vector<std::string>{"It ended.", "(Mostly.)", "Fine."});
  CHECK(sentences("first part\n\nsecond part") == std::vector<std::string>{"first part", "second part"});
  CHECK(sentences("first part\nsecond part") == std::vector<std::string>{"first part\nsecond part"});
  CHECK(sentences("A. For example, B. C.") == std::vector<std::string>{"A.", "For example, B.", "C."});
  CHECK(sentences("   ").empty());
}

TEST_CASE("segmenter spans are trimmed and ordered") {
  const std::string t = "  Alpha beta.   Gamma delta.  ";
  const auto spans = segment_sentences(t);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].start == 2);
  CHECK(t.substr(spans[1].start, spans[1].size()) == "Gamma delta.");
  CHECK(spans[0].end <= spans[1].start);
}

TEST_CASE("marker detection respects word boundaries and case") {
  MinerConfig c;
  CHECK(find_markers("For example this", c).size() == 1);
  CHECK(find_markers("FOR EXAMPLE this", c).size() == 1);
  CHECK(find_markers("for\texample", c).size() == 1);
  CHECK(find_markers("forexample", c).empty());
  CHECK(find_markers("for examples", c).empty());
  CHECK(find_markers("before example", c).empty());
  CHECK(find_markers("e.g. this", c).size() == 1);
  CHECK(find_markers("E.G. this", c).size() == 1);
  CHECK(find_markers("e. g. this", c).size() == 1);
  CHECK(find_markers("e.g this", c).size() == 1);
  CHECK(find_markers("the.g. this", c).empty());
  CHECK(find_markers("e.go home", c).empty());
  CHECK(find_markers("e.gg", c).empty());

  const auto m = find_markers("x (e.g., y) z", c);
  REQUIRE(m.size() == 1);
  CHECK(m[0].marker == Marker::kEg);
  CHECK(m[0].parenthetical);
  CHECK(m[0].byte_start == 3);
  CHECK(m[0].byte_end == 7);
}

TEST_CASE("marker selection follows the config") {
  MinerConfig c;
  c.use_eg = false;
  CHECK(find_markers("For example a, e.g. b", c).size() == 1);
  c.use_eg = true;
  c.use_for_example = false;
  const auto m = find_markers("For example a, e.g. b", c);
  REQUIRE(m.size() == 1);
  CHECK(m[0].marker == Marker::kEg);
}

TEST_CASE("unit extraction: sentence-initial, inline and parenthetical") {
  CHECK(units("Intro here. For example, cats sleep a lot. Dogs do not.") ==
        std::vector<std::string>{"For example, cats sleep a lot."});
  CHECK(units("Animals sleep, for example cats and dogs. Fish rest.") ==
        std::vector<std::string>{"for example cats and dogs."});
  CHECK(units("Some animals (for example, bats) sleep by day.") ==
        std::vector<std::string>{"(for example, bats)"});
  CHECK(units("\"For example, one more,\" she said. Fine.") ==
        std::vector<std::string>{"\"For example, one more,\" she said."});
}

TEST_CASE("sentence-initial units absorb continuation sentences up to the cap") {
  const std::string t = "For example, one thing happens. And another thing. (but lower too.) So a fourth. Stop.";
  CHECK(units(t) == std::vector<std::string>{"For example, one thing happens. And another thing. (but lower too.)"});
  MinerConfig c;
  c.max_unit_sentences = 1;
  CHECK(units(t, c) == std::vector<std::string>{"For example, one thing happens."});
  CHECK(units("For example, it rains. Because clouds form.") ==
        std::vector<std::string>{"For example, it rains."});
  CHECK(units("For example, it rains.\n\nAnd then it stops.") ==
        std::vector<std::string>{"For example, it rains."});
}

TEST_CASE("unclosed parenthesis raises MalformedSpan only within the sentence") {
  const Document d = doc("Parts (for example, the lid break.");
  const auto m = find_markers(d.text, MinerConfig{});
  REQUIRE(m.size() == 1);
  CHECK_THROWS_AS(extract_unit(d, m[0]), MalformedSpan);

  MiningReport report;
  CHECK(mine_document(d, MinerConfig{}, &report).empty());
  CHECK(report.malformed == 1);

  CHECK(units("Notes (draft. For example, this still counts fine.") ==
        std::vector<std::string>{"For example, this still counts fine."});
}

TEST_CASE("overlapping units keep the earliest, longest span") {
  MiningReport report;
  const auto xs = mine_document(doc("For example, birds (e.g., robins) fly south. Others stay."), MinerConfig{}, &report);
  REQUIRE(xs.size() == 1);
  CHECK(xs[0].marker_text == "For example");
  CHECK(report.overlapping == 1);
  CHECK(report.extracted == 1);
}

TEST_CASE("filters: too short, marker only, patterns") {
  MinerConfig c;
  Miner miner(c);
  ExemplificationInstance inst;
  inst.marker_text = "e.g.";

  inst.unit = "(e.g.)";
  CHECK(miner.filter_reason(inst) == FilterReason::kTooShort);
  inst.unit = "(e.g., emus)";
  CHECK_FALSE(miner.filter_reason(inst).has_value());
  inst.unit = "e.g. see below for more cases";
  CHECK(miner.filter_reason(inst) == FilterReason::kPattern);
  inst.unit = "e.g. Figure 2 has it";
  CHECK(miner.filter_reason(inst) == FilterReason::kPattern);
  inst.unit = "e.g. the table 4 rows";
  CHECK(miner.filter_reason(inst) == FilterReason::kPattern);
  inst.unit = "e.g. a figure of speech";
  CHECK_FALSE(miner.filter_reason(inst).has_value());

  MinerConfig loose;
  loose.min_unit_tokens = 1;
  Miner loose_miner(loose);
  inst.unit = "(e.g.)";
  CHECK(loose_miner.filter_reason(inst) == FilterReason::kMarkerOnly);
  inst.marker_text = "For example";
  inst.unit = "For example.";
  CHECK(loose_miner.filter_reason(inst) == FilterReason::kMarkerOnly);
  CHECK_FALSE(filter_instance(inst, loose));
}

TEST_CASE("instance ids are ordinals over kept instances") {
  const auto xs = mine_document(
      doc("For example, Figure 1 shows it. Later, e.g. cats and dogs play. More, for example birds sing.", "doc"),
      MinerConfig{});
  REQUIRE(xs.size() == 2);
  CHECK(xs[0].instance_id == "doc#0");
  CHECK(xs[1].instance_id == "doc#1");
  CHECK(xs[1].unit == "for example birds sing.");
}

TEST_CASE("context windows are raw substrings bounded by the token budget") {
  const Document d = doc("a b  c\nd UNIT x y\tz w");
  const std::size_t s = d.text.find("UNIT");
  const ByteSpan span{s, s + 4};
  auto [l, r] = window_context(d, span, 2);
  CHECK(l == "c\nd");
  CHECK(r == "x y");
  std::tie(l, r) = window_context(d, span, 256);
  CHECK(l == "a b  c\nd");
  CHECK(r == "x y\tz w");
  std::tie(l, r) = window_context(d, ByteSpan{0, 1}, 3);
  CHECK(l.empty());
}

TEST_CASE("empty documents are counted, not mined") {
  MiningReport report;
  CHECK(mine_document(doc("  \n "), MinerConfig{}, &report).empty());
  CHECK(report.empty_documents == 1);
  CHECK(report.documents == 1);
}

TEST_CASE("config validation") {
  MinerConfig c;
  c.context_budget = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.use_eg = c.use_for_example = false;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.max_unit_sentences = 0;
  CHECK_THROWS_AS(Miner{c}, std::invalid_argument);
}

TEST_CASE("mine_corpus orders by doc id and rejects duplicates") {
  std::vector<Document> docs = {doc("Zed, e.g. one two three.", "b"), doc("For example, alpha beta gamma.", "a")};
  const auto out = mine_corpus(docs, MinerConfig{}, 2);
  REQUIRE(out.instances.size() == 2);
  CHECK(out.instances[0].doc_id == "a");
  CHECK(out.report.documents == 2);
  docs.push_back(doc("again", "a"));
  CHECK_THROWS_AS(mine_corpus(docs, MinerConfig{}), DuplicateId);
}

TEST_CASE("mining is independent of the worker count") {
  const auto docs = io::read_documents(data("golden/corpus.jsonl"), io::DocumentFormat::kJsonl);
  const auto one = mine_corpus(docs, MinerConfig{}, 1);
  const auto four = mine_corpus(docs, MinerConfig{}, 4);
  CHECK(one.instances == four.instances);
  CHECK(one.report == four.report);
}

TEST_CASE("golden corpus mines to the golden file byte for byte") {
  const auto docs = io::read_documents(data("golden/corpus.jsonl"), io::DocumentFormat::kJsonl);
  REQUIRE(docs.size() == 30);
  const auto out = mine_corpus(docs, MinerConfig{});
  std::ostringstream ss;
  io::write_instances(ss, out.instances);
  CHECK(ss.str() == slurp(data("golden/instances.jsonl")));
  CHECK(io::report_to_json(out.report) == io::Json::parse(slurp(data("golden/report.json"))));
}

TEST_CASE("golden file agrees with the hand labels") {
  const auto golden = io::read_instances(data("golden/instances.jsonl"));
  std::vector<std::pair<std::string, std::string>> labels;
  std::ifstream in(data("golden/expected_units.jsonl"));
  for (std::string line; std::getline(in, line);) {
    const auto j = io::Json::parse(line);
    labels.emplace_back(j["instance_id"].get<std::string>(), j["unit"].get<std::string>());
  }
  REQUIRE(golden.size() == labels.size());
  for (std::size_t i = 0; i < golden.size(); ++i) {
    CHECK(golden[i].instance_id == labels[i].first);
    CHECK(golden[i].unit == labels[i].second);
  }
}

TEST_CASE("golden contexts match a whitespace-split oracle") {
  const auto docs = io::read_documents(data("golden/corpus.jsonl"), io::DocumentFormat::kJsonl);
  const auto golden = io::read_instances(data("golden/instances.jsonl"));
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    for (std::string w; ss >> w;) out.push_back(w);
    return out;
  };
  for (const auto& inst : golden) {
    auto it = std::find_if(docs.begin(), docs.end(), [&](const Document& d) { return d.doc_id == inst.doc_id; });
    REQUIRE(it != docs.end());
    const std::string& t = it->text;
    CHECK(t.substr(inst.unit_byte_span.start, inst.unit_byte_span.size()) == inst.unit);
    auto left = split(t.substr(0, inst.unit_byte_span.start));
    auto right = split(t.substr(inst.unit_byte_span.end));
    if (left.size() > 256) left.erase(left.begin(), left.end() - 256);
    if (right.size() > 256) right.resize(256);
    CHECK(split(inst.left_context) == left);
    CHECK(split(inst.right_context) == right);
  }
}

TEST_CASE("reference snippets mine to the quoted units") {
  std::ifstream in(data("reference_snippets.jsonl"));
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) {
    const auto j = io::Json::parse(line);
    Document d;
    d.doc_id = j["doc_id"].get<std::string>();
    d.text = j["text"].get<std::string>();
    const auto xs = mine_document(d, MinerConfig{});
    INFO(d.doc_id);
    REQUIRE(xs.size() == 1);
    CHECK(text::normalize_whitespace(xs[0].unit) ==
          text::normalize_whitespace(j["expected_unit"].get<std::string>()));
    if (j.contains("expected_left")) {
      CHECK(xs[0].left_context == j["expected_left"].get<std::string>());
      CHECK(xs[0].right_context == j["expected_right"].get<std::string>());
    }
    ++n;
  }
  CHECK(n == 6);
}
