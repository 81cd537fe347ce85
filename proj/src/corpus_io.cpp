#include "exemplar/corpus_io.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "exemplar/errors.hpp"

namespace exemplar::io {

namespace fs = std::filesystem;
using mining::Document;
using mining::ExemplificationInstance;

DocumentFormat parse_document_format(const std::string& name) {
  if (name == "text") return DocumentFormat::kText;
  if (name == "jsonl") return DocumentFormat::kJsonl;
  if (name == "kilt-eli5") return DocumentFormat::kKiltEli5;
  throw std::invalid_argument("unknown document format '" + name + "'");
}

struct DocumentReader::State {
  // text
  std::vector<std::string> paths;
  std::size_t next_path = 0;
  // jsonl / kilt
  std::unique_ptr<InputFile> input;
  std::string origin;
  std::size_t line_no = 0;
  bool done = false;
};

DocumentReader::DocumentReader(const std::string& path, DocumentFormat format,
                               mining::Source text_source)
    : state_(std::make_unique<State>()), format_(format), text_source_(text_source) {
  if (format == DocumentFormat::kText) {
    std::error_code ec;
    if (path != "-" && fs::is_directory(path, ec)) {
      for (const auto& entry : fs::directory_iterator(path, ec)) {
        if (entry.is_regular_file(ec)) state_->paths.push_back(entry.path().string());
      }
      if (ec) throw IoError("cannot list directory '" + path + "': " + ec.message());
      std::sort(state_->paths.begin(), state_->paths.end());
    } else {
      if (path != "-" && !fs::exists(path, ec)) throw IoError("cannot open '" + path + "'");
      state_->paths.push_back(path);
    }
    return;
  }
  state_->input = std::make_unique<InputFile>(path);
  state_->origin = path;
  files_.push_back(path);
}

DocumentReader::~DocumentReader() = default;

namespace {

std::string read_all(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Document document_from_json(const Json& j, const std::string& origin, std::size_t line) {
  FieldReader f{j, origin, line};
  Document d;
  d.doc_id = f.string("doc_id");
  d.text = f.string("text");
  if (auto src = f.optional_string("source")) d.source = mining::parse_source(*src);
  d.question = f.optional_string("question");
  return d;
}

void documents_from_kilt(const Json& j, const std::string& origin, std::size_t line,
                         std::vector<Document>& out) {
  FieldReader f{j, origin, line};
  const std::string id = f.string("id");
  const std::optional<std::string> question = f.optional_string("input");
  const Json& outputs = f.require("output");
  if (!outputs.is_array()) f.fail("field \"output\" must be an array");
  std::size_t index = 0;
  for (const auto& o : outputs) {
    if (!o.is_object()) continue;
    auto it = o.find("answer");
    if (it == o.end() || !it->is_string()) continue;
    std::string answer = it->get<std::string>();
    const std::size_t this_index = index++;
    if (text::trim(answer).empty()) continue;
    Document d;
    d.doc_id = id + "_" + std::to_string(this_index);
    d.source = mining::Source::kEli5;
    d.question = question;
    d.text = std::move(answer);
    out.push_back(std::move(d));
  }
}

}  // namespace

bool DocumentReader::next_batch(std::vector<Document>& out, std::size_t max_docs) {
  State& s = *state_;
  const std::size_t target = out.size() + std::max<std::size_t>(max_docs, 1);
  if (format_ == DocumentFormat::kText) {
    while (out.size() < target && s.next_path < s.paths.size()) {
      const std::string& p = s.paths[s.next_path++];
      Document d;
      d.source = text_source_;
      try {
        InputFile in(p);
        d.text = read_all(in.stream());
        if (in.stream().bad()) throw IoError("read failed for '" + p + "'");
      } catch (const IoError& e) {
        if (s.paths.size() == 1) throw;
        std::cerr << "warning: " << e.what() << "\n";
        ++io_errors_;
        continue;
      }
      d.doc_id = p == "-" ? "stdin" : fs::path(p).stem().string();
      files_.push_back(p);
      out.push_back(std::move(d));
    }
    return s.next_path < s.paths.size();
  }

  if (s.done) return false;
  std::string line;
  std::istream& in = s.input->stream();
  while (out.size() < target) {
    if (!std::getline(in, line)) {
      if (in.bad()) throw IoError("read failed for '" + s.origin + "'");
      s.done = true;
      return false;
    }
    ++s.line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw SchemaError(s.origin + ":" + std::to_string(s.line_no) + ": invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object()) {
      throw SchemaError(s.origin + ":" + std::to_string(s.line_no) + ": expected a JSON object");
    }
    if (format_ == DocumentFormat::kJsonl) {
      out.push_back(document_from_json(j, s.origin, s.line_no));
    } else {
      documents_from_kilt(j, s.origin, s.line_no, out);
    }
  }
  return true;
}

std::vector<Document> read_documents(const std::string& path, DocumentFormat format) {
  DocumentReader reader(path, format);
  std::vector<Document> docs;
  while (reader.next_batch(docs, 4096)) {
  }
  return docs;
}

namespace {

Json labels_to_json(const mining::AnnotationLabels& l) {
  Json j = Json::object();
  j["valid"] = l.valid;
  if (l.example_type) {
    j["example_type"] = *l.example_type == mining::ExampleType::kReal ? "real" : "hypothetical";
  } else {
    j["example_type"] = nullptr;
  }
  j["personal"] = l.personal ? Json(*l.personal) : Json(nullptr);
  j["anchor_text"] = l.anchor_text ? Json(*l.anchor_text) : Json(nullptr);
  j["example_text"] = l.example_text ? Json(*l.example_text) : Json(nullptr);
  return j;
}

mining::AnnotationLabels labels_from_json(const Json& j, const FieldReader& parent) {
  if (!j.is_object()) parent.fail("field \"labels\" must be an object or null");
  FieldReader f{j, parent.origin, parent.line};
  mining::AnnotationLabels l;
  const Json& valid = f.require("valid");
  if (!valid.is_boolean()) f.fail("labels.valid must be a boolean");
  l.valid = valid.get<bool>();
  if (auto t = f.optional_string("example_type")) {
    if (*t == "real") {
      l.example_type = mining::ExampleType::kReal;
    } else if (*t == "hypothetical") {
      l.example_type = mining::ExampleType::kHypothetical;
    } else {
      f.fail("labels.example_type must be \"real\" or \"hypothetical\"");
    }
  }
  if (auto it = j.find("personal"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) f.fail("labels.personal must be a boolean or null");
    l.personal = it->get<bool>();
  }
  if (!l.valid && (l.example_type || l.personal)) {
    f.fail("labels.example_type/personal are only allowed when valid is true");
  }
  l.anchor_text = f.optional_string("anchor_text");
  l.example_text = f.optional_string("example_text");
  return l;
}

}  // namespace

Json instance_to_json(const ExemplificationInstance& inst) {
  Json j = Json::object();
  j["instance_id"] = inst.instance_id;
  j["doc_id"] = inst.doc_id;
  j["source"] = mining::source_name(inst.source);
  j["question"] = inst.question ? Json(*inst.question) : Json(nullptr);
  j["left_context"] = inst.left_context;
  j["marker_text"] = inst.marker_text;
  j["unit"] = inst.unit;
  j["right_context"] = inst.right_context;
  j["unit_byte_span"] = Json::array({inst.unit_byte_span.start, inst.unit_byte_span.end});
  j["labels"] = inst.labels ? labels_to_json(*inst.labels) : Json(nullptr);
  return j;
}

ExemplificationInstance instance_from_json(const Json& j, const std::string& origin,
                                           std::size_t line) {
  FieldReader f{j, origin, line};
  ExemplificationInstance inst;
  inst.instance_id = f.string("instance_id");
  inst.doc_id = f.string("doc_id");
  const std::string source = f.string("source");
  inst.source = mining::parse_source(source);
  if (!text::iequals(mining::source_name(inst.source), source)) {
    f.fail("unknown source '" + source + "'");
  }
  inst.question = f.optional_string("question");
  inst.left_context = f.string("left_context");
  inst.marker_text = f.string("marker_text");
  inst.unit = f.string("unit");
  inst.right_context = f.string("right_context");
  const Json& span = f.require("unit_byte_span");
  if (!span.is_array() || span.size() != 2 || !span[0].is_number_unsigned() ||
      !span[1].is_number_unsigned()) {
    f.fail("field \"unit_byte_span\" must be [start, end]");
  }
  inst.unit_byte_span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
  if (inst.unit_byte_span.start > inst.unit_byte_span.end) f.fail("unit_byte_span start > end");
  if (inst.unit.empty()) f.fail("field \"unit\" must be non-empty");
  const Json& labels = f.require("labels");
  if (!labels.is_null()) inst.labels = labels_from_json(labels, f);
  return inst;
}

void write_instances(std::ostream& out, const std::vector<ExemplificationInstance>& xs) {
  for (const auto& x : xs) out << dump_line(instance_to_json(x)) << '\n';
}

void write_instances(const std::string& path, const std::vector<ExemplificationInstance>& xs) {
  OutputFile out(path);
  write_instances(out.stream(), xs);
  out.commit();
}

std::vector<ExemplificationInstance> read_instances(std::istream& in, const std::string& origin) {
  std::vector<ExemplificationInstance> xs;
  for_each_jsonl(in, origin, [&](const Json& j, std::size_t line) {
    xs.push_back(instance_from_json(j, origin, line));
  });
  return xs;
}

std::vector<ExemplificationInstance> read_instances(const std::string& path) {
  InputFile in(path);
  return read_instances(in.stream(), path);
}

Json report_to_json(const mining::MiningReport& r) {
  Json j = Json::object();
  j["documents"] = r.documents;
  j["empty_documents"] = r.empty_documents;
  j["io_errors"] = r.io_errors;
  j["markers"] = {{"for_example", r.markers_for_example}, {"eg", r.markers_eg}};
  j["malformed"] = r.malformed;
  j["overlapping"] = r.overlapping;
  j["extracted"] = r.extracted;
  j["filtered"] = {{"total", r.filtered()},
                   {"too_short", r.filtered_too_short},
                   {"marker_only", r.filtered_marker_only},
                   {"pattern", r.filtered_pattern}};
  j["kept"] = r.kept;
  return j;
}

}  // namespace exemplar::io
