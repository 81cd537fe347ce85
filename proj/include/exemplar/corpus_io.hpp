#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "exemplar/jsonl.hpp"
#include "exemplar/mining.hpp"

namespace exemplar::io {

enum class DocumentFormat { kText, kJsonl, kKiltEli5 };

// Accepts "text", "jsonl", "kilt-eli5".
DocumentFormat parse_document_format(const std::string& name);

// Streams documents in batches.
//   text:      a file is one document (doc_id = file stem); a directory yields
//              one document per regular file, in name order; "-" reads stdin.
//   jsonl:     {"doc_id","source","question","text"} per line.
//   kilt-eli5: KILT ELI5 records; each non-empty answer in "output" becomes
//              a document "<id>_<answer index>" with question = "input".
class DocumentReader {
 public:
  DocumentReader(const std::string& path, DocumentFormat format,
                 mining::Source text_source = mining::Source::kOther);
  ~DocumentReader();
  DocumentReader(const DocumentReader&) = delete;
  DocumentReader& operator=(const DocumentReader&) = delete;

  // Appends up to `max_docs` documents; returns false once exhausted.
  bool next_batch(std::vector<mining::Document>& out, std::size_t max_docs);
  // Files that could not be read (text directories only).
  std::size_t io_errors() const { return io_errors_; }
  // Every file path actually consumed.
  const std::vector<std::string>& files() const { return files_; }

 private:
  struct State;
  std::unique_ptr<State> state_;
  DocumentFormat format_;
  mining::Source text_source_;
  std::size_t io_errors_ = 0;
  std::vector<std::string> files_;
};

std::vector<mining::Document> read_documents(const std::string& path, DocumentFormat format);

Json instance_to_json(const mining::ExemplificationInstance& inst);
mining::ExemplificationInstance instance_from_json(const Json& j, const std::string& origin,
                                                   std::size_t line);

void write_instances(std::ostream& out, const std::vector<mining::ExemplificationInstance>& xs);
void write_instances(const std::string& path, const std::vector<mining::ExemplificationInstance>& xs);
std::vector<mining::ExemplificationInstance> read_instances(std::istream& in,
                                                            const std::string& origin = "<stream>");
std::vector<mining::ExemplificationInstance> read_instances(const std::string& path);

Json report_to_json(const mining::MiningReport& r);

}  // namespace exemplar::io
