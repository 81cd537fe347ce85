#pragma once

#include <cstddef>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

namespace exemplar::io {

using Json = nlohmann::ordered_json;

// Input stream over a file path, or stdin when path is "-". Throws IoError.
class InputFile {
 public:
  explicit InputFile(const std::string& path);
  std::istream& stream() { return *in_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unique_ptr<std::ifstream> file_;
  std::istream* in_;
};

// Output written to a temporary sibling and renamed into place on commit();
// discarded if never committed. "-" writes straight to stdout.
class OutputFile {
 public:
  explicit OutputFile(const std::string& path);
  ~OutputFile();
  OutputFile(const OutputFile&) = delete;
  OutputFile& operator=(const OutputFile&) = delete;

  std::ostream& stream() { return *out_; }
  void commit();

 private:
  std::string path_;
  std::string tmp_path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
  bool committed_ = false;
};

// Calls fn(object, 1-based line number) for each non-blank line. Lines that
// fail to parse raise SchemaError naming the line.
void for_each_jsonl(std::istream& in, const std::string& origin,
                    const std::function<void(const Json&, std::size_t)>& fn);

std::string dump_line(const Json& j);

// Typed field access raising SchemaError("<origin>:<line>: ...").
struct FieldReader {
  const Json& object;
  const std::string& origin;
  std::size_t line;

  [[noreturn]] void fail(const std::string& what) const;
  const Json& require(const char* key) const;
  std::string string(const char* key) const;
  std::optional<std::string> optional_string(const char* key) const;
};

}  // namespace exemplar::io
