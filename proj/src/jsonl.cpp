#include "exemplar/jsonl.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <unistd.h>

#include "exemplar/errors.hpp"
#include "exemplar/text.hpp"

namespace exemplar::io {

InputFile::InputFile(const std::string& path) : path_(path), in_(&std::cin) {
  if (path == "-") return;
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) throw IoError(path + ": is a directory");
  file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file_) throw IoError("cannot open '" + path + "' for reading");
  in_ = file_.get();
}

OutputFile::OutputFile(const std::string& path) : path_(path), out_(&std::cout) {
  if (path == "-") return;
  tmp_path_ = path + ".tmp." + std::to_string(::getpid());
  file_ = std::make_unique<std::ofstream>(tmp_path_, std::ios::binary | std::ios::trunc);
  if (!*file_) throw IoError("cannot open '" + path + "' for writing");
  out_ = file_.get();
}

OutputFile::~OutputFile() {
  if (file_ && !committed_) {
    file_->close();
    std::remove(tmp_path_.c_str());
  }
}

void OutputFile::commit() {
  if (!file_) {
    std::cout.flush();
    committed_ = true;
    return;
  }
  file_->flush();
  if (!*file_) throw IoError("write failed for '" + path_ + "'");
  file_->close();
  std::error_code ec;
  std::filesystem::rename(tmp_path_, path_, ec);
  if (ec) {
    std::remove(tmp_path_.c_str());
    throw IoError("cannot move output into '" + path_ + "': " + ec.message());
  }
  committed_ = true;
}

void for_each_jsonl(std::istream& in, const std::string& origin,
                    const std::function<void(const Json&, std::size_t)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw SchemaError(origin + ":" + std::to_string(line_no) + ": invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object()) {
      throw SchemaError(origin + ":" + std::to_string(line_no) + ": expected a JSON object");
    }
    fn(j, line_no);
  }
  if (in.bad()) throw IoError("read failed for '" + origin + "'");
}

std::string dump_line(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

void FieldReader::fail(const std::string& what) const {
  throw SchemaError(origin + ":" + std::to_string(line) + ": " + what);
}

const Json& FieldReader::require(const char* key) const {
  auto it = object.find(key);
  if (it == object.end()) fail(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string FieldReader::string(const char* key) const {
  const Json& v = require(key);
  if (!v.is_string()) fail(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

std::optional<std::string> FieldReader::optional_string(const char* key) const {
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) fail(std::string("field \"") + key + "\" must be a string or null");
  return it->get<std::string>();
}

}  // namespace exemplar::io
