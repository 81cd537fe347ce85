#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exemplar/jsonl.hpp"

namespace exemplar {

inline constexpr const char* kVersion = "0.1.0";

// Hex SHA-256 of a file's contents. Throws IoError.
std::string sha256_file(const std::string& path);
std::string sha256_hex(std::string_view data);

// Provenance record written next to every command's output. Inputs read from
// stdin carry a null hash.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set_config(io::Json config) { config_ = std::move(config); }
  void add_input(const std::string& path);
  void add_output(const std::string& path);
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  io::Json to_json() const;
  // <primary_out>.manifest.json, or stderr when the primary output is stdout.
  void write(const std::string& primary_out, const std::string& override_path = "") const;

 private:
  std::string command_;
  io::Json config_ = io::Json::object();
  std::vector<std::pair<std::string, std::optional<std::string>>> inputs_;
  std::vector<std::string> outputs_;
  std::optional<std::uint64_t> seed_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace exemplar
