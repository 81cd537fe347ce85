#include "exemplar/manifest.hpp"

#include <array>
#include <fstream>
#include <iostream>
#include <memory>

#include <openssl/evp.h>

#include "exemplar/errors.hpp"

namespace exemplar {

namespace {

struct Digest {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

  Digest() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("sha256 init failed");
    }
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx.get(), data, n); }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    static const char* kHex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kHex[md[i] >> 4]);
      out.push_back(kHex[md[i] & 15]);
    }
    return out;
  }
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Digest d;
  d.update(data.data(), data.size());
  return d.hex();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for hashing");
  Digest d;
  std::array<char, 1 << 16> buf;
  while (in.read(buf.data(), buf.size()) || in.gcount() > 0) {
    d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw IoError("read failed for '" + path + "'");
  return d.hex();
}

RunManifest::RunManifest(std::string command)
    : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_input(const std::string& path) {
  if (path == "-") {
    inputs_.emplace_back(path, std::nullopt);
  } else {
    inputs_.emplace_back(path, sha256_file(path));
  }
}

void RunManifest::add_output(const std::string& path) { outputs_.push_back(path); }

io::Json RunManifest::to_json() const {
  io::Json j = io::Json::object();
  j["command"] = command_;
  j["config"] = config_;
  io::Json inputs = io::Json::array();
  for (const auto& [path, hash] : inputs_) {
    inputs.push_back({{"path", path}, {"sha256", hash ? io::Json(*hash) : io::Json(nullptr)}});
  }
  j["inputs"] = inputs;
  j["outputs"] = outputs_;
  j["seed"] = seed_ ? io::Json(*seed_) : io::Json(nullptr);
  j["version"] = kVersion;
  j["duration_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  return j;
}

void RunManifest::write(const std::string& primary_out, const std::string& override_path) const {
  const std::string text = to_json().dump(2) + "\n";
  if (override_path.empty() && primary_out == "-") {
    std::cerr << text;
    return;
  }
  io::OutputFile out(override_path.empty() ? primary_out + ".manifest.json" : override_path);
  out.stream() << text;
  out.commit();
}

}  // namespace exemplar
