#include "exemplar/dense.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "exemplar/errors.hpp"
#include "exemplar/jsonl.hpp"

namespace exemplar::dense {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

std::uint32_t load_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32_le(unsigned char* p, std::uint32_t v) {
  p[0] = static_cast<unsigned char>(v);
  p[1] = static_cast<unsigned char>(v >> 8);
  p[2] = static_cast<unsigned char>(v >> 16);
  p[3] = static_cast<unsigned char>(v >> 24);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Uniform draw in [0, bound) by rejection; identical on every platform.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> ids, std::size_t dim, std::vector<float> values)
    : ids_(std::move(ids)), dim_(dim), values_(std::move(values)) {
  if (values_.size() != ids_.size() * dim_) {
    throw FormatError("matrix holds " + std::to_string(values_.size()) + " values, expected " +
                      std::to_string(ids_.size()) + " x " + std::to_string(dim_));
  }
  if (!ids_.empty() && dim_ == 0) throw FormatError("non-empty matrix with dim 0");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw FormatError("non-finite value in row '" + ids_[i / dim_] + "'");
    }
  }
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) throw DuplicateId("embedding id '" + ids_[i] + "'");
  }
}

std::optional<std::size_t> EmbeddingMatrix::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingMatrix EmbeddingMatrix::reordered(const std::vector<std::string>& order) const {
  std::vector<float> values;
  values.reserve(order.size() * dim_);
  for (const auto& id : order) {
    const auto i = index_of(id);
    if (!i) throw GoldMissing("no embedding for id '" + id + "'");
    const auto r = row(*i);
    values.insert(values.end(), r.begin(), r.end());
  }
  return EmbeddingMatrix(order, dim_, std::move(values));
}

std::string sidecar_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_extension()) p.replace_extension();
  return p.string() + ".ids.jsonl";
}

EmbeddingMatrix load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  unsigned char header[12];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (in.gcount() != static_cast<std::streamsize>(sizeof header)) {
    throw FormatError(path + ": truncated header");
  }
  if (std::memcmp(header, kMagic, 4) != 0) throw FormatError(path + ": bad magic");
  const std::uint32_t count = load_u32_le(header + 4);
  const std::uint32_t dim = load_u32_le(header + 8);

  const std::uint64_t n_values = static_cast<std::uint64_t>(count) * dim;
  std::error_code ec;
  const std::uint64_t file_size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("cannot stat '" + path + "'");
  if (file_size < 12 + n_values * 4) {
    throw FormatError(path + ": truncated payload (expected " + std::to_string(count) + " x " +
                      std::to_string(dim) + " floats)");
  }
  if (file_size > 12 + n_values * 4) throw FormatError(path + ": trailing bytes");
  std::vector<unsigned char> raw(n_values * 4);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::uint64_t>(in.gcount()) != raw.size()) {
    throw FormatError(path + ": truncated payload (expected " + std::to_string(count) + " x " +
                      std::to_string(dim) + " floats)");
  }

  std::vector<float> values(n_values);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(load_u32_le(raw.data() + 4 * i));
  }

  const std::string ids_path = sidecar_path(path);
  std::vector<std::string> ids;
  {
    io::InputFile ids_in(ids_path);
    try {
      io::for_each_jsonl(ids_in.stream(), ids_path, [&](const io::Json& j, std::size_t line) {
        ids.push_back(io::FieldReader{j, ids_path, line}.string("id"));
      });
    } catch (const SchemaError& e) {
      throw FormatError(e.what());
    }
  }
  if (ids.size() != count) {
    throw FormatError(ids_path + ": " + std::to_string(ids.size()) + " ids for " +
                      std::to_string(count) + " vectors");
  }
  return EmbeddingMatrix(std::move(ids), dim, std::move(values));
}

void write_embeddings(const std::string& path, const EmbeddingMatrix& m) {
  {
    io::OutputFile out(path);
    unsigned char header[12];
    std::memcpy(header, kMagic, 4);
    store_u32_le(header + 4, static_cast<std::uint32_t>(m.size()));
    store_u32_le(header + 8, static_cast<std::uint32_t>(m.dim()));
    out.stream().write(reinterpret_cast<const char*>(header), sizeof header);
    std::vector<unsigned char> raw(m.values().size() * 4);
    for (std::size_t i = 0; i < m.values().size(); ++i) {
      store_u32_le(raw.data() + 4 * i, std::bit_cast<std::uint32_t>(m.values()[i]));
    }
    out.stream().write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    out.commit();
  }
  io::OutputFile ids(sidecar_path(path));
  for (const auto& id : m.ids()) ids.stream() << io::dump_line(io::Json{{"id", id}}) << '\n';
  ids.commit();
}

std::vector<double> dense_score(std::span<const float> query, const EmbeddingMatrix& candidates,
                                Similarity sim, const simd::Kernels& kernels) {
  if (!candidates.empty() && query.size() != candidates.dim()) {
    throw DimMismatch("query has dim " + std::to_string(query.size()) + ", candidates have dim " +
                      std::to_string(candidates.dim()));
  }
  std::vector<double> out(candidates.size());
  if (candidates.empty()) return out;
  kernels.dot_rows(query.data(), candidates.values().data(), candidates.size(), candidates.dim(),
                   out.data());
  if (sim == Similarity::kCosine) {
    double qq = 0.0;
    kernels.dot_rows(query.data(), query.data(), 1, query.size(), &qq);
    const double qn = std::sqrt(qq);
    for (std::size_t j = 0; j < out.size(); ++j) {
      const auto r = candidates.row(j);
      double cc = 0.0;
      kernels.dot_rows(r.data(), r.data(), 1, r.size(), &cc);
      const double denom = qn * std::sqrt(cc);
      out[j] = denom > 0 ? out[j] / denom : 0.0;
    }
  }
  return out;
}

RankingResult rank_dense(std::span<const float> query, const EmbeddingMatrix& candidates,
                         const std::string& query_id, const std::string& gold_id, std::size_t k,
                         Similarity sim) {
  const auto gold = candidates.index_of(gold_id);
  if (!gold) throw GoldMissing("gold id '" + gold_id + "' has no candidate embedding");
  const auto scores = dense_score(query, candidates, sim);
  return rank_scores(scores, candidates.ids(), query_id, *gold, k);
}

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed, std::string_view query_id) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(fnv1a(query_id))));
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

RankingResult rank_random(const std::vector<std::string>& pool_ids, const std::string& query_id,
                          std::size_t gold_index, std::uint64_t seed, std::size_t k) {
  if (gold_index >= pool_ids.size()) throw GoldMissing("gold index outside the pool");
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  const auto perm = random_permutation(pool_ids.size(), seed, query_id);
  RankingResult r;
  r.query_id = query_id;
  r.gold_id = pool_ids[gold_index];
  r.n_candidates = pool_ids.size();
  const auto pos = std::find(perm.begin(), perm.end(), gold_index) - perm.begin();
  r.gold_rank = static_cast<std::size_t>(pos) + 1;
  const std::size_t kk = std::min(k, perm.size());
  for (std::size_t i = 0; i < kk; ++i) {
    r.top_k.push_back(pool_ids[perm[i]]);
    r.scores_topk.push_back(0.0);
  }
  return r;
}

RankingResult rank_random(const store::CandidatePool& pool, const store::RetrievalQuery& query,
                          std::uint64_t seed, std::size_t k) {
  const auto gold = pool.index_of(query.gold_id);
  if (!gold) throw GoldMissing("gold id '" + query.gold_id + "' not in the candidate pool");
  return rank_random(pool.unit_ids(), query.query_id, *gold, seed, k);
}

}  // namespace exemplar::dense
