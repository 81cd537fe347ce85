#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

// Data-parallel inner loops behind the rankers. Every ISA variant rounds
// exactly like the scalar reference, so rankings do not depend on the CPU.
namespace exemplar::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

// Number of double accumulators in the dot-product reduction. Element i is
// accumulated into lane i % kDotLanes; lanes are combined as
// ((l0 + l4) + (l1 + l5)) + ((l2 + l6) + (l3 + l7)).
inline constexpr std::size_t kDotLanes = 8;

struct Kernels {
  Isa isa;

  // out[r] = sum_d query[d] * rows[r * dim + d], accumulated in double.
  void (*dot_rows)(const float* query, const float* rows, std::size_t n_rows, std::size_t dim,
                   double* out);

  // BM25 posting weights:
  //   out[i] = idf * ((tf[i] * k1_plus_1) / (tf[i] + length_norm[doc[i]]))
  void (*bm25_weights)(const std::uint32_t* doc, const std::uint32_t* tf, std::size_t n,
                       const double* length_norm, double idf, double k1_plus_1, double* out);
};

// Supported on this CPU, scalar first.
std::vector<Isa> supported_isas();

// nullptr when the ISA is not compiled in or not supported by the CPU.
const Kernels* kernels_for(Isa isa);

// Best supported kernels. EXEMPLAR_SIMD=scalar|avx2|neon forces a choice
// (ignored when unsupported).
const Kernels& active_kernels();

namespace detail {
const Kernels& scalar_kernels();
#if defined(EXEMPLAR_HAVE_AVX2)
const Kernels& avx2_kernels();
#endif
#if defined(EXEMPLAR_HAVE_NEON)
const Kernels& neon_kernels();
#endif
}  // namespace detail

}  // namespace exemplar::simd
