#include <immintrin.h>

#include "exemplar/simd/kernels.hpp"

namespace exemplar::simd::detail {

namespace {

// Products of two binary32 values are exact in binary64, so the fused
// multiply-add rounds once, identically to the scalar multiply-then-add.
void dot_rows_avx2(const float* query, const float* rows, std::size_t n_rows, std::size_t dim,
                   double* out) {
  const std::size_t body = dim - dim % kDotLanes;
  for (std::size_t r = 0; r < n_rows; ++r) {
    const float* row = rows + r * dim;
    __m256d lo = _mm256_setzero_pd();
    __m256d hi = _mm256_setzero_pd();
    for (std::size_t d = 0; d < body; d += kDotLanes) {
      const __m256 q = _mm256_loadu_ps(query + d);
      const __m256 x = _mm256_loadu_ps(row + d);
      lo = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(q)),
                           _mm256_cvtps_pd(_mm256_castps256_ps128(x)), lo);
      hi = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(q, 1)),
                           _mm256_cvtps_pd(_mm256_extractf128_ps(x, 1)), hi);
    }
    alignas(32) double lane[kDotLanes];
    _mm256_store_pd(lane, lo);
    _mm256_store_pd(lane + 4, hi);
    for (std::size_t d = body; d < dim; ++d) {
      lane[d % kDotLanes] += static_cast<double>(query[d]) * static_cast<double>(row[d]);
    }
    out[r] = ((lane[0] + lane[4]) + (lane[1] + lane[5])) + ((lane[2] + lane[6]) + (lane[3] + lane[7]));
  }
}

void bm25_weights_avx2(const std::uint32_t* doc, const std::uint32_t* tf, std::size_t n,
                       const double* length_norm, double idf, double k1_plus_1, double* out) {
  const __m256d vidf = _mm256_set1_pd(idf);
  const __m256d vk = _mm256_set1_pd(k1_plus_1);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // Term frequencies and doc ids stay far below 2^31.
    const __m128i vtf = _mm_loadu_si128(reinterpret_cast<const __m128i*>(tf + i));
    const __m128i vdoc = _mm_loadu_si128(reinterpret_cast<const __m128i*>(doc + i));
    const __m256d f = _mm256_cvtepi32_pd(vtf);
    const __m256d norm = _mm256_i32gather_pd(length_norm, vdoc, 8);
    const __m256d ratio = _mm256_div_pd(_mm256_mul_pd(f, vk), _mm256_add_pd(f, norm));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vidf, ratio));
  }
  for (; i < n; ++i) {
    const double f = static_cast<double>(tf[i]);
    out[i] = idf * ((f * k1_plus_1) / (f + length_norm[doc[i]]));
  }
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k{Isa::kAvx2, &dot_rows_avx2, &bm25_weights_avx2};
  return k;
}

}  // namespace exemplar::simd::detail
