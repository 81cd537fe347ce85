#include "exemplar/simd/kernels.hpp"

namespace exemplar::simd::detail {

namespace {

void dot_rows_scalar(const float* query, const float* rows, std::size_t n_rows, std::size_t dim,
                     double* out) {
  for (std::size_t r = 0; r < n_rows; ++r) {
    const float* row = rows + r * dim;
    double lane[kDotLanes] = {0, 0, 0, 0, 0, 0, 0, 0};
    for (std::size_t d = 0; d < dim; ++d) {
      lane[d % kDotLanes] += static_cast<double>(query[d]) * static_cast<double>(row[d]);
    }
    out[r] = ((lane[0] + lane[4]) + (lane[1] + lane[5])) + ((lane[2] + lane[6]) + (lane[3] + lane[7]));
  }
}

void bm25_weights_scalar(const std::uint32_t* doc, const std::uint32_t* tf, std::size_t n,
                         const double* length_norm, double idf, double k1_plus_1, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double f = static_cast<double>(tf[i]);
    out[i] = idf * ((f * k1_plus_1) / (f + length_norm[doc[i]]));
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{Isa::kScalar, &dot_rows_scalar, &bm25_weights_scalar};
  return k;
}

}  // namespace exemplar::simd::detail
