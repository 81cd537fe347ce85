#include <arm_neon.h>

#include "exemplar/simd/kernels.hpp"

namespace exemplar::simd::detail {

namespace {

void dot_rows_neon(const float* query, const float* rows, std::size_t n_rows, std::size_t dim,
                   double* out) {
  const std::size_t body = dim - dim % kDotLanes;
  for (std::size_t r = 0; r < n_rows; ++r) {
    const float* row = rows + r * dim;
    float64x2_t a01 = vdupq_n_f64(0.0);
    float64x2_t a23 = vdupq_n_f64(0.0);
    float64x2_t a45 = vdupq_n_f64(0.0);
    float64x2_t a67 = vdupq_n_f64(0.0);
    for (std::size_t d = 0; d < body; d += kDotLanes) {
      const float32x4_t q0 = vld1q_f32(query + d);
      const float32x4_t q1 = vld1q_f32(query + d + 4);
      const float32x4_t x0 = vld1q_f32(row + d);
      const float32x4_t x1 = vld1q_f32(row + d + 4);
      a01 = vfmaq_f64(a01, vcvt_f64_f32(vget_low_f32(q0)), vcvt_f64_f32(vget_low_f32(x0)));
      a23 = vfmaq_f64(a23, vcvt_high_f64_f32(q0), vcvt_high_f64_f32(x0));
      a45 = vfmaq_f64(a45, vcvt_f64_f32(vget_low_f32(q1)), vcvt_f64_f32(vget_low_f32(x1)));
      a67 = vfmaq_f64(a67, vcvt_high_f64_f32(q1), vcvt_high_f64_f32(x1));
    }
    double lane[kDotLanes];
    vst1q_f64(lane, a01);
    vst1q_f64(lane + 2, a23);
    vst1q_f64(lane + 4, a45);
    vst1q_f64(lane + 6, a67);
    for (std::size_t d = body; d < dim; ++d) {
      lane[d % kDotLanes] += static_cast<double>(query[d]) * static_cast<double>(row[d]);
    }
    out[r] = ((lane[0] + lane[4]) + (lane[1] + lane[5])) + ((lane[2] + lane[6]) + (lane[3] + lane[7]));
  }
}

void bm25_weights_neon(const std::uint32_t* doc, const std::uint32_t* tf, std::size_t n,
                       const double* length_norm, double idf, double k1_plus_1, double* out) {
  const float64x2_t vidf = vdupq_n_f64(idf);
  const float64x2_t vk = vdupq_n_f64(k1_plus_1);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t f = vcvtq_f64_u64(vmovl_u32(vld1_u32(tf + i)));
    const double norm_pair[2] = {length_norm[doc[i]], length_norm[doc[i + 1]]};
    const float64x2_t norm = vld1q_f64(norm_pair);
    const float64x2_t ratio = vdivq_f64(vmulq_f64(f, vk), vaddq_f64(f, norm));
    vst1q_f64(out + i, vmulq_f64(vidf, ratio));
  }
  for (; i < n; ++i) {
    const double f = static_cast<double>(tf[i]);
    out[i] = idf * ((f * k1_plus_1) / (f + length_norm[doc[i]]));
  }
}

}  // namespace

const Kernels& neon_kernels() {
  static const Kernels k{Isa::kNeon, &dot_rows_neon, &bm25_weights_neon};
  return k;
}

}  // namespace exemplar::simd::detail
