#include <cstdlib>
#include <string>

#include "exemplar/simd/kernels.hpp"

namespace exemplar::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

const Kernels* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &detail::scalar_kernels();
    case Isa::kAvx2:
#if defined(EXEMPLAR_HAVE_AVX2)
      __builtin_cpu_init();
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return &detail::avx2_kernels();
      }
#endif
      return nullptr;
    case Isa::kNeon:
#if defined(EXEMPLAR_HAVE_NEON)
      return &detail::neon_kernels();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (kernels_for(isa)) out.push_back(isa);
  }
  return out;
}

namespace {

const Kernels& select() {
  if (const char* env = std::getenv("EXEMPLAR_SIMD")) {
    const std::string want(env);
    for (Isa isa : supported_isas()) {
      if (isa_name(isa) == want) return *kernels_for(isa);
    }
  }
  const auto isas = supported_isas();
  return *kernels_for(isas.back());
}

}  // namespace

const Kernels& active_kernels() {
  static const Kernels& k = select();
  return k;
}

}  // namespace exemplar::simd
