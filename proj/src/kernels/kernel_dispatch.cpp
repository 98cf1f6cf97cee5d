#include "crem/kernels/partition_kernel.hpp"

#include "crem/errors.hpp"

namespace crem {

bool avx2_available() {
#if defined(CREM_HAVE_AVX2_BUILD)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

KernelKind parse_kernel_kind(const std::string& name) {
    if (name == "auto") return KernelKind::Auto;
    if (name == "scalar") return KernelKind::Scalar;
    if (name == "avx2") return KernelKind::Avx2;
    throw DomainError("unknown kernel '" + name + "' (auto|scalar|avx2)");
}

LeafAccumulateFn select_kernel(KernelKind kind) {
    switch (kind) {
        case KernelKind::Scalar:
            return &kernels::accumulate_leaf_scalar;
        case KernelKind::Avx2:
#if defined(CREM_HAVE_AVX2_BUILD)
            if (avx2_available()) return &kernels::accumulate_leaf_avx2;
#endif
            throw DomainError("avx2 kernel requested but not available on this CPU/build");
        case KernelKind::Auto:
        default:
#if defined(CREM_HAVE_AVX2_BUILD)
            if (avx2_available()) return &kernels::accumulate_leaf_avx2;
#endif
            return &kernels::accumulate_leaf_scalar;
    }
}

const char* kernel_name(LeafAccumulateFn fn) {
#if defined(CREM_HAVE_AVX2_BUILD)
    if (fn == &kernels::accumulate_leaf_avx2) return "avx2";
#endif
    return "scalar";
}

}  // namespace crem
