// Runtime selection of the kernel implementation set.

#include "thermoshape/kernels.hpp"

namespace thermoshape::kernels {

#if defined(THERMOSHAPE_HAVE_AVX2_TU)
const Ops& avx2_ops();
#endif

namespace {

const Ops& select() {
#if defined(THERMOSHAPE_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return avx2_ops();
    }
#endif
    return scalar_ops();
}

}  // namespace

const Ops& ops() {
    static const Ops& chosen = select();
    return chosen;
}

std::string active_implementation() { return ops().name; }

}  // namespace thermoshape::kernels
