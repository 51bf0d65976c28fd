#pragma once
// Flat-array arithmetic reductions used by the per-cell quadrature loops,
// field norms and indicator sums.  Each kernel has a scalar reference
// implementation and (on x86-64) an AVX2 variant; the active set is chosen
// once at runtime from CPU features.  The two must agree to tight relative
// tolerance on any input -- see tests/test_kernels.cpp.

#include <cstddef>
#include <string>

namespace thermoshape::kernels {

struct Ops {
    // sum_i a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i a[i]*b[i]*c[i]
    double (*dot3)(const double* a, const double* b, const double* c, std::size_t n);
    // sum_i a[i]*b[i]*b[i]   (weighted squared norm)
    double (*wsq)(const double* w, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    const char* name;
};

// Scalar reference implementations (always available).
const Ops& scalar_ops();

// Best available implementation for this CPU, selected on first use.
const Ops& ops();

// Name of the active implementation ("scalar", "avx2").
std::string active_implementation();

// Convenience forwarding wrappers.
inline double dot(const double* a, const double* b, std::size_t n) {
    return ops().dot(a, b, n);
}
inline double dot3(const double* a, const double* b, const double* c, std::size_t n) {
    return ops().dot3(a, b, c, n);
}
inline double wsq(const double* w, const double* b, std::size_t n) {
    return ops().wsq(w, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    ops().axpy(alpha, x, y, n);
}

}  // namespace thermoshape::kernels
