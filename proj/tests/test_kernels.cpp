// Scalar reference kernels vs. the runtime-selected implementation.  The two
// may differ by FMA/reassociation rounding only, so comparisons are relative
// to the magnitude of the exact (long double) reduction.
#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "thermoshape/common.hpp"
#include "thermoshape/kernels.hpp"

using namespace thermoshape;
namespace k = thermoshape::kernels;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

long double exact_dot(const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += static_cast<long double>(a[i]) * b[i];
    return s;
}

long double exact_dot3(const std::vector<double>& a, const std::vector<double>& b,
                       const std::vector<double>& c) {
    long double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += static_cast<long double>(a[i]) * b[i] * c[i];
    return s;
}

}  // namespace

TEST_CASE("active implementation is a known one") {
    const std::string name = k::active_implementation();
    CHECK((name == "scalar" || name == "avx2"));
    CHECK(std::string(k::scalar_ops().name) == "scalar");
    CHECK(std::string(k::ops().name) == name);
}

TEST_CASE("dot: small hand oracle") {
    const double a[] = {1.0, 2.0, 3.0};
    const double b[] = {4.0, -5.0, 6.0};
    CHECK(k::scalar_ops().dot(a, b, 3) == doctest::Approx(12.0).epsilon(1e-15));
    CHECK(k::ops().dot(a, b, 3) == doctest::Approx(12.0).epsilon(1e-14));
    CHECK(k::ops().dot(a, b, 0) == 0.0);
}

TEST_CASE("scalar vs active: all kernels, all tail lengths") {
    Rng rng(7);
    const auto& sc = k::scalar_ops();
    const auto& ac = k::ops();
    for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{2},
                          std::size_t{3}, std::size_t{4}, std::size_t{5},
                          std::size_t{7}, std::size_t{8}, std::size_t{9},
                          std::size_t{16}, std::size_t{17}, std::size_t{31},
                          std::size_t{64}, std::size_t{100}, std::size_t{1003}}) {
        CAPTURE(n);
        auto a = random_vec(rng, n, -3.0, 3.0);
        auto b = random_vec(rng, n, -2.0, 2.0);
        auto c = random_vec(rng, n, -1.0, 1.0);

        const long double dref = exact_dot(a, b);
        const double scale_d = std::max<double>(1e-30, std::fabs((double)dref));
        CHECK(std::fabs(sc.dot(a.data(), b.data(), n) - (double)dref) <=
              1e-12 * scale_d + 1e-13 * n);
        CHECK(std::fabs(ac.dot(a.data(), b.data(), n) - (double)dref) <=
              1e-12 * scale_d + 1e-13 * n);

        const long double d3ref = exact_dot3(a, b, c);
        const double scale_3 = std::max<double>(1e-30, std::fabs((double)d3ref));
        CHECK(std::fabs(sc.dot3(a.data(), b.data(), c.data(), n) - (double)d3ref) <=
              1e-12 * scale_3 + 1e-13 * n);
        CHECK(std::fabs(ac.dot3(a.data(), b.data(), c.data(), n) - (double)d3ref) <=
              1e-12 * scale_3 + 1e-13 * n);

        // wsq(w, b) must equal dot3(w, b, b) for both implementations.
        const long double wref = exact_dot3(a, b, b);
        const double scale_w = std::max<double>(1e-30, std::fabs((double)wref));
        CHECK(std::fabs(sc.wsq(a.data(), b.data(), n) - (double)wref) <=
              1e-12 * scale_w + 1e-13 * n);
        CHECK(std::fabs(ac.wsq(a.data(), b.data(), n) - (double)wref) <=
              1e-12 * scale_w + 1e-13 * n);

        // axpy: compare against the plain loop elementwise (exact: one fused
        // or two rounded ops per element, both within 1 ulp of the same
        // double expression -- require equality to the scalar result within
        // one rounding of the product).
        const double alpha = 1.75;  // exactly representable
        auto y1 = c;
        auto y2 = c;
        sc.axpy(alpha, a.data(), y1.data(), n);
        ac.axpy(alpha, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            const double expect = c[i] + alpha * a[i];
            CHECK(std::fabs(y1[i] - expect) <= 2e-16 * std::fabs(expect) + 1e-300);
            CHECK(std::fabs(y2[i] - expect) <= 4e-16 * std::fabs(expect) + 1e-300);
        }
    }
}

TEST_CASE("kernels handle unaligned offsets") {
    // The mesh loops hand the kernels interior pointers; make sure offsets
    // into a buffer agree between implementations as well.
    Rng rng(11);
    auto a = random_vec(rng, 70, -1.0, 1.0);
    auto b = random_vec(rng, 70, -1.0, 1.0);
    for (std::size_t off : {std::size_t{1}, std::size_t{2}, std::size_t{3},
                            std::size_t{5}}) {
        const std::size_t n = 70 - off;
        const double s = k::scalar_ops().dot(a.data() + off, b.data() + off, n);
        const double v = k::ops().dot(a.data() + off, b.data() + off, n);
        CHECK(std::fabs(s - v) <= 1e-12 * std::max(1.0, std::fabs(s)));
    }
}
