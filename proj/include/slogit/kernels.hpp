#pragma once

#include <cstddef>

// Data-parallel inner loops used throughout the library. Every kernel has a
// scalar reference implementation; on x86-64 an AVX2/FMA variant is compiled
// alongside and selected at runtime. The two lanes are equivalence-tested in
// tests/test_kernels.cpp. Transcendental loops (sigmoid, logistic loss) stay
// scalar: their cost is O(n) against the O(n*p) reduction kernels.
//
// Selection order: SLOGIT_KERNELS env var ("scalar"/"avx2") if set, otherwise
// the best ISA the CPU supports. set_active_isa() overrides at runtime (used
// by the equivalence tests); call it before starting any concurrent work.

namespace slogit::kernels {

enum class Isa { scalar, avx2 };

Isa best_supported_isa() noexcept;
Isa active_isa() noexcept;
bool set_active_isa(Isa isa) noexcept; // false if unsupported on this host
const char* isa_name(Isa isa) noexcept;

double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum_sq(const double* a, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
// sum_i a[i]*b[i]*w[i]
double weighted_dot(const double* a, const double* b, const double* w,
                    std::size_t n) noexcept;
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double max_abs(const double* a, std::size_t n) noexcept;

namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum_sq(const double* a, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
double weighted_dot(const double* a, const double* b, const double* w,
                    std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double max_abs(const double* a, std::size_t n) noexcept;
} // namespace scalar

#if defined(SLOGIT_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum_sq(const double* a, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
double weighted_dot(const double* a, const double* b, const double* w,
                    std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double max_abs(const double* a, std::size_t n) noexcept;
} // namespace avx2
#endif

} // namespace slogit::kernels
