#include "slogit/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace slogit::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(SLOGIT_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa initial_isa() noexcept {
    if (const char* env = std::getenv("SLOGIT_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Isa::avx2;
    }
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& isa_state() noexcept {
    static std::atomic<Isa> state{initial_isa()};
    return state;
}

} // namespace

Isa best_supported_isa() noexcept { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

Isa active_isa() noexcept { return isa_state().load(std::memory_order_relaxed); }

bool set_active_isa(Isa isa) noexcept {
    if (isa == Isa::avx2 && !cpu_has_avx2()) return false;
    isa_state().store(isa, std::memory_order_relaxed);
    return true;
}

const char* isa_name(Isa isa) noexcept {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

#if defined(SLOGIT_HAVE_AVX2)
#define SLOGIT_DISPATCH(fn, ...) \
    return active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define SLOGIT_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) noexcept {
    SLOGIT_DISPATCH(dot, a, b, n);
}

double sum_sq(const double* a, std::size_t n) noexcept { SLOGIT_DISPATCH(sum_sq, a, n); }

double sum(const double* a, std::size_t n) noexcept { SLOGIT_DISPATCH(sum, a, n); }

double weighted_dot(const double* a, const double* b, const double* w,
                    std::size_t n) noexcept {
    SLOGIT_DISPATCH(weighted_dot, a, b, w, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
    SLOGIT_DISPATCH(axpy, alpha, x, y, n);
}

double max_abs(const double* a, std::size_t n) noexcept { SLOGIT_DISPATCH(max_abs, a, n); }

#undef SLOGIT_DISPATCH

} // namespace slogit::kernels
