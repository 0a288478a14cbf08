#include <atomic>
#include <cstdlib>
#include <string>

#include "fairbench/error.hpp"
#include "fairbench/kernels.hpp"
#include "kernels_internal.hpp"

namespace fairbench::kernels {

namespace {

constexpr KernelTable scalar_table{&scalar::dot, &scalar::axpy, &scalar::sum, &scalar::scale};
#if defined(FAIRBENCH_HAVE_AVX2)
constexpr KernelTable avx2_table{&avx2::dot, &avx2::axpy, &avx2::sum, &avx2::scale};
#endif
#if defined(FAIRBENCH_HAVE_NEON)
constexpr KernelTable neon_table{&neon::dot, &neon::axpy, &neon::sum, &neon::scale};
#endif

Backend best_available() noexcept {
    if (backend_supported(Backend::avx2)) return Backend::avx2;
    if (backend_supported(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

Backend initial_backend() noexcept {
    if (const char* env = std::getenv("FAIRBENCH_SIMD")) {
        const std::string want(env);
        for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
            if (want == backend_name(b) && backend_supported(b)) return b;
        }
    }
    return best_available();
}

std::atomic<Backend>& active() {
    static std::atomic<Backend> current{initial_backend()};
    return current;
}

}  // namespace

bool backend_supported(Backend b) noexcept {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(FAIRBENCH_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::neon:
#if defined(FAIRBENCH_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

std::string_view backend_name(Backend b) noexcept {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "unknown";
}

Backend active_backend() noexcept { return active().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (!backend_supported(b)) {
        throw InvalidArgument("kernel backend '" + std::string(backend_name(b)) +
                              "' is not supported on this machine");
    }
    active().store(b, std::memory_order_relaxed);
}

const KernelTable& table(Backend b) {
    if (!backend_supported(b)) {
        throw InvalidArgument("kernel backend '" + std::string(backend_name(b)) +
                              "' is not supported on this machine");
    }
    switch (b) {
#if defined(FAIRBENCH_HAVE_AVX2)
        case Backend::avx2: return avx2_table;
#endif
#if defined(FAIRBENCH_HAVE_NEON)
        case Backend::neon: return neon_table;
#endif
        default: return scalar_table;
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    return table(active_backend()).dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    table(active_backend()).axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

double sum(std::span<const double> x) { return table(active_backend()).sum(x.data(), x.size()); }

void scale(double alpha, std::span<double> x) { table(active_backend()).scale(alpha, x.data(), x.size()); }

}  // namespace fairbench::kernels
