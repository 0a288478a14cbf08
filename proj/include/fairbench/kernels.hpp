#pragma once

// Dense double-precision kernels used by the learners' inner loops.
//
// Every kernel has a scalar reference implementation; SIMD variants (AVX2+FMA
// on x86-64, NEON on AArch64) are selected once at startup from the CPU's
// capabilities. FAIRBENCH_SIMD=scalar|avx2|neon overrides the choice.
// Variants agree with the reference to rounding, not bitwise; a given backend
// is deterministic.

#include <cstddef>
#include <span>
#include <string_view>

namespace fairbench::kernels {

enum class Backend { scalar, avx2, neon };

struct KernelTable {
    double (*dot)(const double* a, const double* b, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    void (*scale)(double alpha, double* x, std::size_t n);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace scalar

bool backend_supported(Backend b) noexcept;
std::string_view backend_name(Backend b) noexcept;

/// Backend used by the free functions below.
Backend active_backend() noexcept;

/// Switches the active backend; throws InvalidArgument when unsupported here.
void set_backend(Backend b);

/// Table for a specific backend (for equivalence testing).
const KernelTable& table(Backend b);

double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
void scale(double alpha, std::span<double> x);

}  // namespace fairbench::kernels
