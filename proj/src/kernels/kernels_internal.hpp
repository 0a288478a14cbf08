#pragma once

#include <cstddef>

namespace fairbench::kernels {

#if defined(FAIRBENCH_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace avx2
#endif

#if defined(FAIRBENCH_HAVE_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
}  // namespace neon
#endif

}  // namespace fairbench::kernels
