#pragma once

#include <cstddef>
#include <string>

// Data-parallel inner loops used by the tensor kernels. Every entry point is
// backed by a scalar reference implementation (simd::ref) and, where the host
// supports it, an AVX2 or NEON variant selected once at runtime. Reductions
// accumulate in f64 regardless of element type.

namespace lobforge::simd {

enum class Backend { scalar, avx2, neon };

Backend active_backend();
bool backend_supported(Backend b);
// Throws ConfigError if the backend is not supported on this host.
void set_backend(Backend b);
std::string backend_name(Backend b);

double dot_f32(const float* a, const float* b, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);
double sum_f32(const float* a, std::size_t n);
double sum_f64(const double* a, std::size_t n);
// y[i] += alpha * x[i], fused multiply-add per element.
void axpy_f32(float alpha, const float* x, float* y, std::size_t n);
void axpy_f64(double alpha, const double* x, double* y, std::size_t n);
void add_f32(const float* a, const float* b, float* out, std::size_t n);
void mul_f32(const float* a, const float* b, float* out, std::size_t n);
void scale_f32(float alpha, float* x, std::size_t n);

// Type-generic wrappers so templated tensor code picks the right variant.
inline double dot(const float* a, const float* b, std::size_t n) { return dot_f32(a, b, n); }
inline double dot(const double* a, const double* b, std::size_t n) { return dot_f64(a, b, n); }
inline double sum(const float* a, std::size_t n) { return sum_f32(a, n); }
inline double sum(const double* a, std::size_t n) { return sum_f64(a, n); }
inline void axpy(float alpha, const float* x, float* y, std::size_t n) { axpy_f32(alpha, x, y, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { axpy_f64(alpha, x, y, n); }

namespace ref {
double dot_f32(const float* a, const float* b, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);
double sum_f32(const float* a, std::size_t n);
double sum_f64(const double* a, std::size_t n);
void axpy_f32(float alpha, const float* x, float* y, std::size_t n);
void axpy_f64(double alpha, const double* x, double* y, std::size_t n);
void add_f32(const float* a, const float* b, float* out, std::size_t n);
void mul_f32(const float* a, const float* b, float* out, std::size_t n);
void scale_f32(float alpha, float* x, std::size_t n);
}  // namespace ref

}  // namespace lobforge::simd
