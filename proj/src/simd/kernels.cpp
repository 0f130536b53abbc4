#include "lobforge/simd/kernels.hpp"

#include <cmath>

#include "lobforge/errors.hpp"

namespace lobforge::simd {

namespace ref {

double dot_f32(const float* a, const float* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_f32(const float* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(a[i]);
  return acc;
}

double sum_f64(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

void axpy_f32(float alpha, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void axpy_f64(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void add_f32(const float* a, const float* b, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void mul_f32(const float* a, const float* b, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_f32(float alpha, float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

}  // namespace ref

#if defined(LOBFORGE_HAVE_AVX2_TU)
namespace avx2 {
double dot_f32(const float* a, const float* b, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);
double sum_f32(const float* a, std::size_t n);
double sum_f64(const double* a, std::size_t n);
void axpy_f32(float alpha, const float* x, float* y, std::size_t n);
void axpy_f64(double alpha, const double* x, double* y, std::size_t n);
void add_f32(const float* a, const float* b, float* out, std::size_t n);
void mul_f32(const float* a, const float* b, float* out, std::size_t n);
void scale_f32(float alpha, float* x, std::size_t n);
}  // namespace avx2
#endif

#if defined(LOBFORGE_HAVE_NEON_TU)
namespace neon {
double dot_f32(const float* a, const float* b, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);
double sum_f32(const float* a, std::size_t n);
double sum_f64(const double* a, std::size_t n);
void axpy_f32(float alpha, const float* x, float* y, std::size_t n);
void axpy_f64(double alpha, const double* x, double* y, std::size_t n);
void add_f32(const float* a, const float* b, float* out, std::size_t n);
void mul_f32(const float* a, const float* b, float* out, std::size_t n);
void scale_f32(float alpha, float* x, std::size_t n);
}  // namespace neon
#endif

namespace {

struct KernelTable {
  double (*dot_f32)(const float*, const float*, std::size_t);
  double (*dot_f64)(const double*, const double*, std::size_t);
  double (*sum_f32)(const float*, std::size_t);
  double (*sum_f64)(const double*, std::size_t);
  void (*axpy_f32)(float, const float*, float*, std::size_t);
  void (*axpy_f64)(double, const double*, double*, std::size_t);
  void (*add_f32)(const float*, const float*, float*, std::size_t);
  void (*mul_f32)(const float*, const float*, float*, std::size_t);
  void (*scale_f32)(float, float*, std::size_t);
};

constexpr KernelTable kScalarTable{
    ref::dot_f32, ref::dot_f64, ref::sum_f32, ref::sum_f64,
    ref::axpy_f32, ref::axpy_f64, ref::add_f32, ref::mul_f32, ref::scale_f32};

#if defined(LOBFORGE_HAVE_AVX2_TU)
constexpr KernelTable kAvx2Table{
    avx2::dot_f32, avx2::dot_f64, avx2::sum_f32, avx2::sum_f64,
    avx2::axpy_f32, avx2::axpy_f64, avx2::add_f32, avx2::mul_f32, avx2::scale_f32};
#endif

#if defined(LOBFORGE_HAVE_NEON_TU)
constexpr KernelTable kNeonTable{
    neon::dot_f32, neon::dot_f64, neon::sum_f32, neon::sum_f64,
    neon::axpy_f32, neon::axpy_f64, neon::add_f32, neon::mul_f32, neon::scale_f32};
#endif

Backend detect_best() {
#if defined(LOBFORGE_HAVE_AVX2_TU)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Backend::avx2;
#endif
#if defined(LOBFORGE_HAVE_NEON_TU)
  return Backend::neon;
#endif
  return Backend::scalar;
}

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &kScalarTable;
#if defined(LOBFORGE_HAVE_AVX2_TU)
    case Backend::avx2:
      return &kAvx2Table;
#endif
#if defined(LOBFORGE_HAVE_NEON_TU)
    case Backend::neon:
      return &kNeonTable;
#endif
    default:
      return nullptr;
  }
}

Backend g_backend = detect_best();
const KernelTable* g_table = table_for(detect_best());

}  // namespace

Backend active_backend() { return g_backend; }

bool backend_supported(Backend b) {
  if (b == Backend::scalar) return true;
#if defined(LOBFORGE_HAVE_AVX2_TU)
  if (b == Backend::avx2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#endif
#if defined(LOBFORGE_HAVE_NEON_TU)
  if (b == Backend::neon) return true;
#endif
  return false;
}

void set_backend(Backend b) {
  if (!backend_supported(b))
    throw ConfigError("simd backend " + backend_name(b) + " not supported on this host");
  g_backend = b;
  g_table = table_for(b);
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "?";
}

double dot_f32(const float* a, const float* b, std::size_t n) { return g_table->dot_f32(a, b, n); }
double dot_f64(const double* a, const double* b, std::size_t n) { return g_table->dot_f64(a, b, n); }
double sum_f32(const float* a, std::size_t n) { return g_table->sum_f32(a, n); }
double sum_f64(const double* a, std::size_t n) { return g_table->sum_f64(a, n); }
void axpy_f32(float alpha, const float* x, float* y, std::size_t n) { g_table->axpy_f32(alpha, x, y, n); }
void axpy_f64(double alpha, const double* x, double* y, std::size_t n) { g_table->axpy_f64(alpha, x, y, n); }
void add_f32(const float* a, const float* b, float* out, std::size_t n) { g_table->add_f32(a, b, out, n); }
void mul_f32(const float* a, const float* b, float* out, std::size_t n) { g_table->mul_f32(a, b, out, n); }
void scale_f32(float alpha, float* x, std::size_t n) { g_table->scale_f32(alpha, x, n); }

}  // namespace lobforge::simd
