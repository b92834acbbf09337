#pragma once

// Dense inner-loop kernels with a scalar reference and SIMD variants.
//
// Every variant follows the same canonical evaluation order: fused
// multiply-add per element, four interleaved accumulators for reductions
// combined as (a0 + a2) + (a1 + a3), then a sequential fused tail. The
// variants are therefore bit-identical, and results do not depend on which
// one the dispatcher picks.

#include <cstddef>
#include <span>
#include <string_view>

namespace golf::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  const char* name;
  // y += a * x
  void (*axpy_f32)(double a, const float* x, double* y, std::size_t n);
  void (*axpy_f64)(double a, const double* x, double* y, std::size_t n);
  double (*dot_f64)(const double* x, const double* y, std::size_t n);
  double (*squared_norm_f64)(const double* x, std::size_t n);
};

bool supported(Isa isa);

// Throws ParameterError when the ISA is not available on this CPU or build.
const KernelTable& table(Isa isa);

// Best supported ISA, unless GOLF_ISA=scalar|avx2 overrides it. Resolved once.
const KernelTable& active();

Isa parse_isa(std::string_view name);

namespace detail {
extern const KernelTable scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

inline void axpy(double a, std::span<const float> x, std::span<double> y) {
  active().axpy_f32(a, x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy_f64(a, x.data(), y.data(), x.size());
}
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot_f64(x.data(), y.data(), x.size());
}
inline double squared_norm(std::span<const double> x) {
  return active().squared_norm_f64(x.data(), x.size());
}

}  // namespace golf::kernels
