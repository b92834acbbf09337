#include "golf/kernels.hpp"

#include <cmath>

namespace golf::kernels::detail {
namespace {

void axpy_f32(double a, const float* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, static_cast<double>(x[i]), y[i]);
}

void axpy_f64(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

double dot_f64(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) acc[l] = std::fma(x[i + l], y[i + l], acc[l]);
  }
  double s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < n; ++i) s = std::fma(x[i], y[i], s);
  return s;
}

double squared_norm_f64(const double* x, std::size_t n) { return dot_f64(x, x, n); }

}  // namespace

const KernelTable scalar_table{Isa::scalar, "scalar", axpy_f32, axpy_f64, dot_f64, squared_norm_f64};

}  // namespace golf::kernels::detail
