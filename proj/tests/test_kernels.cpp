#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "golf/error.hpp"
#include "golf/kernels.hpp"

namespace golf::kernels {
namespace {

// Plain sequential sums; the kernels reorder, so compare with a tolerance.
double naive_dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

TEST(Kernels, ScalarMatchesNaiveReference) {
  std::mt19937_64 rng(1);
  const auto& k = table(Isa::scalar);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1433u}) {
    auto x = random_vector(n, rng), y = random_vector(n, rng);
    EXPECT_NEAR(k.dot_f64(x.data(), y.data(), n), naive_dot(x, y), 1e-12 * (1.0 + n));
    EXPECT_NEAR(k.squared_norm_f64(x.data(), n), naive_dot(x, x), 1e-12 * (1.0 + n));
    auto z = y;
    k.axpy_f64(0.75, x.data(), z.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(z[i], y[i] + 0.75 * x[i], 1e-15 * 4);
  }
}

TEST(Kernels, EmptyInputs) {
  const auto& k = table(Isa::scalar);
  EXPECT_EQ(k.dot_f64(nullptr, nullptr, 0), 0.0);
  EXPECT_EQ(k.squared_norm_f64(nullptr, 0), 0.0);
}

TEST(Kernels, Avx2BitIdenticalToScalar) {
  if (!supported(Isa::avx2)) GTEST_SKIP() << "no AVX2 on this machine";
  const auto& s = table(Isa::scalar);
  const auto& v = table(Isa::avx2);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> len(0, 300);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = len(rng);
    auto x = random_vector(n, rng), y = random_vector(n, rng);
    std::vector<float> xf(x.begin(), x.end());
    const double a = std::uniform_real_distribution<double>(-3, 3)(rng);

    EXPECT_EQ(s.dot_f64(x.data(), y.data(), n), v.dot_f64(x.data(), y.data(), n)) << "n=" << n;
    EXPECT_EQ(s.squared_norm_f64(x.data(), n), v.squared_norm_f64(x.data(), n)) << "n=" << n;

    auto ys = y, yv = y;
    s.axpy_f64(a, x.data(), ys.data(), n);
    v.axpy_f64(a, x.data(), yv.data(), n);
    EXPECT_EQ(ys, yv);

    ys = y;
    yv = y;
    s.axpy_f32(a, xf.data(), ys.data(), n);
    v.axpy_f32(a, xf.data(), yv.data(), n);
    EXPECT_EQ(ys, yv);
  }
}

TEST(Kernels, DispatchHonoursSupport) {
  EXPECT_TRUE(supported(Isa::scalar));
  EXPECT_EQ(table(Isa::scalar).isa, Isa::scalar);
  EXPECT_NO_THROW(active());
  EXPECT_TRUE(supported(active().isa));
  EXPECT_EQ(parse_isa("avx2"), Isa::avx2);
  EXPECT_THROW(parse_isa("sse9"), ParameterError);
}

}  // namespace
}  // namespace golf::kernels
