// Copyright 2026 The e2v Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "e2v/common.hpp"
#include "e2v/simd/kernels.hpp"

using namespace e2v;

namespace {

std::vector<float> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (float& x : v) x = u(rng);
  return v;
}

// Accumulation order differs between variants; the bound scales with k.
void check_close(const std::vector<float>& a, const std::vector<float>& b, int k) {
  REQUIRE(a.size() == b.size());
  const float tol = 1e-6f * static_cast<float>(k + 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) {
      CAPTURE(i);
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(tol));
      return;
    }
  }
}

}  // namespace

TEST_CASE("avx2 kernels match the scalar reference") {
  const simd::KernelTable* fast = simd::avx2_kernels();
  if (!fast || !simd::cpu_supports_avx2()) {
    MESSAGE("AVX2 kernels unavailable; equivalence not exercised");
    return;
  }
  const simd::KernelTable& ref = simd::scalar_kernels();
  std::mt19937_64 rng(21);
  const int sizes[][3] = {{1, 1, 1}, {3, 5, 7}, {8, 8, 8}, {16, 33, 9}, {7, 64, 75}, {32, 257, 36}, {5, 1000, 13}};
  for (const auto& s : sizes) {
    const int m = s[0], n = s[1], k = s[2];
    CAPTURE(m);
    CAPTURE(n);
    CAPTURE(k);
    const auto a = random_vec(rng, static_cast<std::size_t>(m) * k);
    const auto b = random_vec(rng, static_cast<std::size_t>(k) * n);
    const auto bt = random_vec(rng, static_cast<std::size_t>(n) * k);
    const auto c0 = random_vec(rng, static_cast<std::size_t>(m) * n);
    for (bool acc : {false, true}) {
      auto c_ref = c0, c_fast = c0;
      ref.gemm_nn(m, n, k, a.data(), k, b.data(), n, c_ref.data(), n, acc);
      fast->gemm_nn(m, n, k, a.data(), k, b.data(), n, c_fast.data(), n, acc);
      check_close(c_fast, c_ref, k);

      c_ref = c0;
      c_fast = c0;
      ref.gemm_nt(m, n, k, a.data(), k, bt.data(), k, c_ref.data(), n, acc);
      fast->gemm_nt(m, n, k, a.data(), k, bt.data(), k, c_fast.data(), n, acc);
      check_close(c_fast, c_ref, k);
    }
  }
  for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 31u, 100u, 1027u}) {
    const auto x = random_vec(rng, n), y = random_vec(rng, n);
    CHECK(fast->dot(x.data(), y.data(), n) ==
          doctest::Approx(ref.dot(x.data(), y.data(), n)).epsilon(1e-5).scale(1.0));
    auto y_ref = y, y_fast = y;
    ref.axpy(n, 0.37f, x.data(), y_ref.data());
    fast->axpy(n, 0.37f, x.data(), y_fast.data());
    check_close(y_fast, y_ref, 1);
  }
}

TEST_CASE("scalar gemm against a triple loop") {
  std::mt19937_64 rng(2);
  const int m = 5, n = 6, k = 7;
  const auto a = random_vec(rng, m * k), b = random_vec(rng, k * n);
  std::vector<float> c(m * n, 0.0f);
  simd::scalar_kernels().gemm_nn(m, n, k, a.data(), k, b.data(), n, c.data(), n, false);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int p = 0; p < k; ++p) s += static_cast<double>(a[i * k + p]) * b[p * n + j];
      CHECK(c[i * n + j] == doctest::Approx(s).epsilon(1e-5));
    }
}

TEST_CASE("kernel selection") {
  const simd::Isa before = simd::active().isa;
  simd::select(simd::Isa::Scalar);
  CHECK(simd::active().isa == simd::Isa::Scalar);
  CHECK(simd::isa_name(simd::Isa::Scalar) == "scalar");
  if (simd::avx2_kernels() && simd::cpu_supports_avx2()) {
    simd::select(simd::Isa::Avx2);
    CHECK(simd::active().isa == simd::Isa::Avx2);
  } else {
    CHECK_THROWS_AS(simd::select(simd::Isa::Avx2), UsageError);
  }
  simd::select(before);
}
