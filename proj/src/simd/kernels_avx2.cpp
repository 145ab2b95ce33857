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

#include <immintrin.h>

#include "e2v/simd/kernels.hpp"

namespace e2v::simd {
namespace {

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 sh = _mm_movehdup_ps(lo);
  __m128 s = _mm_add_ps(lo, sh);
  sh = _mm_movehl_ps(sh, s);
  s = _mm_add_ss(s, sh);
  return _mm_cvtss_f32(s);
}

// 4x16 register block: 8 accumulators, two B loads and four broadcasts per k.
inline void block_4x16(int k, const float* a, int lda, const float* b, int ldb, float* c, int ldc,
                       bool accumulate) {
  __m256 acc[4][2];
  for (int r = 0; r < 4; ++r) {
    if (accumulate) {
      acc[r][0] = _mm256_loadu_ps(c + r * ldc);
      acc[r][1] = _mm256_loadu_ps(c + r * ldc + 8);
    } else {
      acc[r][0] = _mm256_setzero_ps();
      acc[r][1] = _mm256_setzero_ps();
    }
  }
  for (int p = 0; p < k; ++p) {
    const float* brow = b + static_cast<std::ptrdiff_t>(p) * ldb;
    const __m256 b0 = _mm256_loadu_ps(brow);
    const __m256 b1 = _mm256_loadu_ps(brow + 8);
    for (int r = 0; r < 4; ++r) {
      const __m256 av = _mm256_broadcast_ss(a + static_cast<std::ptrdiff_t>(r) * lda + p);
      acc[r][0] = _mm256_fmadd_ps(av, b0, acc[r][0]);
      acc[r][1] = _mm256_fmadd_ps(av, b1, acc[r][1]);
    }
  }
  for (int r = 0; r < 4; ++r) {
    _mm256_storeu_ps(c + r * ldc, acc[r][0]);
    _mm256_storeu_ps(c + r * ldc + 8, acc[r][1]);
  }
}

inline void block_1x16(int k, const float* a, const float* b, int ldb, float* c, bool accumulate) {
  __m256 acc0 = accumulate ? _mm256_loadu_ps(c) : _mm256_setzero_ps();
  __m256 acc1 = accumulate ? _mm256_loadu_ps(c + 8) : _mm256_setzero_ps();
  for (int p = 0; p < k; ++p) {
    const float* brow = b + static_cast<std::ptrdiff_t>(p) * ldb;
    const __m256 av = _mm256_broadcast_ss(a + p);
    acc0 = _mm256_fmadd_ps(av, _mm256_loadu_ps(brow), acc0);
    acc1 = _mm256_fmadd_ps(av, _mm256_loadu_ps(brow + 8), acc1);
  }
  _mm256_storeu_ps(c, acc0);
  _mm256_storeu_ps(c + 8, acc1);
}

void gemm_nn_avx2(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c,
                  int ldc, bool accumulate) {
  const int n16 = n - n % 16;
  for (int j = 0; j < n16; j += 16) {
    int i = 0;
    for (; i + 4 <= m; i += 4)
      block_4x16(k, a + static_cast<std::ptrdiff_t>(i) * lda, lda, b + j, ldb,
                 c + static_cast<std::ptrdiff_t>(i) * ldc + j, ldc, accumulate);
    for (; i < m; ++i)
      block_1x16(k, a + static_cast<std::ptrdiff_t>(i) * lda, b + j, ldb,
                 c + static_cast<std::ptrdiff_t>(i) * ldc + j, accumulate);
  }
  if (n16 == n) return;
  // Column tail, same summation order as the scalar reference.
  for (int i = 0; i < m; ++i) {
    float* crow = c + static_cast<std::ptrdiff_t>(i) * ldc;
    if (!accumulate)
      for (int j = n16; j < n; ++j) crow[j] = 0.0f;
    for (int p = 0; p < k; ++p) {
      const float av = a[static_cast<std::ptrdiff_t>(i) * lda + p];
      const float* brow = b + static_cast<std::ptrdiff_t>(p) * ldb;
      for (int j = n16; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

float dot_avx2(const float* a, const float* b, std::size_t n) {
  __m256 s0 = _mm256_setzero_ps();
  __m256 s1 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), s0);
    s1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), s1);
  }
  for (; i + 8 <= n; i += 8) s0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), s0);
  float s = hsum(_mm256_add_ps(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void gemm_nt_avx2(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c,
                  int ldc, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    const float* arow = a + static_cast<std::ptrdiff_t>(i) * lda;
    for (int j = 0; j < n; ++j) {
      const float s = dot_avx2(arow, b + static_cast<std::ptrdiff_t>(j) * ldb, static_cast<std::size_t>(k));
      float& out = c[static_cast<std::ptrdiff_t>(i) * ldc + j];
      out = accumulate ? out + s : s;
    }
  }
}

void axpy_avx2(std::size_t n, float alpha, const float* x, float* y) {
  const __m256 av = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Isa::Avx2, gemm_nn_avx2, gemm_nt_avx2, dot_avx2, axpy_avx2};
  return &table;
}

}  // namespace e2v::simd
