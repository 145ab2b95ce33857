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

#pragma once

#include <cstddef>
#include <string_view>

// Dense float kernels behind the convolution layers. Each kernel exists as a
// portable scalar reference and, on x86-64, an AVX2/FMA variant; the active
// table is chosen once at startup from the CPU features (override with
// E2V_SIMD=scalar|avx2).
namespace e2v::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  // C[M,N] (+)= A[M,K] * B[K,N], all row-major.
  void (*gemm_nn)(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c,
                  int ldc, bool accumulate);
  // C[M,N] (+)= A[M,K] * B[N,K]^T.
  void (*gemm_nt)(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c,
                  int ldc, bool accumulate);
  float (*dot)(const float* a, const float* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(std::size_t n, float alpha, const float* x, float* y);
};

const KernelTable& scalar_kernels();
/// Null when the AVX2 variant is not compiled in.
const KernelTable* avx2_kernels();

bool cpu_supports_avx2();

/// Kernel table used by the library. Selected on first use.
const KernelTable& active();
/// Force a table (tests, benchmarks). Throws UsageError if unavailable.
void select(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace e2v::simd
