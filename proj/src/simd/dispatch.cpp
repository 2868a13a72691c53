// Copyright 2026 The DBF Racing Authors
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

#include <cstdlib>
#include <string_view>

#include "dbf/simd/kinematics_kernels.hpp"

namespace dbf::simd {

namespace {

bool cpu_has_avx2_fma() {
#if defined(DBF_HAVE_AVX2_KERNEL) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelInfo kScalar{"scalar", &kinematics_scalar};
#if defined(DBF_HAVE_AVX2_KERNEL)
const KernelInfo kAvx2{"avx2", &kinematics_avx2};
#endif

const KernelInfo& select_kernel() {
  const char* forced = std::getenv("DBF_SIMD");
  if (forced != nullptr && std::string_view(forced) == "scalar") return kScalar;
#if defined(DBF_HAVE_AVX2_KERNEL)
  if (cpu_has_avx2_fma()) return kAvx2;
#endif
  return kScalar;
}

}  // namespace

const KernelInfo& active_kinematics_kernel() {
  static const KernelInfo& chosen = select_kernel();
  return chosen;
}

std::vector<KernelInfo> available_kinematics_kernels() {
  std::vector<KernelInfo> out{kScalar};
#if defined(DBF_HAVE_AVX2_KERNEL)
  if (cpu_has_avx2_fma()) out.push_back(kAvx2);
#endif
  return out;
}

const KernelInfo* find_kinematics_kernel(std::string_view name) {
  if (name == kScalar.name) return &kScalar;
#if defined(DBF_HAVE_AVX2_KERNEL)
  if (name == kAvx2.name && cpu_has_avx2_fma()) return &kAvx2;
#endif
  return nullptr;
}

}  // namespace dbf::simd
