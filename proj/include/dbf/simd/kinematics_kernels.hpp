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

#pragma once

// Batch Bézier kinematics over a fixed set of curve parameters.
//
// Every kernel evaluates, for each sample j, the same sequence of IEEE
// operations (multiply, fused multiply-adds in ascending control-point order,
// sqrt, divide), so all variants produce bit-identical results. Plain
// pointers only: the ISA-specific translation units must not instantiate
// shared inline templates.

#include <string_view>
#include <vector>

namespace dbf::simd {

/// Bernstein weights laid out row-major: row i holds b_{i,k}(s_j) for all j,
/// `stride` entries per row (stride is a multiple of 4 and >= samples;
/// padding lanes repeat the last sample).
struct BasisView {
  int order;    // k
  int samples;  // M
  int stride;
  const double* pos;  // k+1 rows of order-k weights
  const double* vel;  // k rows of order-(k-1) weights
  const double* acc;  // k-1 rows of order-(k-2) weights
};

/// Control points and their scaled differences: d[i] = k (c[i+1] - c[i]),
/// dd[i] = (k-1) (d[i+1] - d[i]).
struct CurveInput {
  const double* cx;
  const double* cy;
  const double* dcx;
  const double* dcy;
  const double* ddcx;
  const double* ddcy;
  double inv_dt;
  double inv_dt2;
};

/// Output arrays, each with room for `stride` values.
struct KinematicsOut {
  double* x;
  double* y;
  double* speed;
  double* a_long;
  double* a_cent;
};

using KinematicsKernel = void (*)(const BasisView&, const CurveInput&, const KinematicsOut&);

struct KernelInfo {
  const char* name;
  KinematicsKernel fn;
};

void kinematics_scalar(const BasisView& basis, const CurveInput& curve, const KinematicsOut& out);
#if defined(DBF_HAVE_AVX2_KERNEL)
void kinematics_avx2(const BasisView& basis, const CurveInput& curve, const KinematicsOut& out);
#endif

/// Best kernel for this CPU; `DBF_SIMD=scalar` in the environment forces the
/// reference kernel.
const KernelInfo& active_kinematics_kernel();

/// Kernels usable on this CPU, reference kernel first.
std::vector<KernelInfo> available_kinematics_kernels();

/// nullptr when the named kernel is unknown or unsupported here.
const KernelInfo* find_kinematics_kernel(std::string_view name);

}  // namespace dbf::simd
