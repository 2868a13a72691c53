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

#include "dbf/curve_sampler.hpp"

#include <span>
#include <string>

#include "dbf/errors.hpp"

namespace dbf {

namespace {

// rows x stride table of order-k weights; padding lanes repeat the last sample
std::vector<double> basis_table(int k, const std::vector<double>& params, int stride) {
  if (k < 0) return {};
  const int m = static_cast<int>(params.size());
  std::vector<double> table(static_cast<std::size_t>((k + 1) * stride));
  std::vector<double> w(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j < stride; ++j) {
    const double s = params[static_cast<std::size_t>(std::min(j, m - 1))];
    bernstein_basis(k, s, w);
    for (int i = 0; i <= k; ++i) table[static_cast<std::size_t>(i * stride + j)] = w[static_cast<std::size_t>(i)];
  }
  return table;
}

}  // namespace

CurveSampler::CurveSampler(int order, int samples, const simd::KernelInfo* kernel)
    : order_(order), samples_(samples), stride_((samples + 3) / 4 * 4),
      kernel_(kernel != nullptr ? kernel : &simd::active_kinematics_kernel()) {
  if (order < 0) throw ValidationError("sampler order must be >= 0");
  if (samples < 2) throw ValidationError("sampler needs at least 2 samples");
  params_.resize(static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) params_[static_cast<std::size_t>(j)] = static_cast<double>(j) / (samples - 1);
  params_.back() = 1.0;
  pos_ = basis_table(order, params_, stride_);
  vel_ = basis_table(order - 1, params_, stride_);
  acc_ = basis_table(order - 2, params_, stride_);
}

void CurveSampler::evaluate(const BezierCurve& curve, CurveKinematics& out) const {
  if (curve.order() != order_)
    throw ValidationError("sampler built for order " + std::to_string(order_) + ", curve has order " +
                          std::to_string(curve.order()));
  const int k = order_;
  const auto stride = static_cast<std::size_t>(stride_);
  out.samples = samples_;
  for (auto* v : {&out.x, &out.y, &out.speed, &out.a_long, &out.a_cent}) v->resize(stride);
  out.cx.resize(static_cast<std::size_t>(k) + 1);
  out.cy.resize(static_cast<std::size_t>(k) + 1);
  out.dcx.resize(static_cast<std::size_t>(k) + 1);
  out.dcy.resize(static_cast<std::size_t>(k) + 1);
  out.ddcx.resize(static_cast<std::size_t>(k) + 1);
  out.ddcy.resize(static_cast<std::size_t>(k) + 1);

  const auto cps = curve.control_points();
  for (int i = 0; i <= k; ++i) {
    out.cx[static_cast<std::size_t>(i)] = cps[static_cast<std::size_t>(i)].x();
    out.cy[static_cast<std::size_t>(i)] = cps[static_cast<std::size_t>(i)].y();
  }
  for (int i = 0; i < k; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out.dcx[u] = k * (out.cx[u + 1] - out.cx[u]);
    out.dcy[u] = k * (out.cy[u + 1] - out.cy[u]);
  }
  for (int i = 0; i + 1 < k; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out.ddcx[u] = (k - 1) * (out.dcx[u + 1] - out.dcx[u]);
    out.ddcy[u] = (k - 1) * (out.dcy[u + 1] - out.dcy[u]);
  }

  const double inv_dt = 1.0 / curve.delta_t();
  const simd::BasisView basis{k, samples_, stride_, pos_.data(), vel_.data(), acc_.data()};
  const simd::CurveInput in{out.cx.data(), out.cy.data(), out.dcx.data(), out.dcy.data(),
                            out.ddcx.data(), out.ddcy.data(), inv_dt, inv_dt * inv_dt};
  const simd::KinematicsOut dst{out.x.data(), out.y.data(), out.speed.data(), out.a_long.data(),
                                out.a_cent.data()};
  kernel_->fn(basis, in, dst);
}

}  // namespace dbf
