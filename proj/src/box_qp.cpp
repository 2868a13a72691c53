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

#include "dbf/box_qp.hpp"

#include <Eigen/SparseCholesky>
#include <vector>

#include "dbf/errors.hpp"

namespace dbf {

namespace {

enum class Bound : signed char { kFree = 0, kLower = -1, kUpper = 1 };

}  // namespace

BoxQpResult solve_box_qp(const Eigen::SparseMatrix<double>& H, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int max_iterations) {
  const Eigen::Index n = g.size();
  if (H.rows() != n || H.cols() != n || lower.size() != n || upper.size() != n)
    throw SolverError("box QP dimension mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (lower(i) > upper(i)) throw SolverError("box QP infeasible: lower bound above upper bound");

  const double c = H.diagonal().cwiseAbs().mean() > 0.0 ? H.diagonal().cwiseAbs().mean() : 1.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n).cwiseMax(lower).cwiseMin(upper);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
  std::vector<Bound> state(static_cast<std::size_t>(n), Bound::kFree);
  std::vector<Bound> next(state.size());
  std::vector<Eigen::Index> free_index(static_cast<std::size_t>(n));

  BoxQpResult result;
  for (int it = 0; it < max_iterations; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Bound b = Bound::kFree;
      if (lambda(i) + c * (x(i) - upper(i)) > 0.0) b = Bound::kUpper;
      else if (lambda(i) + c * (x(i) - lower(i)) < 0.0) b = Bound::kLower;
      next[static_cast<std::size_t>(i)] = b;
    }
    if (it > 0 && next == state) {
      result.converged = true;
      result.iterations = it;
      break;
    }
    state = next;

    Eigen::Index n_free = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Bound b = state[static_cast<std::size_t>(i)];
      free_index[static_cast<std::size_t>(i)] = b == Bound::kFree ? n_free++ : -1;
      if (b == Bound::kUpper) x(i) = upper(i);
      if (b == Bound::kLower) x(i) = lower(i);
    }

    if (n_free > 0) {
      std::vector<Eigen::Triplet<double>> trip;
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index fi = free_index[static_cast<std::size_t>(i)];
        if (fi >= 0) rhs(fi) = -g(i);
      }
      for (int col = 0; col < H.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator itr(H, col); itr; ++itr) {
          const Eigen::Index r = itr.row();
          const Eigen::Index fr = free_index[static_cast<std::size_t>(r)];
          const Eigen::Index fc = free_index[static_cast<std::size_t>(col)];
          if (fr < 0) continue;
          if (fc >= 0) trip.emplace_back(fr, fc, itr.value());
          else rhs(fr) -= itr.value() * x(col);
        }
      }
      Eigen::SparseMatrix<double> Hff(n_free, n_free);
      Hff.setFromTriplets(trip.begin(), trip.end());
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Hff);
      if (ldlt.info() != Eigen::Success) throw SolverError("box QP reduced Hessian is not positive definite");
      const Eigen::VectorXd xf = ldlt.solve(rhs);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index fi = free_index[static_cast<std::size_t>(i)];
        if (fi >= 0) x(i) = xf(fi);
      }
    }
    const Eigen::VectorXd grad = H * x + g;
    for (Eigen::Index i = 0; i < n; ++i)
      lambda(i) = state[static_cast<std::size_t>(i)] == Bound::kFree ? 0.0 : -grad(i);
    result.iterations = it + 1;
  }
  result.x = x.cwiseMax(lower).cwiseMin(upper);
  return result;
}

}  // namespace dbf
