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

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace dbf {

struct BoxQpResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes 0.5 x'Hx + g'x subject to lower <= x <= upper for symmetric
/// positive definite sparse H, by a primal-dual active-set iteration.
/// Throws SolverError when lower > upper somewhere.
BoxQpResult solve_box_qp(const Eigen::SparseMatrix<double>& H, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, int max_iterations = 100);

}  // namespace dbf
