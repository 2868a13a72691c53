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

#include <cstdint>
#include <string>
#include <vector>

#include "dbf/bezier.hpp"
#include "dbf/curve_sampler.hpp"
#include "dbf/envelope.hpp"
#include "dbf/prob_bezier.hpp"
#include "dbf/raceline.hpp"
#include "dbf/random.hpp"
#include "dbf/track.hpp"

namespace dbf {

struct DbfConfig {
  double beta1 = 1.75;   // centripetal violation
  double beta2 = 2.5;    // longitudinal violation
  double beta3 = 3.5;    // boundary distance
  double d_min = -0.875; // m
  int n_samples = 250;
  int n_iterations = 5;
  int curve_samples = 60;  // M
  double a_c_max = kDefaultCentripetalLimit;
  double speed_scale = 1.15;
  std::uint64_t seed = 0;
  double prior_variance = 1.0;  // m^2, isotropic, restored every iteration
  double tolerance = 1e-3;      // m, early stop on control-point motion
  int workers = 1;
  int pinned_points = 1;  // leading control points copied from the prior mean

  /// Throws ValidationError.
  void validate() const;
};

/// What the filter conditions on. References must outlive the evidence.
struct Evidence {
  const Track& track;
  const AccelEnvelope& envelope;
  double a_c_max;
  double d_min;
};

/// Feasibility of one curve: the max over the M samples of each quantity.
/// Infinite accelerations mark a curve with a vanishing-speed sample.
struct CurveViolations {
  double delta_a_c = 0.0;
  double delta_a_l = 0.0;
  double distance = 0.0;
  bool degenerate = false;
};

CurveViolations curve_violations(const CurveSampler& sampler, CurveKinematics& scratch, const BezierCurve& curve,
                                 const Evidence& ev);

/// max a_c - a_c_max over M uniform samples; +inf for a degenerate curve.
double delta_a_c(const BezierCurve& curve, double a_c_max, int samples);
/// max envelope excess of a_l over M uniform samples; +inf for a degenerate curve.
double delta_a_l(const BezierCurve& curve, const AccelEnvelope& envelope, int samples);

struct Likelihood {
  double l1 = 1.0;
  double l2 = 1.0;
  double l3 = 1.0;
  double product = 1.0;
  double log_product = 0.0;
};

Likelihood likelihood_from_violations(const CurveViolations& v, const DbfConfig& cfg, double d_min);
Likelihood likelihood(const BezierCurve& curve, const Evidence& ev, const DbfConfig& cfg);

/// Control-point means from the raceline segment starting nearest the
/// vehicle, perturbed (except C0) by isotropic noise of std `noise_sigma`,
/// with covariance prior_variance * I and delta_t = horizon / speed_scale.
ProbBezierCurve oracle_prior(const RacelineProfile& profile, const Vec2& vehicle_position, const DbfConfig& cfg,
                             double speed_scale, double noise_sigma, RandomStream& rng,
                             double horizon = kDefaultHorizon, int order = 7);
/// Same with cfg.speed_scale.
ProbBezierCurve oracle_prior(const RacelineProfile& profile, const Vec2& vehicle_position, const DbfConfig& cfg,
                             double noise_sigma, RandomStream& rng);

struct FactorStats {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

struct DbfDiagnostics {
  int iteration = 0;
  double ess = 0.0;
  double weight_sum = 0.0;  // sum of normalized weights
  FactorStats l1, l2, l3;
  CurveViolations posterior;
  double displacement = 0.0;  // max control-point move from the prior mean

  std::string to_json_line() const;
};

struct DbfStepResult {
  BezierCurve posterior_mean;
  DbfDiagnostics diagnostics;
  std::vector<double> weights;  // normalized, in sample order
};

/// One importance-weighting pass of N sampled curves. The first
/// cfg.pinned_points control points of every sample and of the result equal
/// the prior mean's. Sample i draws from
/// RandomStream::substream(base, i) with base taken from `rng`, so results
/// do not depend on cfg.workers.
DbfStepResult dbf_step(const ProbBezierCurve& prior, const Evidence& ev, const DbfConfig& cfg, RandomStream& rng);

/// Repeated dbf_step, re-centering on each posterior mean with covariance
/// prior_variance * I, until n_iterations or the mean moves < tolerance.
BezierCurve dbf_run(const ProbBezierCurve& prior, const Evidence& ev, const DbfConfig& cfg, RandomStream& rng,
                    std::vector<DbfDiagnostics>* diagnostics = nullptr);

}  // namespace dbf
