// Copyright 2026 the xicor authors
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
#include <span>
#include <string>

#include "xicor/errors.hpp"
#include "xicor/estimators.hpp"

// Asymptotic inference for the dependence coefficients: normal-quantile
// confidence intervals, the one-sided threshold test, and the dimension
// constants q_d / o_d behind the null asymptotic variances
//
//   right-NN: 2/5           NN: 2/5 + (2/5) q_d + (4/5) o_d
//
// with q_d = 1 / (2 - I_{3/4}((d+1)/2, 1/2)) and o_d the integral of
// exp(-vol(B(w1,|w1|) u B(w2,|w2|))) over pairs where each point is closer
// to the origin than to the other point.

namespace xicor {

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;          // 1 - alpha
  std::string target_note;     // "xi" for d = 1, "E[xi_n]" for d > 1
};

struct TestResult {
  bool reject = false;
  double kappa = 0.0;
  double threshold = 0.0;
  double level = 0.0;  // 1 - alpha
};

struct AsymptoticConstants {
  int d = 0;
  double q_d = 0.0;
  double o_d = 0.0;
  double o_d_stderr = 0.0;
  double null_variance = 0.0;  // NN version
};

struct McEstimate {
  double value = 0.0;
  double stderr = 0.0;
};

// Standard normal CDF (erfc based) and density.
double normal_cdf(double x);
double normal_pdf(double x);

// Inverse standard normal CDF, |error| <= 1e-9 (rational approximation).
// Throws OutOfDomainError for p outside (0, 1).
double normal_quantile(double p);

// Regularized incomplete beta I_x(a, b) by continued fraction, relative
// error <= 1e-10.
double regularized_incomplete_beta(double x, double a, double b);

// q_d: limiting probability that a point is its NN's NN; in (1/2, 2/3].
double q_constant(int d);

// Volume of the d-dimensional unit ball.
double unit_ball_volume(int d);

// Lebesgue measure of B(w1, |w1|) u B(w2, |w2|); the lens intersection is
// two spherical caps evaluated through the incomplete beta.
double ball_union_volume(std::span<const double> w1,
                         std::span<const double> w2);

// Importance-sampled o_d with standard error. Deterministic per (d, samples,
// seed); each sample draws from the density exp(-V_d |w|^d) per point, so
// the weight reduces to exp(vol of the lens overlap).
McEstimate o_constant_mc(int d, int64_t samples, uint64_t seed);

// Null asymptotic variance of sqrt(n) * coefficient under independence.
// o_d is computed once per dimension (2e6 samples) and cached.
double null_asymptotic_variance(int d, EstimatorKind kind);

// q_d, o_d (cached), and the NN null variance bundled for reporting.
AsymptoticConstants asymptotic_constants(int d);

// Two-sided CI: coefficient +- z_{1-alpha/2} * sqrt(variance_est / n).
// variance_est must be the clamped (non-negative) value; a negative input
// throws NegativeVarianceError so the clamping decision stays explicit.
ConfidenceInterval confidence_interval(double coefficient, double variance_est,
                                       int64_t n, double alpha, int d);

// One-sided test of H0: xi <= kappa; rejects when the coefficient exceeds
// kappa + z_{1-alpha} * sqrt(variance_est / n).
TestResult threshold_test(double coefficient, double variance_est, int64_t n,
                          double kappa, double alpha);

}  // namespace xicor
