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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xicor/estimators.hpp"
#include "xicor/rng.hpp"
#include "xicor/sample.hpp"

// Synthetic joint laws with exact conditional structure, plus the Monte
// Carlo experiments built on them. Every family provides three mutually
// consistent views: a sampler, the marginal CDF F_Y, and the conditional
// survival G_x(t) = P(Y >= t | X = x); population quantities are evaluated
// from the latter two by adaptive quadrature, never from draws.

namespace xicor {

enum class ModelFamily {
  independent_uniform,
  gaussian_copula,
  noisy_function,
  exact_function,
  sphere_manifold,
};

enum class LinkFunction { linear, cubic, sine };

struct ModelSpec {
  ModelFamily family = ModelFamily::independent_uniform;
  int d = 1;                               // sphere_manifold requires d = 2
  double rho = 0.5;                        // gaussian_copula
  LinkFunction link = LinkFunction::cubic; // noisy / exact / sphere
  double sigma_e = 0.5;                    // noise sd for noisy / sphere
};

class Model {
 public:
  virtual ~Model() = default;

  const ModelSpec& spec() const { return spec_; }
  int d() const { return spec_.d; }
  std::string name() const;

  // Draw n i.i.d. observations from the joint law into a validated Sample.
  Sample sample(int64_t n, RngStream& rng) const;

  virtual double f_y(double t) const = 0;
  virtual double g_cond(double t, std::span<const double> x) const = 0;
  // h(t) = E[G_X(t)^2], evaluated by quadrature over the law of X.
  virtual double h(double t) const = 0;
  // E[g(Y)] = integral of g against F_Y.
  virtual double expect_over_y(const std::function<double(double)>& g,
                               double abs_tol) const = 0;

  virtual bool has_conditional_law() const { return true; }
  // True when Y is a measurable function of X (coefficient degenerates).
  virtual bool is_degenerate() const { return false; }

  // F_Y quantile by bisection.
  double quantile(double p) const;

 protected:
  explicit Model(const ModelSpec& spec) : spec_(spec) {}
  virtual void draw(int64_t n, RngStream& rng, std::vector<double>& x_flat,
                    std::vector<double>& y) const = 0;

  ModelSpec spec_;
};

// Validates parameters; throws InvalidModelParamError.
std::unique_ptr<Model> make_model(const ModelSpec& spec);

// Deterministic per (spec, n, seed); equals replicate 0 of an experiment
// run with the same seed.
Sample sample_model(const ModelSpec& spec, int64_t n, uint64_t seed);

// Population coefficient: 6 * E_Y[h(Y) - G(Y)^2]; the denominator of the
// defining ratio is identically 1/6 for continuous Y. Result in [0, 1].
double population_xi(const Model& model, double abs_tol = 1e-9);

// h cached on a 4096-point grid between the 1e-6 and 1-1e-6 quantiles of
// F_Y with monotone cubic interpolation; budgeted error 1e-6.
class HajekContext {
 public:
  explicit HajekContext(const Model& model, int grid_points = 4096);

  double h_interp(double t) const;
  double h_direct(double t) const { return model_->h(t); }
  double f_y(double t) const { return model_->f_y(t); }
  const Model& model() const { return *model_; }

 private:
  const Model* model_;
  std::vector<double> grid_t_, grid_h_, grid_slope_;
};

// Linearized surrogate (6n/(n^2-1)) * (sum_i F_Y(Y_i ^ Y_N(i)) + sum_i
// h(Y_i)); accepts either table kind.
double hajek_xi_star(const Sample& sample, const NeighborTable& table,
                     const HajekContext& ctx);

// Sup distance between the empirical CDF of `values` and the standard
// normal CDF.
double ks_statistic(std::vector<double> values);

struct ExperimentResult {
  // config echo
  std::string model_name;
  std::string experiment;  // "clt" or "coverage"
  int64_t n = 0;
  int64_t reps = 0;
  uint64_t seed = 0;
  EstimatorKind kind = EstimatorKind::right_nn;
  std::optional<double> alpha;
  std::optional<double> kappa;

  // per-replicate values (aggregates are recomputable from these)
  std::vector<double> coefficients;
  std::vector<double> variance_estimates;
  std::vector<uint8_t> ci_hits;     // coverage only
  std::vector<uint8_t> rejections;  // coverage with kappa only

  // aggregates
  double mean_coefficient = 0.0;
  double var_coefficient = 0.0;
  double n_var_mc = 0.0;
  double median_variance_est = 0.0;
  int64_t clamped_count = 0;
  std::optional<double> ks_standardized;
  std::optional<double> population_xi_value;  // coverage
  std::optional<double> coverage_rate;        // coverage
  std::optional<double> mean_ci_width;        // coverage
  std::optional<double> rejection_rate;       // coverage with kappa
};

// Per replicate: coefficient and variance estimate under `kind`; aggregates
// include n * Var_MC and the KS distance of (c_i - mean) / (sigma_i /
// sqrt(n)) against the standard normal (clamped replicates excluded and
// counted). Degenerate models are allowed; their KS value is meaningless
// but their variance decay is exactly what the experiment measures.
ExperimentResult run_clt_experiment(const Model& model, int64_t n,
                                    int64_t reps, uint64_t seed,
                                    EstimatorKind kind);

// d = 1, non-degenerate models only: right-NN CI coverage of the population
// coefficient at level 1 - alpha, plus the one-sided kappa test when kappa
// is given.
ExperimentResult run_coverage_experiment(
    const Model& model, int64_t n, int64_t reps, double alpha, uint64_t seed,
    std::optional<double> kappa = std::nullopt);

}  // namespace xicor
