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

#include "xicor/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "xicor/inference.hpp"
#include "xicor/neighbors.hpp"
#include "xicor/quadrature.hpp"

namespace xicor {
namespace {

constexpr double kTwoPi = 6.28318530717958647692;
// Standard-normal integrands are truncated where the density is ~1e-18.
constexpr double kNormalCut = 9.0;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

double link_eval(LinkFunction f, double v) {
  switch (f) {
    case LinkFunction::linear:
      return v;
    case LinkFunction::cubic:
      return v * v * v;
    case LinkFunction::sine:
      return std::sin(kTwoPi * v);
  }
  return v;
}

const char* link_name(LinkFunction f) {
  switch (f) {
    case LinkFunction::linear:
      return "linear";
    case LinkFunction::cubic:
      return "cubic";
    case LinkFunction::sine:
      return "sine";
  }
  return "?";
}

std::string format_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

class IndependentUniformModel final : public Model {
 public:
  explicit IndependentUniformModel(const ModelSpec& spec) : Model(spec) {
    if (spec.d < 1) {
      throw InvalidModelParamError("independent_uniform requires d >= 1");
    }
  }

  double f_y(double t) const override { return clamp01(t); }
  double g_cond(double t, std::span<const double>) const override {
    return 1.0 - clamp01(t);
  }
  double h(double t) const override {
    const double g = 1.0 - clamp01(t);
    return g * g;
  }
  double expect_over_y(const std::function<double(double)>& g,
                       double abs_tol) const override {
    return integrate(g, 0.0, 1.0, abs_tol);
  }

 protected:
  void draw(int64_t n, RngStream& rng, std::vector<double>& x,
            std::vector<double>& y) const override {
    for (int64_t i = 0; i < n; ++i) {
      for (int c = 0; c < spec_.d; ++c) {
        x[i * spec_.d + c] = rng.uniform();
      }
      y[i] = rng.uniform();
    }
  }
};

class GaussianCopulaModel final : public Model {
 public:
  explicit GaussianCopulaModel(const ModelSpec& spec)
      : Model(spec), tau_(std::sqrt(1.0 - spec.rho * spec.rho)) {
    if (spec.d != 1) {
      throw InvalidModelParamError("gaussian_copula requires d = 1");
    }
    if (!(std::abs(spec.rho) < 1.0)) {
      throw InvalidModelParamError("gaussian_copula requires |rho| < 1");
    }
  }

  double f_y(double t) const override { return normal_cdf(t); }
  double g_cond(double t, std::span<const double> x) const override {
    return normal_cdf((spec_.rho * x[0] - t) / tau_);
  }
  double h(double t) const override {
    const double rho = spec_.rho;
    const double tau = tau_;
    return integrate(
        [t, rho, tau](double z) {
          const double g = normal_cdf((rho * z - t) / tau);
          return normal_pdf(z) * g * g;
        },
        -kNormalCut, kNormalCut, 1e-10);
  }
  double expect_over_y(const std::function<double(double)>& g,
                       double abs_tol) const override {
    return integrate([&g](double t) { return normal_pdf(t) * g(t); },
                     -kNormalCut, kNormalCut, abs_tol);
  }

 protected:
  void draw(int64_t n, RngStream& rng, std::vector<double>& x,
            std::vector<double>& y) const override {
    for (int64_t i = 0; i < n; ++i) {
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      x[i] = z1;
      y[i] = spec_.rho * z1 + tau_ * z2;
    }
  }

 private:
  double tau_;
};

class NoisyFunctionModel final : public Model {
 public:
  explicit NoisyFunctionModel(const ModelSpec& spec) : Model(spec) {
    if (spec.d != 1) {
      throw InvalidModelParamError("noisy_function requires d = 1");
    }
    if (!(spec.sigma_e > 0.0)) {
      throw InvalidModelParamError("noisy_function requires sigma_e > 0");
    }
  }

  double f_y(double t) const override {
    const double s = spec_.sigma_e;
    const LinkFunction f = spec_.link;
    return integrate(
        [t, s, f](double x) { return normal_cdf((t - link_eval(f, x)) / s); },
        0.0, 1.0, 1e-10);
  }
  double g_cond(double t, std::span<const double> x) const override {
    return normal_cdf((link_eval(spec_.link, x[0]) - t) / spec_.sigma_e);
  }
  double h(double t) const override {
    const double s = spec_.sigma_e;
    const LinkFunction f = spec_.link;
    return integrate(
        [t, s, f](double x) {
          const double g = normal_cdf((link_eval(f, x) - t) / s);
          return g * g;
        },
        0.0, 1.0, 1e-10);
  }
  double expect_over_y(const std::function<double(double)>& g,
                       double abs_tol) const override {
    const double s = spec_.sigma_e;
    const LinkFunction f = spec_.link;
    return integrate(
        [&g, s, f, abs_tol](double x) {
          const double fx = link_eval(f, x);
          return integrate(
              [&g, fx, s](double z) { return normal_pdf(z) * g(fx + s * z); },
              -kNormalCut, kNormalCut, 0.1 * abs_tol);
        },
        0.0, 1.0, abs_tol);
  }

 protected:
  void draw(int64_t n, RngStream& rng, std::vector<double>& x,
            std::vector<double>& y) const override {
    for (int64_t i = 0; i < n; ++i) {
      x[i] = rng.uniform();
      y[i] = link_eval(spec_.link, x[i]) + spec_.sigma_e * rng.normal();
    }
  }
};

class ExactFunctionModel final : public Model {
 public:
  explicit ExactFunctionModel(const ModelSpec& spec) : Model(spec) {
    if (spec.d != 1) {
      throw InvalidModelParamError("exact_function requires d = 1");
    }
    if (spec.link == LinkFunction::sine) {
      throw InvalidModelParamError(
          "exact_function needs a strictly increasing link (linear or cubic)");
    }
  }

  double f_y(double t) const override {
    // Inverse of the monotone link, clamped to [0, 1].
    if (spec_.link == LinkFunction::linear) {
      return clamp01(t);
    }
    return clamp01(std::cbrt(t));
  }
  double g_cond(double t, std::span<const double> x) const override {
    return link_eval(spec_.link, x[0]) >= t ? 1.0 : 0.0;
  }
  double h(double t) const override { return 1.0 - f_y(t); }
  double expect_over_y(const std::function<double(double)>& g,
                       double abs_tol) const override {
    const LinkFunction f = spec_.link;
    return integrate([&g, f](double x) { return g(link_eval(f, x)); }, 0.0,
                     1.0, abs_tol);
  }
  bool is_degenerate() const override { return true; }

 protected:
  void draw(int64_t n, RngStream& rng, std::vector<double>& x,
            std::vector<double>& y) const override {
    for (int64_t i = 0; i < n; ++i) {
      x[i] = rng.uniform();
      y[i] = link_eval(spec_.link, x[i]);
    }
  }
};

// X uniform on the unit circle in R^2; Y = link(sin theta) + sigma_e * Z.
// The link argument is the second coordinate, so G_x stays an explicit
// function of the observed point.
class SphereManifoldModel final : public Model {
 public:
  explicit SphereManifoldModel(const ModelSpec& spec) : Model(spec) {
    if (spec.d != 2) {
      throw InvalidModelParamError(
          "sphere_manifold supports the unit circle only (d = 2)");
    }
    if (!(spec.sigma_e > 0.0)) {
      throw InvalidModelParamError("sphere_manifold requires sigma_e > 0");
    }
  }

  double f_y(double t) const override {
    const double s = spec_.sigma_e;
    const LinkFunction f = spec_.link;
    return integrate(
               [t, s, f](double theta) {
                 return normal_cdf((t - link_eval(f, std::sin(theta))) / s);
               },
               0.0, kTwoPi, 1e-10) /
           kTwoPi;
  }
  double g_cond(double t, std::span<const double> x) const override {
    return normal_cdf((link_eval(spec_.link, x[1]) - t) / spec_.sigma_e);
  }
  double h(double t) const override {
    const double s = spec_.sigma_e;
    const LinkFunction f = spec_.link;
    return integrate(
               [t, s, f](double theta) {
                 const double g =
                     normal_cdf((link_eval(f, std::sin(theta)) - t) / s);
                 return g * g;
               },
               0.0, kTwoPi, 1e-10) /
           kTwoPi;
  }
  double expect_over_y(const std::function<double(double)>& g,
                       double abs_tol) const override {
    const double s = spec_.sigma_e;
    const LinkFunction f = spec_.link;
    return integrate(
               [&g, s, f, abs_tol](double theta) {
                 const double fv = link_eval(f, std::sin(theta));
                 return integrate(
                     [&g, fv, s](double z) {
                       return normal_pdf(z) * g(fv + s * z);
                     },
                     -kNormalCut, kNormalCut, 0.1 * abs_tol);
               },
               0.0, kTwoPi, abs_tol * kTwoPi) /
           kTwoPi;
  }

 protected:
  void draw(int64_t n, RngStream& rng, std::vector<double>& x,
            std::vector<double>& y) const override {
    for (int64_t i = 0; i < n; ++i) {
      const double theta = kTwoPi * rng.uniform();
      x[i * 2] = std::cos(theta);
      x[i * 2 + 1] = std::sin(theta);
      y[i] =
          link_eval(spec_.link, std::sin(theta)) + spec_.sigma_e * rng.normal();
    }
  }
};

int worker_count(int64_t reps) {
  const char* env = std::getenv("XICOR_THREADS");
  int threads = 0;
  if (env != nullptr) {
    threads = std::atoi(env);
  }
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
  }
  if (threads <= 0) {
    threads = 1;
  }
  return static_cast<int>(std::min<int64_t>(threads, reps));
}

// Replicates are handed out by index; results land in preallocated slots,
// so the outcome is identical for any thread count.
void parallel_replicates(int64_t reps,
                         const std::function<void(int64_t)>& body) {
  const int threads = worker_count(reps);
  if (threads <= 1) {
    for (int64_t r = 0; r < reps; ++r) {
      body(r);
    }
    return;
  }
  std::atomic<int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int64_t r = next.fetch_add(1);
      if (r >= reps) {
        return;
      }
      try {
        body(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        next.store(reps);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  for (auto& th : pool) {
    th.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

double mean_of(const std::vector<double>& v) {
  CompensatedSum s;
  for (double x : v) {
    s.add(x);
  }
  return s.value() / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v, double mean) {
  CompensatedSum ss;
  for (double x : v) {
    const double c = x - mean;
    ss.add(c * c);
  }
  return ss.value() / static_cast<double>(v.size() - 1);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  if (m % 2 == 1) {
    return v[m / 2];
  }
  return 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

void fill_common_aggregates(ExperimentResult& res, int64_t n) {
  res.mean_coefficient = mean_of(res.coefficients);
  res.var_coefficient = variance_of(res.coefficients, res.mean_coefficient);
  res.n_var_mc = static_cast<double>(n) * res.var_coefficient;
  res.median_variance_est = median_of(res.variance_estimates);
  res.clamped_count = 0;
  std::vector<double> standardized;
  standardized.reserve(res.coefficients.size());
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < res.coefficients.size(); ++i) {
    const double var = res.variance_estimates[i];
    if (var <= 0.0) {
      res.clamped_count += 1;
      continue;
    }
    standardized.push_back((res.coefficients[i] - res.mean_coefficient) *
                           sqrt_n / std::sqrt(var));
  }
  if (standardized.size() >= 2) {
    res.ks_standardized = ks_statistic(std::move(standardized));
  }
}

}  // namespace

std::string Model::name() const {
  switch (spec_.family) {
    case ModelFamily::independent_uniform:
      return "independent_uniform(d=" + std::to_string(spec_.d) + ")";
    case ModelFamily::gaussian_copula:
      return "gaussian_copula(rho=" + format_param(spec_.rho) + ")";
    case ModelFamily::noisy_function:
      return std::string("noisy_function(link=") + link_name(spec_.link) +
             ",sigma_e=" + format_param(spec_.sigma_e) + ")";
    case ModelFamily::exact_function:
      return std::string("exact_function(link=") + link_name(spec_.link) + ")";
    case ModelFamily::sphere_manifold:
      return std::string("sphere_manifold(d=2,link=") + link_name(spec_.link) +
             ",sigma_e=" + format_param(spec_.sigma_e) + ")";
  }
  return "?";
}

Sample Model::sample(int64_t n, RngStream& rng) const {
  if (n < 1) {
    throw EmptySampleError("sample size must be >= 1");
  }
  std::vector<double> x(static_cast<std::size_t>(n) * spec_.d);
  std::vector<double> y(n);
  draw(n, rng, x, y);
  return validate_sample(std::move(x), std::move(y), spec_.d);
}

double Model::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw OutOfDomainError("quantile requires p in (0, 1)");
  }
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < 80 && f_y(lo) > p; ++i) {
    lo *= 2.0;
  }
  for (int i = 0; i < 80 && f_y(hi) < p; ++i) {
    hi *= 2.0;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f_y(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::unique_ptr<Model> make_model(const ModelSpec& spec) {
  switch (spec.family) {
    case ModelFamily::independent_uniform:
      return std::make_unique<IndependentUniformModel>(spec);
    case ModelFamily::gaussian_copula:
      return std::make_unique<GaussianCopulaModel>(spec);
    case ModelFamily::noisy_function:
      return std::make_unique<NoisyFunctionModel>(spec);
    case ModelFamily::exact_function:
      return std::make_unique<ExactFunctionModel>(spec);
    case ModelFamily::sphere_manifold:
      return std::make_unique<SphereManifoldModel>(spec);
  }
  throw InvalidModelParamError("unknown model family");
}

Sample sample_model(const ModelSpec& spec, int64_t n, uint64_t seed) {
  const auto model = make_model(spec);
  RngStream rng(seed, 0);
  return model->sample(n, rng);
}

double population_xi(const Model& model, double abs_tol) {
  const double numerator = model.expect_over_y(
      [&model](double t) {
        const double g = 1.0 - model.f_y(t);
        return model.h(t) - g * g;
      },
      abs_tol);
  // Ratio against the universal denominator 1/6 of continuous responses.
  return clamp01(6.0 * numerator);
}

HajekContext::HajekContext(const Model& model, int grid_points)
    : model_(&model) {
  if (!model.has_conditional_law()) {
    throw ModelLacksConditionalError(
        "model cannot evaluate its conditional law");
  }
  if (grid_points < 4) {
    throw OutOfDomainError("HajekContext needs at least 4 grid points");
  }
  const double t_lo = model.quantile(1e-6);
  const double t_hi = model.quantile(1.0 - 1e-6);
  const int m = grid_points;
  grid_t_.resize(m);
  grid_h_.resize(m);
  grid_slope_.resize(m);
  const double step = (t_hi - t_lo) / (m - 1);
  for (int k = 0; k < m; ++k) {
    grid_t_[k] = t_lo + step * k;
    grid_h_[k] = model.h(grid_t_[k]);
  }
  // Fritsch-Carlson monotone slopes (uniform spacing).
  std::vector<double> delta(m - 1);
  for (int k = 0; k + 1 < m; ++k) {
    delta[k] = (grid_h_[k + 1] - grid_h_[k]) / step;
  }
  auto endpoint = [](double d0, double d1) {
    double s = 0.5 * (3.0 * d0 - d1);
    if (s * d0 <= 0.0) {
      return 0.0;
    }
    if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0)) {
      return 3.0 * d0;
    }
    return s;
  };
  grid_slope_[0] = endpoint(delta[0], delta[1]);
  grid_slope_[m - 1] = endpoint(delta[m - 2], delta[m - 3]);
  for (int k = 1; k + 1 < m; ++k) {
    const double d0 = delta[k - 1];
    const double d1 = delta[k];
    grid_slope_[k] = d0 * d1 <= 0.0 ? 0.0 : 2.0 * d0 * d1 / (d0 + d1);
  }
}

double HajekContext::h_interp(double t) const {
  const std::size_t m = grid_t_.size();
  if (t <= grid_t_.front()) {
    return grid_h_.front();
  }
  if (t >= grid_t_.back()) {
    return grid_h_.back();
  }
  const std::size_t k =
      std::upper_bound(grid_t_.begin(), grid_t_.end(), t) - grid_t_.begin() - 1;
  const std::size_t k1 = std::min(k + 1, m - 1);
  const double dt = grid_t_[k1] - grid_t_[k];
  const double s = (t - grid_t_[k]) / dt;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2.0 * s3 - 3.0 * s2 + 1.0) * grid_h_[k] +
         (s3 - 2.0 * s2 + s) * dt * grid_slope_[k] +
         (-2.0 * s3 + 3.0 * s2) * grid_h_[k1] + (s3 - s2) * dt * grid_slope_[k1];
}

double hajek_xi_star(const Sample& sample, const NeighborTable& table,
                     const HajekContext& ctx) {
  const int64_t n = sample.n();
  if (table.n != n) {
    throw DimensionMismatchError("table and sample sizes differ");
  }
  const int32_t* nbr = table.column(1);
  CompensatedSum acc;
  for (int64_t i = 0; i < n; ++i) {
    const double y_min = std::min(sample.y(i), sample.y(nbr[i]));
    acc.add(ctx.f_y(y_min));
    acc.add(ctx.h_interp(sample.y(i)));
  }
  const double nd = static_cast<double>(n);
  return 6.0 * nd / (nd * nd - 1.0) * acc.value();
}

double ks_statistic(std::vector<double> values) {
  if (values.size() < 2) {
    throw TooFewValuesError("ks_statistic needs at least 2 values");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NonFiniteValueError("ks_statistic requires finite values");
    }
  }
  std::sort(values.begin(), values.end());
  const double m = static_cast<double>(values.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cdf = normal_cdf(values[i]);
    dist = std::max(dist, (static_cast<double>(i) + 1.0) / m - cdf);
    dist = std::max(dist, cdf - static_cast<double>(i) / m);
  }
  return dist;
}

ExperimentResult run_clt_experiment(const Model& model, int64_t n,
                                    int64_t reps, uint64_t seed,
                                    EstimatorKind kind) {
  if (reps < 2) {
    throw OutOfDomainError("run_clt_experiment needs reps >= 2");
  }
  if (kind == EstimatorKind::right_nn && model.d() != 1) {
    throw NotUnivariateError("right-NN experiments require d = 1");
  }

  ExperimentResult res;
  res.model_name = model.name();
  res.experiment = "clt";
  res.n = n;
  res.reps = reps;
  res.seed = seed;
  res.kind = kind;
  res.coefficients.resize(reps);
  res.variance_estimates.resize(reps);

  parallel_replicates(reps, [&](int64_t r) {
    RngStream rng(seed, static_cast<uint64_t>(r));
    const Sample s = model.sample(n, rng);
    const RankVector ranks = compute_ranks(s);
    if (kind == EstimatorKind::right_nn) {
      const NeighborTable table = build_right_nn_table(s, 3);
      res.coefficients[r] = xi_bar_n(ranks, table);
      res.variance_estimates[r] =
          sigma_bar_hat_sq(ranks, table, Mode::optimized);
    } else {
      const NeighborTable table = build_nn_table(s, 3);
      res.coefficients[r] = xi_n(ranks, table);
      res.variance_estimates[r] = sigma_hat_sq(ranks, table, Mode::optimized);
    }
  });

  fill_common_aggregates(res, n);
  return res;
}

ExperimentResult run_coverage_experiment(const Model& model, int64_t n,
                                         int64_t reps, double alpha,
                                         uint64_t seed,
                                         std::optional<double> kappa) {
  if (reps < 2) {
    throw OutOfDomainError("run_coverage_experiment needs reps >= 2");
  }
  if (model.d() != 1) {
    throw NotUnivariateError("coverage experiments require d = 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw OutOfDomainError("alpha must be in (0, 1)");
  }
  if (model.is_degenerate()) {
    throw DegenerateModelError(
        "coverage is undefined for a degenerate (exact-function) model: the "
        "coefficient collapses to a constant");
  }
  if (kappa.has_value() && *kappa >= 1.0) {
    throw InvalidKappaError("kappa must be < 1");
  }

  ExperimentResult res;
  res.model_name = model.name();
  res.experiment = "coverage";
  res.n = n;
  res.reps = reps;
  res.seed = seed;
  res.kind = EstimatorKind::right_nn;
  res.alpha = alpha;
  res.kappa = kappa;
  res.coefficients.resize(reps);
  res.variance_estimates.resize(reps);
  res.ci_hits.resize(reps);
  if (kappa.has_value()) {
    res.rejections.resize(reps);
  }

  const double xi_pop = population_xi(model);
  res.population_xi_value = xi_pop;
  std::vector<double> widths(reps);

  parallel_replicates(reps, [&](int64_t r) {
    RngStream rng(seed, static_cast<uint64_t>(r));
    const Sample s = model.sample(n, rng);
    const RankVector ranks = compute_ranks(s);
    const NeighborTable table = build_right_nn_table(s, 3);
    const double coeff = xi_bar_n(ranks, table);
    const double var = sigma_bar_hat_sq(ranks, table, Mode::optimized);
    res.coefficients[r] = coeff;
    res.variance_estimates[r] = var;
    const double var_clamped = std::max(0.0, var);
    const ConfidenceInterval ci =
        confidence_interval(coeff, var_clamped, n, alpha, 1);
    res.ci_hits[r] = ci.lower <= xi_pop && xi_pop <= ci.upper ? 1 : 0;
    widths[r] = ci.upper - ci.lower;
    if (kappa.has_value()) {
      res.rejections[r] =
          threshold_test(coeff, var_clamped, n, *kappa, alpha).reject ? 1 : 0;
    }
  });

  fill_common_aggregates(res, n);
  int64_t hits = 0;
  for (uint8_t h : res.ci_hits) {
    hits += h;
  }
  res.coverage_rate = static_cast<double>(hits) / static_cast<double>(reps);
  res.mean_ci_width = mean_of(widths);
  if (kappa.has_value()) {
    int64_t rej = 0;
    for (uint8_t v : res.rejections) {
      rej += v;
    }
    res.rejection_rate = static_cast<double>(rej) / static_cast<double>(reps);
  }
  return res;
}

}  // namespace xicor
