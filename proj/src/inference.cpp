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

#include "xicor/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "xicor/rng.hpp"

namespace xicor {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 400;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) {
    d = kFpMin;
  }
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) {
      return h;
    }
  }
  throw Error("incomplete beta continued fraction did not converge");
}

// Volume of a spherical cap of height h on a d-ball of radius r.
double cap_volume(int d, double r, double h) {
  if (h <= 0.0 || r <= 0.0) {
    return 0.0;
  }
  const double full = unit_ball_volume(d) * std::pow(r, d);
  if (h >= 2.0 * r) {
    return full;
  }
  if (h > r) {
    return full - cap_volume(d, r, 2.0 * r - h);
  }
  const double y = (2.0 * r * h - h * h) / (r * r);
  return 0.5 * full *
         regularized_incomplete_beta(y, 0.5 * (d + 1), 0.5);
}

double ball_intersection_volume(int d, double r1, double r2, double s) {
  if (r1 > r2) {
    std::swap(r1, r2);  // canonical order keeps the result bitwise symmetric
  }
  if (s >= r1 + r2) {
    return 0.0;
  }
  if (s <= r2 - r1) {
    return unit_ball_volume(d) * std::pow(r1, d);
  }
  const double t1 = (s * s + r1 * r1 - r2 * r2) / (2.0 * s);
  const double t2 = s - t1;
  return cap_volume(d, r1, r1 - t1) + cap_volume(d, r2, r2 - t2);
}

// Uniform direction scaled so |w|^d is exponential with rate V_d; the
// resulting density is exp(-V_d |w|^d), which is its own normalizer.
void draw_point(RngStream& rng, int d, double v_d, std::vector<double>& w,
                double& u) {
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (int c = 0; c < d; ++c) {
      w[c] = rng.normal();
      norm_sq += w[c] * w[c];
    }
  } while (norm_sq == 0.0);
  u = rng.exponential(v_d);  // |w|^d
  const double radius = std::pow(u, 1.0 / d);
  const double scale = radius / std::sqrt(norm_sq);
  for (int c = 0; c < d; ++c) {
    w[c] *= scale;
  }
}

std::mutex g_o_cache_mutex;
std::map<int, McEstimate>& o_cache() {
  static std::map<int, McEstimate> cache;
  return cache;
}

McEstimate o_constant_cached(int d) {
  std::lock_guard<std::mutex> lock(g_o_cache_mutex);
  auto& cache = o_cache();
  auto it = cache.find(d);
  if (it == cache.end()) {
    it = cache.emplace(d, o_constant_mc(d, 2'000'000, 0x5EEDC0DEULL)).first;
  }
  return it->second;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw OutOfDomainError("normal_quantile requires p in (0, 1)");
  }
  // Wichura's algorithm AS 241 (PPND16 coefficients).
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r +
                4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r +
              1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r +
            3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r +
                2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r +
              6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r +
            1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) *
                      r + 2.41780725177450611770e-1) * r +
                 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r +
               5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r +
             1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) *
                      r + 1.51986665636164571966e-2) * r +
                 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r +
               1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r +
             1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) *
                      r + 1.24266094738807843860e-3) * r +
                 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r +
               1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r +
             6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) *
                      r + 1.84631831751005468180e-5) * r +
                 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r +
               1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r +
             1.0);
  }
  return q < 0.0 ? -value : value;
}

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0) || !(a > 0.0) || !(b > 0.0)) {
    throw OutOfDomainError("regularized_incomplete_beta domain violation");
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (x == 1.0) {
    return 1.0;
  }
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) -
                             std::lgamma(b) + a * std::log(x) +
                             b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * betacf(a, b, x) / a;
  }
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double q_constant(int d) {
  if (d < 1) {
    throw OutOfDomainError("q_constant requires d >= 1");
  }
  const double inc =
      regularized_incomplete_beta(0.75, 0.5 * (d + 1), 0.5);
  return 1.0 / (2.0 - inc);
}

double unit_ball_volume(int d) {
  if (d < 1) {
    throw OutOfDomainError("unit_ball_volume requires d >= 1");
  }
  return std::exp(0.5 * d * std::log(kPi) - std::lgamma(0.5 * d + 1.0));
}

double ball_union_volume(std::span<const double> w1,
                         std::span<const double> w2) {
  if (w1.size() != w2.size() || w1.empty()) {
    throw OutOfDomainError("ball_union_volume needs two d-vectors, d >= 1");
  }
  const int d = static_cast<int>(w1.size());
  double r1_sq = 0.0, r2_sq = 0.0, s_sq = 0.0;
  for (int c = 0; c < d; ++c) {
    r1_sq += w1[c] * w1[c];
    r2_sq += w2[c] * w2[c];
    const double t = w1[c] - w2[c];
    s_sq += t * t;
  }
  const double r1 = std::sqrt(r1_sq);
  const double r2 = std::sqrt(r2_sq);
  const double s = std::sqrt(s_sq);
  const double v_d = unit_ball_volume(d);
  const double vol1 = v_d * std::pow(r1, d);
  const double vol2 = v_d * std::pow(r2, d);
  return vol1 + vol2 - ball_intersection_volume(d, r1, r2, s);
}

McEstimate o_constant_mc(int d, int64_t samples, uint64_t seed) {
  if (d < 1) {
    throw OutOfDomainError("o_constant_mc requires d >= 1");
  }
  if (samples < 10'000) {
    throw OutOfDomainError("o_constant_mc requires >= 1e4 samples");
  }
  const double v_d = unit_ball_volume(d);
  std::vector<double> w1(d), w2(d);
  double u1 = 0.0, u2 = 0.0;

  double mean = 0.0;
  double m2 = 0.0;
  for (int64_t s = 0; s < samples; ++s) {
    RngStream rng(seed, static_cast<uint64_t>(s));
    draw_point(rng, d, v_d, w1, u1);
    draw_point(rng, d, v_d, w2, u2);

    double s_sq = 0.0, r1_sq = 0.0, r2_sq = 0.0;
    for (int c = 0; c < d; ++c) {
      const double t = w1[c] - w2[c];
      s_sq += t * t;
      r1_sq += w1[c] * w1[c];
      r2_sq += w2[c] * w2[c];
    }
    double weight = 0.0;
    if (std::max(r1_sq, r2_sq) < s_sq) {
      // In Gamma_{d;2}: importance weight reduces to exp(lens overlap).
      const double union_vol = ball_union_volume(w1, w2);
      const double lens = v_d * (u1 + u2) - union_vol;
      const double lens_cap = v_d * std::min(u1, u2);
      if (lens < -1e-9 || lens > lens_cap + 1e-9 * (1.0 + lens_cap)) {
        throw std::logic_error("ball geometry violated lens bounds");
      }
      weight = std::exp(lens);
    }
    const double delta = weight - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (weight - mean);
  }
  McEstimate out;
  out.value = mean;
  out.stderr = std::sqrt(m2 / (static_cast<double>(samples) *
                               static_cast<double>(samples - 1)));
  return out;
}

double null_asymptotic_variance(int d, EstimatorKind kind) {
  if (kind == EstimatorKind::right_nn) {
    if (d != 1) {
      throw OutOfDomainError("right-NN null variance is defined for d = 1");
    }
    return 0.4;
  }
  if (d < 1) {
    throw OutOfDomainError("null_asymptotic_variance requires d >= 1");
  }
  return 0.4 + 0.4 * q_constant(d) + 0.8 * o_constant_cached(d).value;
}

AsymptoticConstants asymptotic_constants(int d) {
  if (d < 1) {
    throw OutOfDomainError("asymptotic_constants requires d >= 1");
  }
  AsymptoticConstants out;
  out.d = d;
  out.q_d = q_constant(d);
  const McEstimate o = o_constant_cached(d);
  out.o_d = o.value;
  out.o_d_stderr = o.stderr;
  out.null_variance = 0.4 + 0.4 * out.q_d + 0.8 * out.o_d;
  return out;
}

ConfidenceInterval confidence_interval(double coefficient, double variance_est,
                                       int64_t n, double alpha, int d) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw OutOfDomainError("alpha must be in (0, 1)");
  }
  if (variance_est < 0.0) {
    throw NegativeVarianceError(
        "variance_est is negative; clamp it explicitly before building a CI");
  }
  if (n < 2) {
    throw TooFewPointsError("confidence_interval needs n >= 2");
  }
  const double half = normal_quantile(1.0 - 0.5 * alpha) *
                      std::sqrt(variance_est / static_cast<double>(n));
  ConfidenceInterval ci;
  ci.lower = coefficient - half;
  ci.upper = coefficient + half;
  ci.level = 1.0 - alpha;
  ci.target_note = d == 1 ? "xi" : "E[xi_n]";
  return ci;
}

TestResult threshold_test(double coefficient, double variance_est, int64_t n,
                          double kappa, double alpha) {
  if (kappa >= 1.0) {
    throw InvalidKappaError("kappa must be < 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw OutOfDomainError("alpha must be in (0, 1)");
  }
  if (variance_est < 0.0) {
    throw NegativeVarianceError(
        "variance_est is negative; clamp it explicitly before testing");
  }
  if (n < 2) {
    throw TooFewPointsError("threshold_test needs n >= 2");
  }
  TestResult out;
  out.kappa = kappa;
  out.level = 1.0 - alpha;
  out.threshold = kappa + normal_quantile(1.0 - alpha) *
                              std::sqrt(variance_est / static_cast<double>(n));
  out.reject = coefficient > out.threshold;
  return out;
}

}  // namespace xicor
