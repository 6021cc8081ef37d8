// Copyright 2026 The dpgrid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Differential-privacy primitives: Laplace noise, histogram perturbation and
// the exponential mechanism with per-response sensitivity.

#ifndef DPGRID_MECHANISMS_HPP_
#define DPGRID_MECHANISMS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpgrid/histogram.hpp"
#include "dpgrid/rng.hpp"

namespace dpgrid {

// Total budget epsilon split sequentially: eps1 for grid tuning, eps2 for the
// histogram release.
class PrivacyBudget {
 public:
  PrivacyBudget(double epsilon, double eps1_fraction)
      : epsilon_(epsilon), eps1_fraction_(eps1_fraction) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw std::invalid_argument("epsilon must be positive");
    }
    if (!(eps1_fraction > 0.0 && eps1_fraction < 1.0)) {
      throw std::invalid_argument("eps1 fraction must lie in (0,1)");
    }
  }

  double epsilon() const { return epsilon_; }
  double eps1_fraction() const { return eps1_fraction_; }
  double eps1() const { return eps1_fraction_ * epsilon_; }
  double eps2() const { return epsilon_ - eps1(); }

 private:
  double epsilon_;
  double eps1_fraction_;
};

// Laplace scale. Histogram release has sensitivity 1, so lambda = 1/eps.
struct NoiseSpec {
  double lambda;

  static NoiseSpec for_epsilon(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
    return NoiseSpec{1.0 / eps};
  }
  static NoiseSpec for_budget(const PrivacyBudget& b) {
    return for_epsilon(b.eps2());
  }
};

// One draw from Lap(0, lambda) by inverse CDF.
inline double laplace_sample(RngStream& rng, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("Laplace scale must be positive");
  }
  const double u = rng.uniform_open() - 0.5;  // (-1/2, 1/2)
  const double mag = -lambda * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

inline NoisyHistogram perturb_histogram(const Histogram& h, double eps2,
                                        RngStream& rng) {
  if (!(eps2 > 0.0) || !std::isfinite(eps2)) {
    throw std::invalid_argument("eps2 must be positive");
  }
  const double lambda = 1.0 / eps2;
  std::vector<double> noisy(h.counts.size());
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    noisy[i] = static_cast<double>(h.counts[i]) + laplace_sample(rng, lambda);
  }
  return NoisyHistogram(h.grid, std::move(noisy));
}

// Selection probabilities p_r proportional to exp(eps1 * s_r / (2 * Delta_r)).
// The largest exponent is subtracted before exponentiation.
inline std::vector<double> exp_mechanism_probabilities(
    std::span<const double> scores, std::span<const double> sensitivities,
    double eps1) {
  if (scores.empty()) {
    throw std::invalid_argument("exponential mechanism needs >= 1 response");
  }
  if (scores.size() != sensitivities.size()) {
    throw std::invalid_argument("scores and sensitivities differ in length");
  }
  if (!(eps1 > 0.0)) throw std::invalid_argument("eps1 must be positive");

  std::vector<double> exponent(scores.size());
  for (std::size_t r = 0; r < scores.size(); ++r) {
    if (!(sensitivities[r] > 0.0) || !std::isfinite(sensitivities[r])) {
      throw std::invalid_argument("sensitivity for response " +
                                  std::to_string(r) + " must be positive");
    }
    if (!std::isfinite(scores[r])) {
      throw std::invalid_argument("score for response " + std::to_string(r) +
                                  " is not finite");
    }
    exponent[r] = eps1 * scores[r] / (2.0 * sensitivities[r]);
  }
  const double top = *std::max_element(exponent.begin(), exponent.end());
  double z = 0.0;
  for (double& e : exponent) {
    e = std::exp(e - top);
    z += e;
  }
  for (double& e : exponent) e /= z;
  return exponent;
}

inline std::size_t exp_mechanism_sample(RngStream& rng,
                                        std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("empty distribution");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("negative or non-finite probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("probabilities do not sum to 1");
  }
  const double u = rng.uniform() * total;
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t r = 0; r < probs.size(); ++r) {
    if (probs[r] <= 0.0) continue;
    last_positive = r;
    cum += probs[r];
    if (u < cum) return r;
  }
  return last_positive;
}

}  // namespace dpgrid

#endif  // DPGRID_MECHANISMS_HPP_
