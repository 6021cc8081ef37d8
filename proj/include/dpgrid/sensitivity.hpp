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

// Sensitivity bounds for the relative-error score. All of them share the form
//
//   1/(delta(delta n + 1)) + lambda * A / (delta n (delta n + 1))
//     + 1/(delta n + delta)
//
// and differ only in the overlap mass A: the workload mean of ||alpha||_1 for
// the candidate grid (response-dependent), the workload mean of the per-query
// maximum over grids, or the cell count of the largest grid.

#ifndef DPGRID_SENSITIVITY_HPP_
#define DPGRID_SENSITIVITY_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace dpgrid {

enum class SensitivityMode { kResponseDependent, kGlobalMaxR, kGlobalMaxCells };

inline std::string to_string(SensitivityMode m) {
  switch (m) {
    case SensitivityMode::kResponseDependent:
      return "response_dependent";
    case SensitivityMode::kGlobalMaxR:
      return "global_maxr";
    case SensitivityMode::kGlobalMaxCells:
      return "global_maxcells";
  }
  return "?";
}

inline SensitivityMode parse_sensitivity_mode(const std::string& s) {
  if (s == "response_dependent") return SensitivityMode::kResponseDependent;
  if (s == "global_maxr") return SensitivityMode::kGlobalMaxR;
  if (s == "global_maxcells") return SensitivityMode::kGlobalMaxCells;
  throw std::invalid_argument("unknown sensitivity mode '" + s + "'");
}

namespace internal {

inline void check_sensitivity_domain(double delta, std::size_t n,
                                     double lambda) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0,1)");
  }
  if (n < 1) throw std::invalid_argument("dataset size must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be positive");
  }
}

inline double rel_sensitivity_formula(double delta, std::size_t n,
                                      double lambda, double overlap_mass) {
  const double rho = delta * static_cast<double>(n);
  return 1.0 / (delta * (rho + 1.0)) +
         lambda * overlap_mass / (rho * (rho + 1.0)) + 1.0 / (rho + delta);
}

inline double mean_of(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("empty query sequence");
  double s = 0.0;
  for (double a : v) {
    if (!(a >= 0.0)) throw std::invalid_argument("negative ||alpha||_1");
    s += a;
  }
  return s / static_cast<double>(v.size());
}

}  // namespace internal

// Response-dependent sensitivity of the relative score for a single query.
inline double rel_sensitivity_single(double delta, std::size_t n, double lambda,
                                     double alpha_l1) {
  internal::check_sensitivity_domain(delta, n, lambda);
  if (!(alpha_l1 >= 0.0)) throw std::invalid_argument("negative ||alpha||_1");
  return internal::rel_sensitivity_formula(delta, n, lambda, alpha_l1);
}

// Response-dependent sensitivity of the workload-averaged relative score.
inline double rel_sensitivity_avg(double delta, std::size_t n, double lambda,
                                  std::span<const double> alpha_l1_per_query) {
  internal::check_sensitivity_domain(delta, n, lambda);
  return internal::rel_sensitivity_formula(
      delta, n, lambda, internal::mean_of(alpha_l1_per_query));
}

// Grid-independent bound: each query's ||alpha||_1 is its maximum over all
// candidate grids.
inline double rel_sensitivity_global_maxr(
    double delta, std::size_t n, double lambda,
    std::span<const double> max_alpha_l1_per_query) {
  return rel_sensitivity_avg(delta, n, lambda, max_alpha_l1_per_query);
}

// Grid-independent bound using the cell count of the largest grid.
inline double rel_sensitivity_global_maxcells(double delta, std::size_t n,
                                              double lambda, int g_max) {
  internal::check_sensitivity_domain(delta, n, lambda);
  if (g_max < 1) throw std::invalid_argument("g_max must be >= 1");
  const double cells = static_cast<double>(g_max) * g_max;
  return internal::rel_sensitivity_formula(delta, n, lambda, cells);
}

// Sensitivity of the absolute-error score: |1 - alpha_i| <= 1.
constexpr double abs_sensitivity() { return 1.0; }

}  // namespace dpgrid

#endif  // DPGRID_SENSITIVITY_HPP_
