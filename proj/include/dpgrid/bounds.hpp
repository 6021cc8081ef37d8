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

// Data-dependent bounds on the expected error of a Laplace-perturbed grid
// histogram, and the exponential-mechanism scores built from them.
//
// For a query region with overlap vector alpha, exact counts c and per-cell
// true counts d, the expected absolute error of the released histogram is
// bounded by
//
//   |sum_i alpha_i c_i - sum_i d_i|  +  lambda * ||alpha||_1
//    (aggregation error)               (perturbation error)
//
// and the relative form divides by max{sum_i d_i, rho} with rho = delta*|D|.

#ifndef DPGRID_BOUNDS_HPP_
#define DPGRID_BOUNDS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpgrid/histogram.hpp"

namespace dpgrid {

// Sanity bound rho = delta * |D| floors the relative-error denominator.
class SanityBound {
 public:
  SanityBound(double delta, std::size_t n) : delta_(delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
      throw std::invalid_argument("delta must lie in (0,1)");
    }
    rho_ = delta * static_cast<double>(n);
    if (!(rho_ > 1.0)) {
      throw std::invalid_argument(
          "sanity bound rho = delta*|D| must exceed 1, got " +
          std::to_string(rho_));
    }
  }

  double delta() const { return delta_; }
  double rho() const { return rho_; }

 private:
  double delta_;
  double rho_;
};

struct QueryStats {
  double alpha_l1 = 0.0;       // ||alpha||_1
  double estimate = 0.0;       // sum_i alpha_i c_i on the exact histogram
  std::int64_t true_mass = 0;  // sum_i d_i

  double aggregation_error() const {
    return std::abs(estimate - static_cast<double>(true_mass));
  }
};

using WorkloadStats = std::vector<QueryStats>;

inline QueryStats query_stats(const PointSet& ps, const Histogram& h,
                              const Rect& qr) {
  if (!(ps.domain() == h.grid.domain())) {
    throw std::invalid_argument("histogram domain differs from dataset");
  }
  const auto overlap = overlap_vector(h.grid, qr);
  return QueryStats{alpha_l1(overlap), range_query(h, overlap),
                    true_count(ps, qr)};
}

inline WorkloadStats workload_stats(const PointSet& ps, const Histogram& h,
                                    std::span<const Rect> workload) {
  WorkloadStats ws;
  ws.reserve(workload.size());
  for (const Rect& qr : workload) ws.push_back(query_stats(ps, h, qr));
  return ws;
}

inline double abs_error_bound(const QueryStats& qs, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  return qs.aggregation_error() + lambda * qs.alpha_l1;
}

inline double rel_error_bound(const QueryStats& qs, double lambda,
                              double rho) {
  if (!(rho > 1.0)) throw std::invalid_argument("rho must exceed 1");
  return abs_error_bound(qs, lambda) /
         std::max(static_cast<double>(qs.true_mass), rho);
}

namespace internal {

template <typename F>
double mean_over(const WorkloadStats& ws, F&& f) {
  if (ws.empty()) throw std::invalid_argument("empty workload");
  double s = 0.0;
  for (const QueryStats& qs : ws) s += f(qs);
  return s / static_cast<double>(ws.size());
}

}  // namespace internal

inline double avg_rel_error_bound(const WorkloadStats& ws, double lambda,
                                  double rho) {
  return internal::mean_over(
      ws, [&](const QueryStats& q) { return rel_error_bound(q, lambda, rho); });
}

inline double avg_abs_error_bound(const WorkloadStats& ws, double lambda) {
  return internal::mean_over(
      ws, [&](const QueryStats& q) { return abs_error_bound(q, lambda); });
}

// Exponential-mechanism score: the negated averaged relative-error bound.
inline double score(const WorkloadStats& ws, double lambda, double rho) {
  return -avg_rel_error_bound(ws, lambda, rho);
}

// Absolute-error variant of the score.
inline double abs_score(const WorkloadStats& ws, double lambda) {
  return -avg_abs_error_bound(ws, lambda);
}

}  // namespace dpgrid

#endif  // DPGRID_BOUNDS_HPP_
