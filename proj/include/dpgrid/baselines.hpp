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

// Comparison mechanisms: the fixed-rule grid size guideline, a semi-private
// tuner that compares noisy histograms against true counts, and the
// non-private exact histogram at the finest candidate grid.

#ifndef DPGRID_BASELINES_HPP_
#define DPGRID_BASELINES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dpgrid/histogram.hpp"
#include "dpgrid/mechanisms.hpp"
#include "dpgrid/rng.hpp"

namespace dpgrid {

// |response - truth| / max{truth, 1}. No sanity bound.
inline double relative_error(double response, std::int64_t truth) {
  return std::abs(response - static_cast<double>(truth)) /
         std::max<double>(static_cast<double>(truth), 1.0);
}

struct HeuristicParams {
  std::size_t n = 0;
  double epsilon = 1.0;
  double c = 10.0;
};

// m = sqrt(N * eps / c), rounded to nearest, at least 1.
inline int heuristic_grid_size(const HeuristicParams& hp) {
  if (!(hp.epsilon > 0.0) || !(hp.c > 0.0)) {
    throw std::invalid_argument("heuristic needs epsilon > 0 and c > 0");
  }
  const double m =
      std::sqrt(static_cast<double>(hp.n) * hp.epsilon / hp.c);
  return std::max(1, static_cast<int>(std::lround(m)));
}

template <typename Count>
struct Selection {
  int g = 0;
  BasicHistogram<Count> histogram;
  double measured_error = 0.0;
};

// Semi-private: each candidate is released with the full budget (fresh noise
// per candidate) and the one with the lowest actual mean relative error on
// `workload` wins. Ties go to the smaller grid.
inline Selection<double> leaky_select(const PointSet& ps,
                                      std::span<const int> grids,
                                      std::span<const Rect> workload,
                                      double epsilon, const RngStream& rng) {
  if (grids.empty()) throw std::invalid_argument("no grid candidates");
  if (workload.empty()) throw std::invalid_argument("empty workload");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");

  std::vector<std::int64_t> truth;
  truth.reserve(workload.size());
  for (const Rect& qr : workload) truth.push_back(true_count(ps, qr));

  std::optional<Selection<double>> best;
  for (int g : grids) {
    RngStream noise = rng.substream(static_cast<std::uint64_t>(g));
    NoisyHistogram noisy =
        perturb_histogram(build(ps, GridSpec(ps.domain(), g)), epsilon, noise);
    double err = 0.0;
    for (std::size_t t = 0; t < workload.size(); ++t) {
      err += relative_error(range_query(noisy, workload[t]), truth[t]);
    }
    err /= static_cast<double>(workload.size());
    const bool better =
        !best || err < best->measured_error ||
        (err == best->measured_error && g < best->g);
    if (better) best = Selection<double>{g, std::move(noisy), err};
  }
  return std::move(*best);
}

// Non-private: the finest candidate with its exact histogram.
inline Selection<std::int64_t> best_select(const PointSet& ps,
                                           std::span<const int> grids) {
  if (grids.empty()) throw std::invalid_argument("no grid candidates");
  const int g = *std::max_element(grids.begin(), grids.end());
  return Selection<std::int64_t>{g, build(ps, GridSpec(ps.domain(), g)), 0.0};
}

}  // namespace dpgrid

#endif  // DPGRID_BASELINES_HPP_
