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

#ifndef DPGRID_EVALUATE_HPP_
#define DPGRID_EVALUATE_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dpgrid/baselines.hpp"
#include "dpgrid/histogram.hpp"
#include "dpgrid/synth.hpp"

namespace dpgrid {

// Median of a copy; the mean of the two middle values for even sizes.
inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty sequence");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

struct EvalResult {
  std::vector<double> errors;           // per query
  std::vector<bool> zero_true;          // per query: true count was 0
  std::vector<double> median_per_size;  // indexed like size_fractions
  std::vector<int> zero_true_per_size;
};

// Relative error |response - true| / max{true, 1} on every workload region.
template <typename Count>
EvalResult eval_relative_error(const BasicHistogram<Count>& h,
                               const PointSet& ps, const Workload& workload) {
  const std::size_t n_sizes = workload.size_fractions.size();
  EvalResult out;
  out.zero_true_per_size.assign(n_sizes, 0);
  std::vector<std::vector<double>> by_size(n_sizes);
  for (std::size_t t = 0; t < workload.regions.size(); ++t) {
    const Rect& qr = workload.regions[t];
    const std::int64_t truth = true_count(ps, qr);
    const double err = relative_error(range_query(h, qr), truth);
    out.errors.push_back(err);
    out.zero_true.push_back(truth == 0);
    const std::size_t s = workload.size_index[t];
    by_size[s].push_back(err);
    if (truth == 0) ++out.zero_true_per_size[s];
  }
  for (auto& errs : by_size) {
    out.median_per_size.push_back(errs.empty() ? 0.0 : median(errs));
  }
  return out;
}

}  // namespace dpgrid

#endif  // DPGRID_EVALUATE_HPP_
