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

#ifndef DPGRID_HISTOGRAM_HPP_
#define DPGRID_HISTOGRAM_HPP_

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dpgrid/geometry.hpp"

namespace dpgrid {

// The sensitive dataset: planar points inside a closed domain.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(const Rect& domain) : domain_(domain) {
    if (!domain.valid()) throw std::invalid_argument("invalid domain");
  }
  PointSet(const Rect& domain, std::vector<Point> points)
      : PointSet(domain) {
    points_.reserve(points.size());
    for (const Point& p : points) add(p);
  }

  void add(const Point& p) {
    if (!p.finite() || !domain_.contains(p)) {
      throw std::out_of_range("point outside dataset domain");
    }
    points_.push_back(p);
  }

  const Rect& domain() const { return domain_; }
  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  // D + {p}: the neighbouring dataset with one extra record.
  PointSet with_point(const Point& p) const {
    PointSet out = *this;
    out.add(p);
    return out;
  }

 private:
  Rect domain_{0.0, 0.0, 1.0, 1.0};
  std::vector<Point> points_;
};

template <typename Count>
struct BasicHistogram {
  GridSpec grid;
  std::vector<Count> counts;

  explicit BasicHistogram(const GridSpec& spec)
      : grid(spec), counts(spec.num_cells(), Count{0}) {}
  BasicHistogram(const GridSpec& spec, std::vector<Count> values)
      : grid(spec), counts(std::move(values)) {
    if (counts.size() != grid.num_cells()) {
      throw std::invalid_argument("histogram length does not match g^2");
    }
  }

  Count total() const {
    return std::accumulate(counts.begin(), counts.end(), Count{0});
  }
};

// Exact per-cell counts.
using Histogram = BasicHistogram<std::int64_t>;
// Released counts after Laplace perturbation; may be negative.
using NoisyHistogram = BasicHistogram<double>;

// Query-region membership consistent with `locate`: half-open on each axis,
// except that a region edge lying on the domain max edge is closed.
inline bool in_region(const Rect& domain, const Rect& qr, const Point& p) {
  const bool in_x = p.x >= qr.x_min &&
                    (p.x < qr.x_max ||
                     (p.x == qr.x_max && qr.x_max >= domain.x_max));
  const bool in_y = p.y >= qr.y_min &&
                    (p.y < qr.y_max ||
                     (p.y == qr.y_max && qr.y_max >= domain.y_max));
  return in_x && in_y;
}

inline Histogram build(const PointSet& ps, const GridSpec& grid) {
  if (!(ps.domain() == grid.domain())) {
    throw std::invalid_argument("grid domain differs from dataset domain");
  }
  Histogram h(grid);
  for (const Point& p : ps.points()) ++h.counts[locate(grid, p)];
  return h;
}

inline std::int64_t true_count(const PointSet& ps, const Rect& qr) {
  std::int64_t n = 0;
  for (const Point& p : ps.points()) {
    if (in_region(ps.domain(), qr, p)) ++n;
  }
  return n;
}

// Range-count estimate under the uniformity assumption: sum of alpha_i * c_i.
template <typename Count>
double range_query(const BasicHistogram<Count>& h,
                   const std::vector<OverlapEntry>& overlap) {
  double s = 0.0;
  for (const auto& [idx, alpha] : overlap) {
    s += alpha * static_cast<double>(h.counts[idx]);
  }
  return s;
}

template <typename Count>
double range_query(const BasicHistogram<Count>& h, const Rect& qr) {
  return range_query(h, overlap_vector(h.grid, qr));
}

}  // namespace dpgrid

#endif  // DPGRID_HISTOGRAM_HPP_
