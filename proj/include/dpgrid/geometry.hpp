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

#ifndef DPGRID_GEOMETRY_HPP_
#define DPGRID_GEOMETRY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dpgrid {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
  friend bool operator==(const Point&, const Point&) = default;
};

// Axis-aligned rectangle. Cells and query regions are both Rects.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 1.0;
  double y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }

  bool valid() const {
    return std::isfinite(x_min) && std::isfinite(y_min) &&
           std::isfinite(x_max) && std::isfinite(y_max) && x_min < x_max &&
           y_min < y_max;
  }

  // Closed containment.
  bool contains(const Point& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << "[" << x_min << "," << x_max << "]x[" << y_min << "," << y_max
       << "]";
    return os.str();
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

inline Rect make_rect(double x_min, double y_min, double x_max, double y_max) {
  Rect r{x_min, y_min, x_max, y_max};
  if (!r.valid()) {
    throw std::invalid_argument("invalid rectangle " + r.to_string());
  }
  return r;
}

// Area of the intersection of two rectangles; zero when disjoint.
inline double intersection_area(const Rect& a, const Rect& b) {
  const double x_overlap =
      std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double y_overlap =
      std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  return x_overlap * y_overlap;
}

// A g x g partition of `domain`. Cells are indexed row-major: index =
// row * g + col, where row grows with y and col grows with x.
class GridSpec {
 public:
  GridSpec(const Rect& domain, int g) : domain_(domain), g_(g) {
    if (!domain.valid()) {
      throw std::invalid_argument("grid domain is not a valid rectangle");
    }
    if (g < 1) {
      throw std::invalid_argument("grid size must be >= 1, got " +
                                  std::to_string(g));
    }
    if (!(cell_width() > 0.0) || !(cell_height() > 0.0)) {
      throw std::invalid_argument("grid cells have zero extent");
    }
  }

  const Rect& domain() const { return domain_; }
  int g() const { return g_; }
  std::size_t num_cells() const {
    return static_cast<std::size_t>(g_) * static_cast<std::size_t>(g_);
  }
  double cell_width() const { return domain_.width() / g_; }
  double cell_height() const { return domain_.height() / g_; }
  double cell_area() const { return cell_width() * cell_height(); }

  // Lower x edge of column `col`, for col in [0, g]. Column g's edge is the
  // domain max edge exactly so that the cells tile the domain.
  double x_edge(int col) const {
    return col >= g_ ? domain_.x_max : domain_.x_min + col * cell_width();
  }
  double y_edge(int row) const {
    return row >= g_ ? domain_.y_max : domain_.y_min + row * cell_height();
  }

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(g_) +
           static_cast<std::size_t>(col);
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  Rect domain_;
  int g_;
};

inline Rect cell_rect(const GridSpec& grid, std::size_t index) {
  if (index >= grid.num_cells()) {
    throw std::out_of_range("cell index " + std::to_string(index) +
                            " out of range for g=" + std::to_string(grid.g()));
  }
  const int row = static_cast<int>(index / static_cast<std::size_t>(grid.g()));
  const int col = static_cast<int>(index % static_cast<std::size_t>(grid.g()));
  return Rect{grid.x_edge(col), grid.y_edge(row), grid.x_edge(col + 1),
              grid.y_edge(row + 1)};
}

namespace internal {

// Column (or row) holding coordinate `v` under the half-open rule, with the
// domain max edge assigned to the last column. The floor estimate is
// corrected against the exact edges used by cell_rect.
template <typename EdgeFn>
int locate_axis(double v, double lo, double extent, int g, EdgeFn edge) {
  int k = static_cast<int>(std::floor((v - lo) / extent * g));
  k = std::clamp(k, 0, g - 1);
  while (k > 0 && v < edge(k)) --k;
  while (k < g - 1 && v >= edge(k + 1)) ++k;
  return k;
}

}  // namespace internal

// Cell index holding `p`. A point on an interior cell boundary belongs to the
// cell with the larger index along that axis; the domain max edges are closed.
inline std::size_t locate(const GridSpec& grid, const Point& p) {
  const Rect& d = grid.domain();
  if (!p.finite() || !d.contains(p)) {
    std::ostringstream os;
    os << "point (" << p.x << "," << p.y << ") outside domain "
       << d.to_string();
    throw std::out_of_range(os.str());
  }
  const int col = internal::locate_axis(p.x, d.x_min, d.width(), grid.g(),
                                        [&](int c) { return grid.x_edge(c); });
  const int row = internal::locate_axis(p.y, d.y_min, d.height(), grid.g(),
                                        [&](int r) { return grid.y_edge(r); });
  return grid.index(row, col);
}

// Fraction of `cell`'s area covered by `qr`, in [0, 1].
inline double overlap_fraction(const Rect& cell, const Rect& qr) {
  return std::clamp(intersection_area(cell, qr) / cell.area(), 0.0, 1.0);
}

using OverlapEntry = std::pair<std::size_t, double>;

// Sparse overlap vector: exactly the cells with a positive covered fraction,
// in increasing index order.
inline std::vector<OverlapEntry> overlap_vector(const GridSpec& grid,
                                                const Rect& qr) {
  std::vector<OverlapEntry> out;
  const Rect& d = grid.domain();
  if (intersection_area(d, qr) <= 0.0) return out;

  const int g = grid.g();
  auto axis_range = [g](double lo, double hi, double d_lo, double extent) {
    int first = static_cast<int>(std::floor((lo - d_lo) / extent * g)) - 1;
    int last = static_cast<int>(std::floor((hi - d_lo) / extent * g)) + 1;
    return std::pair{std::clamp(first, 0, g - 1), std::clamp(last, 0, g - 1)};
  };
  const auto [c0, c1] = axis_range(qr.x_min, qr.x_max, d.x_min, d.width());
  const auto [r0, r1] = axis_range(qr.y_min, qr.y_max, d.y_min, d.height());

  for (int row = r0; row <= r1; ++row) {
    for (int col = c0; col <= c1; ++col) {
      const std::size_t idx = grid.index(row, col);
      const double alpha = overlap_fraction(cell_rect(grid, idx), qr);
      if (alpha > 0.0) out.emplace_back(idx, alpha);
    }
  }
  return out;
}

// Sum of overlap fractions, i.e. the effective number of covered cells.
inline double alpha_l1(const std::vector<OverlapEntry>& overlap) {
  double s = 0.0;
  for (const auto& [idx, a] : overlap) s += a;
  return s;
}

}  // namespace dpgrid

#endif  // DPGRID_GEOMETRY_HPP_
