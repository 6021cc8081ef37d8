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

// Shared fixtures for the unit and acceptance tests.

#ifndef DPGRID_TESTS_FIXTURES_HPP_
#define DPGRID_TESTS_FIXTURES_HPP_

#include <random>
#include <vector>

#include "dpgrid/histogram.hpp"

namespace dpgrid::testing {

// Failure case for a fixed-rule grid: domain [0,8]^2, query [3,5]^2. Four
// cells of the 4x4 grid around the query hold 100 points each; exactly one of
// each cell's points lies inside the query, the other 99 sit in the half of
// the cell away from it. 400 points, true count 4.
inline const Rect kSection5Domain{0.0, 0.0, 8.0, 8.0};
inline const Rect kSection5Query{3.0, 3.0, 5.0, 5.0};

inline PointSet section5_points() {
  PointSet ps(kSection5Domain);
  for (double cx : {2.0, 4.0}) {
    for (double cy : {2.0, 4.0}) {
      const double far_x = cx == 2.0 ? 2.0 : 5.0;  // 1-wide strip away from QR
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 11; ++j) {
          ps.add(Point{far_x + (i + 0.5) / 9.0, cy + (j + 0.5) * 2.0 / 11.0});
        }
      }
      ps.add(Point{cx == 2.0 ? 3.5 : 4.5, cy == 2.0 ? 3.5 : 4.5});
    }
  }
  return ps;
}

inline PointSet random_points(std::mt19937_64& gen, const Rect& domain,
                              std::size_t n, bool clustered) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  PointSet ps(domain);
  const Point c{domain.x_min + u(gen) * domain.width(),
                domain.y_min + u(gen) * domain.height()};
  const double s = 0.08 * domain.width();
  while (ps.size() < n) {
    Point p{domain.x_min + u(gen) * domain.width(),
            domain.y_min + u(gen) * domain.height()};
    if (clustered && u(gen) < 0.6) p = Point{c.x + s * z(gen), c.y + s * z(gen)};
    if (domain.contains(p)) ps.add(p);
  }
  return ps;
}

inline Rect random_rect_inside(std::mt19937_64& gen, const Rect& d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double w = (0.05 + 0.6 * u(gen)) * d.width();
  const double h = (0.05 + 0.6 * u(gen)) * d.height();
  const double x = d.x_min + u(gen) * (d.width() - w);
  const double y = d.y_min + u(gen) * (d.height() - h);
  return Rect{x, y, x + w, y + h};
}

}  // namespace dpgrid::testing

#endif  // DPGRID_TESTS_FIXTURES_HPP_
