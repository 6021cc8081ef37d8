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

// Synthetic point sets and random query workloads.

#ifndef DPGRID_SYNTH_HPP_
#define DPGRID_SYNTH_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpgrid/histogram.hpp"
#include "dpgrid/rng.hpp"

namespace dpgrid {

struct Cluster {
  double weight;
  Point center;
  double stddev;
};

// Mixture of isotropic Gaussians (clipped to the domain by rejection) plus a
// uniform background.
struct SynthSpec {
  std::size_t n_points = 0;
  Rect domain{0.0, 0.0, 1.0, 1.0};
  std::vector<Cluster> clusters;
  double uniform_weight = 1.0;

  void validate() const {
    if (!domain.valid()) throw std::invalid_argument("invalid synth domain");
    double total = uniform_weight;
    if (!(uniform_weight >= 0.0)) {
      throw std::invalid_argument("negative mixture weight");
    }
    for (const Cluster& c : clusters) {
      if (!(c.weight >= 0.0) || !(c.stddev > 0.0) || !c.center.finite()) {
        throw std::invalid_argument("invalid mixture component");
      }
      total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("mixture weights must sum to 1");
    }
  }

  static SynthSpec uniform(std::size_t n, const Rect& domain) {
    return SynthSpec{n, domain, {}, 1.0};
  }

  // Skewed, sparse-in-places layout: a few dense urban-like clusters of
  // different spreads over a thin uniform background.
  static SynthSpec clustered(std::size_t n, const Rect& domain) {
    auto at = [&](double fx, double fy) {
      return Point{domain.x_min + fx * domain.width(),
                   domain.y_min + fy * domain.height()};
    };
    const double s = std::min(domain.width(), domain.height());
    return SynthSpec{n,
                     domain,
                     {{0.25, at(0.22, 0.30), 0.02 * s},
                      {0.20, at(0.70, 0.65), 0.05 * s},
                      {0.15, at(0.55, 0.20), 0.01 * s},
                      {0.12, at(0.35, 0.78), 0.08 * s},
                      {0.10, at(0.85, 0.35), 0.03 * s},
                      {0.08, at(0.12, 0.62), 0.015 * s}},
                     0.10};
  }
};

inline PointSet synth_points(const SynthSpec& spec, RngStream& rng) {
  spec.validate();
  const Rect& d = spec.domain;
  PointSet ps(d);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < spec.n_points; ++i) {
    double u = rng.uniform();
    const Cluster* chosen = nullptr;
    for (const Cluster& c : spec.clusters) {
      if (u < c.weight) {
        chosen = &c;
        break;
      }
      u -= c.weight;
    }
    if (chosen == nullptr) {
      ps.add(Point{d.x_min + rng.uniform() * d.width(),
                   d.y_min + rng.uniform() * d.height()});
      continue;
    }
    for (;;) {
      const Point p{chosen->center.x + chosen->stddev * normal(rng),
                    chosen->center.y + chosen->stddev * normal(rng)};
      if (d.contains(p)) {
        ps.add(p);
        break;
      }
    }
  }
  return ps;
}

struct WorkloadSpec {
  // Side length as a fraction of each axis; 0.3 covers 9% of the area.
  std::vector<double> size_fractions{0.1, 0.2, 0.3, 0.4, 0.5, 0.8};
  int positions_per_size = 100;

  void validate() const {
    if (positions_per_size < 1) {
      throw std::invalid_argument("positions_per_size must be >= 1");
    }
    if (size_fractions.empty()) throw std::invalid_argument("no query sizes");
    for (double f : size_fractions) {
      if (!(f > 0.0 && f <= 1.0)) {
        throw std::invalid_argument("size fraction must lie in (0,1]");
      }
    }
  }
};

// Query regions grouped by size: regions[k] has size_fractions[size_index[k]].
struct Workload {
  std::vector<double> size_fractions;
  std::vector<Rect> regions;
  std::vector<std::size_t> size_index;
};

inline Workload gen_workload(const Rect& domain, const WorkloadSpec& spec,
                             RngStream& rng) {
  spec.validate();
  Workload w;
  w.size_fractions = spec.size_fractions;
  for (std::size_t s = 0; s < spec.size_fractions.size(); ++s) {
    const double f = spec.size_fractions[s];
    const double wdt = f * domain.width();
    const double hgt = f * domain.height();
    for (int k = 0; k < spec.positions_per_size; ++k) {
      const double x0 = domain.x_min + rng.uniform() * (domain.width() - wdt);
      const double y0 = domain.y_min + rng.uniform() * (domain.height() - hgt);
      // Full-extent regions are pinned to the domain to avoid rounding drift.
      const double x1 = f == 1.0 ? domain.x_max : std::min(x0 + wdt, domain.x_max);
      const double y1 = f == 1.0 ? domain.y_max : std::min(y0 + hgt, domain.y_max);
      w.regions.push_back(Rect{x0, y0, x1, y1});
      w.size_index.push_back(s);
    }
  }
  return w;
}

}  // namespace dpgrid

#endif  // DPGRID_SYNTH_HPP_
