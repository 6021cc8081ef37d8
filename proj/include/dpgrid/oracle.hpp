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

// Brute-force verifiers for the bounds and privacy claims.
//
// Expected values are produced here by direct enumeration: scores are
// recomputed from raw points with a separate cell-overlap loop, Laplace noise
// is drawn as a difference of exponentials, and neighbouring datasets come
// from a lattice of added points. Library bounds are only read for the
// comparison.
//
// The lattice is finite, so a pass certifies the tested positions only.

#ifndef DPGRID_ORACLE_HPP_
#define DPGRID_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dpgrid/bounds.hpp"
#include "dpgrid/geometry.hpp"
#include "dpgrid/histogram.hpp"
#include "dpgrid/io.hpp"
#include "dpgrid/rng.hpp"
#include "dpgrid/sensitivity.hpp"
#include "dpgrid/tuner.hpp"
#include "json.hpp"

namespace dpgrid::oracle {

struct Record {
  std::string check;
  std::string instance;
  double observed = 0.0;
  double bound = 0.0;
  bool pass = false;

  nlohmann::json to_json() const {
    return nlohmann::json{{"check", check},
                          {"instance", instance},
                          {"observed", observed},
                          {"bound", bound},
                          {"pass", pass}};
  }
};

struct Report {
  std::vector<Record> records;

  bool pass() const {
    return std::all_of(records.begin(), records.end(),
                       [](const Record& r) { return r.pass; });
  }
  // Largest observed/bound ratio over records with a positive bound.
  double max_ratio() const {
    double m = 0.0;
    for (const Record& r : records) {
      if (r.bound > 0.0) m = std::max(m, r.observed / r.bound);
    }
    return m;
  }
  void append(const Report& other) {
    records.insert(records.end(), other.records.begin(), other.records.end());
  }
  // One JSON object per line.
  std::string to_json_lines() const {
    std::string out;
    for (const Record& r : records) out += r.to_json().dump() + "\n";
    return out;
  }
};

// Where the added point falls relative to a query region and grid.
enum class NeighborCase {
  kOutsideOverlappingCells = 1,
  kOverlappingCellOutsideQr = 2,
  kInsideQr = 3,
};

struct NeighborPoint {
  Point p;
  NeighborCase kase;
};

inline NeighborCase classify_neighbor(const GridSpec& grid, const Rect& qr,
                                      const Point& p) {
  if (in_region(grid.domain(), qr, p)) return NeighborCase::kInsideQr;
  const Rect cell = cell_rect(grid, locate(grid, p));
  return intersection_area(cell, qr) > 0.0
             ? NeighborCase::kOverlappingCellOutsideQr
             : NeighborCase::kOutsideOverlappingCells;
}

namespace internal {

// n x n interior sample points of `r`, at cell-centred offsets.
inline std::vector<Point> interior_lattice(const Rect& r, int n) {
  std::vector<Point> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.push_back(Point{r.x_min + (i + 0.5) / n * r.width(),
                          r.y_min + (j + 0.5) / n * r.height()});
    }
  }
  return out;
}

}  // namespace internal

// Added-point positions for neighbours of a dataset: a lattice of spacing
// cell/`subdivisions` (boundaries included) over the domain, topped up so
// that each case that is geometrically possible has >= `min_per_case`
// positions.
inline std::vector<NeighborPoint> neighbor_points(const GridSpec& grid,
                                                  const Rect& qr,
                                                  int subdivisions = 5,
                                                  int min_per_case = 25) {
  const Rect& d = grid.domain();
  const int steps = grid.g() * subdivisions;
  std::vector<NeighborPoint> out;
  int count[4] = {0, 0, 0, 0};
  auto push = [&](const Point& p) {
    const NeighborCase c = classify_neighbor(grid, qr, p);
    out.push_back({p, c});
    ++count[static_cast<int>(c)];
  };
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps; ++j) {
      const double x = i == steps ? d.x_max : d.x_min + d.width() * i / steps;
      const double y = j == steps ? d.y_max : d.y_min + d.height() * j / steps;
      push(Point{x, y});
    }
  }

  const int side = static_cast<int>(std::ceil(std::sqrt(min_per_case))) + 1;
  // Inside the query region.
  const Rect inside{std::max(d.x_min, qr.x_min), std::max(d.y_min, qr.y_min),
                    std::min(d.x_max, qr.x_max), std::min(d.y_max, qr.y_max)};
  if (count[3] < min_per_case && inside.valid()) {
    for (const Point& p : internal::interior_lattice(inside, side)) {
      if (classify_neighbor(grid, qr, p) == NeighborCase::kInsideQr) push(p);
    }
  }
  // Overlapping cells outside the region, and cells away from it.
  for (int want : {2, 1}) {
    if (count[want] >= min_per_case) continue;
    for (std::size_t idx = 0;
         idx < grid.num_cells() && count[want] < min_per_case; ++idx) {
      const Rect cell = cell_rect(grid, idx);
      const bool overlapping = intersection_area(cell, qr) > 0.0;
      if ((want == 2) != overlapping) continue;
      for (const Point& p : internal::interior_lattice(cell, 2 * side)) {
        if (static_cast<int>(classify_neighbor(grid, qr, p)) == want) push(p);
      }
    }
  }
  return out;
}

inline std::vector<PointSet> neighbor_instances(const PointSet& ps,
                                                const Rect& qr,
                                                const GridSpec& grid) {
  std::vector<PointSet> out;
  for (const NeighborPoint& np : neighbor_points(grid, qr)) {
    out.push_back(ps.with_point(np.p));
  }
  return out;
}

// Independent score evaluation straight from the raw points.
class BruteScorer {
 public:
  BruteScorer(const Rect& domain, int g, std::vector<Rect> workload)
      : domain_(domain), g_(g), workload_(std::move(workload)) {
    const double w = domain.width() / g;
    const double h = domain.height() / g;
    for (int k = 0; k <= g; ++k) {
      xs_.push_back(k == g ? domain.x_max : domain.x_min + k * w);
      ys_.push_back(k == g ? domain.y_max : domain.y_min + k * h);
    }
    for (const Rect& q : workload_) {
      std::vector<double> a(static_cast<std::size_t>(g) * g, 0.0);
      for (int row = 0; row < g; ++row) {
        for (int col = 0; col < g; ++col) {
          const double xo = std::max(
              0.0, std::min(xs_[col + 1], q.x_max) - std::max(xs_[col], q.x_min));
          const double yo = std::max(
              0.0, std::min(ys_[row + 1], q.y_max) - std::max(ys_[row], q.y_min));
          const double area =
              (xs_[col + 1] - xs_[col]) * (ys_[row + 1] - ys_[row]);
          a[static_cast<std::size_t>(row) * g + col] = xo * yo / area;
        }
      }
      alphas_.push_back(std::move(a));
    }
  }

  const std::vector<std::vector<double>>& alphas() const { return alphas_; }

  double alpha_l1(std::size_t t) const {
    double s = 0.0;
    for (double a : alphas_[t]) s += a;
    return s;
  }

  std::vector<double> counts(const std::vector<Point>& pts,
                             const Point* extra) const {
    std::vector<double> c(static_cast<std::size_t>(g_) * g_, 0.0);
    auto add = [&](const Point& p) { c[cell_of(p)] += 1.0; };
    for (const Point& p : pts) add(p);
    if (extra) add(*extra);
    return c;
  }

  double true_count(const std::vector<Point>& pts, const Point* extra,
                    std::size_t t) const {
    const Rect& q = workload_[t];
    auto inside = [&](const Point& p) {
      const bool ix = p.x >= q.x_min &&
                      (p.x < q.x_max || (p.x == q.x_max && q.x_max >= domain_.x_max));
      const bool iy = p.y >= q.y_min &&
                      (p.y < q.y_max || (p.y == q.y_max && q.y_max >= domain_.y_max));
      return ix && iy;
    };
    double n = 0.0;
    for (const Point& p : pts) n += inside(p) ? 1.0 : 0.0;
    if (extra && inside(*extra)) n += 1.0;
    return n;
  }

  // Negated workload mean of (|est - true| + lambda ||alpha||_1) / denom,
  // with denom = max{true, rho} (relative) or 1 (absolute, rho unset).
  double score(const std::vector<Point>& pts, const Point* extra,
               double lambda, std::optional<double> rho) const {
    const std::vector<double> c = counts(pts, extra);
    double total = 0.0;
    for (std::size_t t = 0; t < workload_.size(); ++t) {
      double est = 0.0;
      double l1 = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        est += alphas_[t][i] * c[i];
        l1 += alphas_[t][i];
      }
      const double truth = true_count(pts, extra, t);
      const double num = std::abs(est - truth) + lambda * l1;
      total += rho ? num / std::max(truth, *rho) : num;
    }
    return -total / static_cast<double>(workload_.size());
  }

 private:
  std::size_t cell_of(const Point& p) const {
    // Largest k with edge[k] <= v, capped at g-1: the half-open rule with a
    // closed max edge.
    auto axis = [this](const std::vector<double>& e, double v) {
      int k = static_cast<int>(std::upper_bound(e.begin(), e.end(), v) -
                               e.begin()) - 1;
      return std::clamp(k, 0, g_ - 1);
    };
    return static_cast<std::size_t>(axis(ys_, p.y)) * g_ + axis(xs_, p.x);
  }

  Rect domain_;
  int g_;
  std::vector<Rect> workload_;
  std::vector<double> xs_, ys_;
  std::vector<std::vector<double>> alphas_;
};

namespace internal {

inline std::string describe(const Point& p) {
  std::ostringstream os;
  os.precision(10);
  os << "(" << p.x << "," << p.y << ")";
  return os.str();
}

// Deduplicated union of the lattice positions for every query on grid g.
inline std::vector<Point> union_neighbor_points(const Rect& domain, int g,
                                                const std::vector<Rect>& wl) {
  std::vector<Point> out;
  const GridSpec grid(domain, g);
  for (std::size_t t = 0; t < wl.size(); ++t) {
    for (const NeighborPoint& np : neighbor_points(grid, wl[t])) {
      out.push_back(np.p);
    }
  }
  std::sort(out.begin(), out.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::string case_codes(const GridSpec& grid,
                              const std::vector<Rect>& wl, const Point& p) {
  std::string s;
  for (const Rect& q : wl) {
    s += std::to_string(static_cast<int>(classify_neighbor(grid, q, p)));
  }
  return s;
}

}  // namespace internal

// For every candidate grid r and every enumerated neighbour D + {p}, checks
// |s(D,r) - s(D+{p},r)| <= the response-dependent sensitivity of r (or 1 for
// the absolute score). One record per grid, carrying the worst neighbour.
inline Report check_score_sensitivity(const PointSet& ps, const TuneConfig& cfg,
                                      const std::string& label = "instance") {
  cfg.validate();
  const std::size_t n = ps.size();
  const double lambda = NoiseSpec::for_budget(cfg.budget).lambda;
  const bool relative = cfg.score_kind == ScoreKind::kRelative;
  if (relative) SanityBound(cfg.delta, n);  // rejects rho <= 1
  const std::optional<double> rho =
      relative ? std::optional<double>(cfg.delta * n) : std::nullopt;
  const std::optional<double> rho_next =
      relative ? std::optional<double>(cfg.delta * (n + 1)) : std::nullopt;

  Report report;
  for (int g : cfg.grid_candidates) {
    const BruteScorer scorer(ps.domain(), g, cfg.workload);
    std::vector<double> l1;
    for (std::size_t t = 0; t < cfg.workload.size(); ++t) {
      l1.push_back(scorer.alpha_l1(t));
    }
    const double bound = relative
                             ? rel_sensitivity_avg(cfg.delta, n, lambda, l1)
                             : abs_sensitivity();
    const double base = scorer.score(ps.points(), nullptr, lambda, rho);

    double worst = 0.0;
    Point worst_p{};
    const GridSpec grid(ps.domain(), g);
    for (const Point& p :
         internal::union_neighbor_points(ps.domain(), g, cfg.workload)) {
      const double s = scorer.score(ps.points(), &p, lambda, rho_next);
      const double diff = std::abs(base - s);
      if (diff > worst) {
        worst = diff;
        worst_p = p;
      }
    }
    report.records.push_back(Record{
        relative ? "score_sensitivity" : "score_sensitivity_abs",
        label + " g=" + std::to_string(g) + " worst_neighbor=" +
            internal::describe(worst_p) + " cases=" +
            internal::case_codes(grid, cfg.workload, worst_p),
        worst, bound, worst <= bound});
  }
  return report;
}

// Monte-Carlo mean of |noisy response - true| against the absolute bound,
// and (when rho is set) the relative form against the relative bound. Noise
// is drawn independently of the library sampler.
inline Report check_error_bound(const PointSet& ps, const GridSpec& grid,
                                const Rect& qr, double lambda, int trials,
                                RngStream& rng,
                                std::optional<double> rho = std::nullopt,
                                const std::string& label = "instance") {
  const BruteScorer scorer(ps.domain(), grid.g(), {qr});
  const std::vector<double> c = scorer.counts(ps.points(), nullptr);
  const std::vector<double>& alpha = scorer.alphas()[0];
  const double truth = scorer.true_count(ps.points(), nullptr, 0);

  std::exponential_distribution<double> expo(1.0);
  double sum = 0.0, sum_sq = 0.0, rsum = 0.0, rsum_sq = 0.0;
  for (int k = 0; k < trials; ++k) {
    double resp = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (alpha[i] == 0.0) continue;
      const double y = lambda * (expo(rng) - expo(rng));
      resp += alpha[i] * (c[i] + y);
    }
    const double e = std::abs(resp - truth);
    sum += e;
    sum_sq += e * e;
    if (rho) {
      const double r = e / std::max(truth, *rho);
      rsum += r;
      rsum_sq += r * r;
    }
  }
  const double m = sum / trials;
  const double se = std::sqrt(std::max(0.0, sum_sq / trials - m * m) / trials);

  const QueryStats qs = query_stats(ps, build(ps, grid), qr);
  Report report;
  const double abs_bound = abs_error_bound(qs, lambda);
  report.records.push_back(Record{"error_bound_abs", label, m, abs_bound,
                                  m <= abs_bound + 3.0 * se});
  if (rho) {
    const double rm = rsum / trials;
    const double rse =
        std::sqrt(std::max(0.0, rsum_sq / trials - rm * rm) / trials);
    const double rel_bound = rel_error_bound(qs, lambda, *rho);
    report.records.push_back(Record{"error_bound_rel", label, rm, rel_bound,
                                    rm <= rel_bound + 3.0 * rse});
  }
  return report;
}

// Exact Phase-1 selection probabilities on D and on every enumerated
// neighbour; the worst two-sided probability ratio must not exceed e^eps1.
inline Report check_exp_mechanism_dp(const PointSet& ps, const TuneConfig& cfg,
                                     const std::string& label = "instance") {
  const SelectionDistribution base = selection_distribution(ps, cfg);
  std::vector<Point> lattice;
  for (int g : cfg.grid_candidates) {
    for (const Point& p :
         internal::union_neighbor_points(ps.domain(), g, cfg.workload)) {
      lattice.push_back(p);
    }
  }
  std::sort(lattice.begin(), lattice.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  lattice.erase(std::unique(lattice.begin(), lattice.end()), lattice.end());

  double worst = 1.0;
  std::string where = "none";
  for (const Point& p : lattice) {
    const SelectionDistribution nb =
        selection_distribution(ps.with_point(p), cfg);
    for (std::size_t r = 0; r < base.probabilities.size(); ++r) {
      const double a = base.probabilities[r];
      const double b = nb.probabilities[r];
      const double ratio = std::max(a / b, b / a);
      if (ratio > worst) {
        worst = ratio;
        where = "g=" + std::to_string(base.grids[r]) +
                " neighbor=" + internal::describe(p);
      }
    }
  }
  const double bound = std::exp(cfg.budget.eps1());
  return Report{{Record{"exp_mechanism_dp",
                        label + " eps1=" +
                            dpgrid::internal::format_double(cfg.budget.eps1()) + " " +
                            where,
                        worst, bound, worst <= bound + 1e-9}}};
}

// Sum_i alpha_i * cellArea == Area(qr cap domain) on randomized geometry.
inline Report check_overlap_conservation(RngStream& rng, int cases) {
  double worst = 0.0;
  int failures = 0;
  std::string first_failure;
  for (int k = 0; k < cases; ++k) {
    const double x0 = -100.0 + 200.0 * rng.uniform();
    const double y0 = -100.0 + 200.0 * rng.uniform();
    const double w = 0.1 + 200.0 * rng.uniform();
    const double h = 0.1 + 200.0 * rng.uniform();
    const Rect domain{x0, y0, x0 + w, y0 + h};
    const int g = 1 + static_cast<int>(rng() % 64);
    const GridSpec grid(domain, g);

    Rect qr;
    const double kind = rng.uniform();
    if (kind < 0.1) {  // disjoint
      qr = Rect{domain.x_max + 1.0, domain.y_min, domain.x_max + 2.0,
                domain.y_max};
    } else if (kind < 0.2) {  // one exact cell
      qr = cell_rect(grid, rng() % grid.num_cells());
    } else if (kind < 0.3) {  // superset of the domain
      qr = Rect{domain.x_min - 1.0, domain.y_min - 1.0, domain.x_max + 1.0,
                domain.y_max + 1.0};
    } else {  // random, possibly sticking out
      const double a = domain.x_min - 0.2 * w + 1.4 * w * rng.uniform();
      const double b = domain.y_min - 0.2 * h + 1.4 * h * rng.uniform();
      qr = Rect{a, b, a + 1e-3 * w + w * rng.uniform(),
                b + 1e-3 * h + h * rng.uniform()};
    }

    double lhs = 0.0;
    for (const auto& [idx, alpha] : overlap_vector(grid, qr)) {
      lhs += alpha * cell_rect(grid, idx).area();
    }
    const double xo = std::max(0.0, std::min(qr.x_max, domain.x_max) -
                                        std::max(qr.x_min, domain.x_min));
    const double yo = std::max(0.0, std::min(qr.y_max, domain.y_max) -
                                        std::max(qr.y_min, domain.y_min));
    const double rhs = xo * yo;
    const double err =
        rhs > 0.0 ? std::abs(lhs - rhs) / rhs : (lhs == 0.0 ? 0.0 : 1.0);
    worst = std::max(worst, err);
    if (!(err <= 1e-9)) {
      if (failures++ == 0) {
        first_failure = " first_failure: g=" + std::to_string(g) +
                        " domain=" + domain.to_string() +
                        " qr=" + qr.to_string();
      }
    }
  }
  return Report{{Record{"overlap_conservation",
                        std::to_string(cases) + " cases, " +
                            std::to_string(failures) + " failures" +
                            first_failure,
                        worst, 1e-9, failures == 0}}};
}

// Empirical Pr[s(g*) <= OPT - gap(tau)] over seeded Phase-1 runs, against
// e^-tau plus three binomial standard errors.
inline Report check_utility_tail(const PointSet& ps, const TuneConfig& cfg,
                                 int runs, const std::vector<double>& taus,
                                 const RngStream& rng,
                                 const std::string& label = "instance") {
  const SelectionDistribution dist = selection_distribution(ps, cfg);
  const double opt = *std::max_element(dist.scores.begin(), dist.scores.end());
  const int n_opt = static_cast<int>(
      std::count(dist.scores.begin(), dist.scores.end(), opt));
  const double delta_max =
      *std::max_element(dist.sensitivities.begin(), dist.sensitivities.end());

  std::vector<double> selected_scores;
  selected_scores.reserve(runs);
  for (int k = 0; k < runs; ++k) {
    RngStream run_rng = rng.substream(static_cast<std::uint64_t>(k));
    const TuneResult tr = phase1_select(ps, cfg, run_rng);
    const auto it =
        std::find(dist.grids.begin(), dist.grids.end(), tr.selected_g);
    selected_scores.push_back(dist.scores[it - dist.grids.begin()]);
  }

  Report report;
  for (double tau : taus) {
    const UtilityTail tail = utility_tail_threshold(
        {delta_max, cfg.budget.eps1(),
         static_cast<int>(dist.grids.size()), n_opt, tau});
    const auto bad = std::count_if(
        selected_scores.begin(), selected_scores.end(),
        [&](double s) { return s <= opt - tail.threshold_gap; });
    const double freq = static_cast<double>(bad) / runs;
    const double p = tail.failure_prob;
    const double bound = p + 3.0 * std::sqrt(p * (1.0 - p) / runs);
    report.records.push_back(Record{
        "utility_tail",
        label + " tau=" + dpgrid::internal::format_double(tau) +
            " gap=" + dpgrid::internal::format_double(tail.threshold_gap),
        freq, bound, freq <= bound});
  }
  return report;
}

}  // namespace dpgrid::oracle

#endif  // DPGRID_ORACLE_HPP_
