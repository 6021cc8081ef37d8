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

#include "dpgrid/bounds.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "dpgrid/mechanisms.hpp"
#include "fixtures.hpp"
#include "gtest/gtest.h"

namespace dpgrid {
namespace {

using ::dpgrid::testing::kSection5Query;
using ::dpgrid::testing::section5_points;

QueryStats stats(double alpha, double est, std::int64_t truth) {
  return QueryStats{alpha, est, truth};
}

TEST(SanityBoundTest, RhoIsDeltaTimesN) {
  EXPECT_DOUBLE_EQ(SanityBound(0.1, 404).rho(), 40.4);
  EXPECT_THROW(SanityBound(0.1, 10), std::invalid_argument);  // rho = 1
  EXPECT_THROW(SanityBound(0.0, 100), std::invalid_argument);
  EXPECT_THROW(SanityBound(1.0, 100), std::invalid_argument);
}

TEST(QueryStatsTest, WorkedExample) {
  const PointSet ps = section5_points();
  const Histogram h = build(ps, GridSpec(ps.domain(), 4));
  const QueryStats qs = query_stats(ps, h, kSection5Query);
  EXPECT_DOUBLE_EQ(qs.estimate, 100.0);
  EXPECT_EQ(qs.true_mass, 4);
  EXPECT_DOUBLE_EQ(qs.alpha_l1, 1.0);
}

TEST(QueryStatsTest, AlignedAndEmpty) {
  std::mt19937_64 gen(3);
  const Rect d{0, 0, 1, 1};
  const PointSet ps = testing::random_points(gen, d, 300, true);
  const Histogram h = build(ps, GridSpec(d, 4));
  const QueryStats qs = query_stats(ps, h, Rect{0.25, 0.0, 0.75, 0.5});
  EXPECT_DOUBLE_EQ(qs.estimate, static_cast<double>(qs.true_mass));

  const PointSet empty(d);
  const QueryStats qe =
      query_stats(empty, build(empty, GridSpec(d, 4)), Rect{0.1, 0.1, 0.6, 0.6});
  EXPECT_EQ(qe.estimate, 0.0);
  EXPECT_EQ(qe.true_mass, 0);
}

TEST(QueryStatsTest, DomainMismatch) {
  const PointSet ps(Rect{0, 0, 1, 1});
  const Histogram h(GridSpec(Rect{0, 0, 2, 2}, 2));
  EXPECT_THROW(query_stats(ps, h, Rect{0, 0, 1, 1}), std::invalid_argument);
}

TEST(AbsBoundTest, Examples) {
  EXPECT_DOUBLE_EQ(abs_error_bound(stats(2, 2, 2), 1.0), 2.0);
  EXPECT_DOUBLE_EQ(abs_error_bound(stats(1, 100, 4), 1.0), 97.0);
  EXPECT_DOUBLE_EQ(abs_error_bound(stats(3, 5, 5), 0.0), 0.0);
}

TEST(RelBoundTest, Examples) {
  EXPECT_DOUBLE_EQ(rel_error_bound(stats(2, 2, 2), 1.0, 1.1), 1.0);
  EXPECT_DOUBLE_EQ(rel_error_bound(stats(2, 3, 0), 1.0, 10.0), 0.5);
  EXPECT_NEAR(rel_error_bound(stats(1, 100, 4), 1.0, 40.4), 2.4010, 5e-5);
  EXPECT_DOUBLE_EQ(rel_error_bound(stats(1, 100, 4), 1.0, 40.4), 97.0 / 40.4);
  EXPECT_THROW(rel_error_bound(stats(1, 1, 1), 1.0, 1.0),
               std::invalid_argument);
}

TEST(AverageBoundTest, Means) {
  // rel bounds 1.0 and 3.0 (denominators 2 and 10).
  const WorkloadStats ws{stats(2, 2, 2), stats(10, 30, 10)};
  EXPECT_DOUBLE_EQ(rel_error_bound(ws[1], 1.0, 1.1), 3.0);
  EXPECT_DOUBLE_EQ(avg_rel_error_bound(ws, 1.0, 1.1), 2.0);
  EXPECT_DOUBLE_EQ(avg_abs_error_bound(WorkloadStats{stats(2, 2, 2),
                                                     stats(4, 4, 4)},
                                       1.0),
                   3.0);
  const WorkloadStats one{stats(1, 100, 4)};
  EXPECT_DOUBLE_EQ(avg_rel_error_bound(one, 1.0, 40.4),
                   rel_error_bound(one[0], 1.0, 40.4));
  EXPECT_DOUBLE_EQ(avg_abs_error_bound(one, 1.0), 97.0);
  EXPECT_THROW(avg_rel_error_bound(WorkloadStats{}, 1.0, 2.0),
               std::invalid_argument);
  EXPECT_THROW(avg_abs_error_bound(WorkloadStats{}, 1.0),
               std::invalid_argument);
}

TEST(ScoreTest, Examples) {
  EXPECT_DOUBLE_EQ(score(WorkloadStats{stats(2, 2, 2)}, 1.0, 1.1), -1.0);
  EXPECT_NEAR(score(WorkloadStats{stats(1, 100, 4)}, 1.0, 40.4), -2.4010,
              5e-5);
  EXPECT_EQ(score(WorkloadStats{stats(4, 7, 7), stats(1, 3, 3)}, 0.0, 2.0),
            0.0);
  EXPECT_DOUBLE_EQ(abs_score(WorkloadStats{stats(2, 2, 2)}, 1.0), -2.0);
}

// Decomposition, monotonicity in lambda, score = -avg bound, score <= 0.
TEST(BoundProperties, RandomInstances) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Rect d{0, 0, 1, 1};
  for (int trial = 0; trial < 100; ++trial) {
    const PointSet ps = testing::random_points(gen, d, 50 + gen() % 400,
                                               trial % 2 == 0);
    const int g = 1 + static_cast<int>(gen() % 12);
    const Histogram h = build(ps, GridSpec(d, g));
    WorkloadStats ws;
    for (int t = 0; t < 5; ++t) {
      ws.push_back(query_stats(ps, h, testing::random_rect_inside(gen, d)));
    }
    const double rho = 0.1 * ps.size();
    const double l1 = 3.0 * u(gen), l2 = l1 + 3.0 * u(gen);
    for (const QueryStats& q : ws) {
      EXPECT_DOUBLE_EQ(abs_error_bound(q, 0.0), q.aggregation_error());
      EXPECT_NEAR(abs_error_bound(q, l1),
                  q.aggregation_error() + l1 * q.alpha_l1, 1e-12);
      EXPECT_LE(abs_error_bound(q, l1), abs_error_bound(q, l2));
      EXPECT_LE(rel_error_bound(q, l1, rho), rel_error_bound(q, l2, rho));
      QueryStats exact = q;
      exact.estimate = static_cast<double>(q.true_mass);
      EXPECT_NEAR(abs_error_bound(exact, l1), l1 * q.alpha_l1, 1e-12);
    }
    EXPECT_EQ(score(ws, l1, rho), -avg_rel_error_bound(ws, l1, rho));
    EXPECT_LE(score(ws, l1, rho), 0.0);
  }
}

// Monte-Carlo mean of the released-histogram error stays under the bound.
TEST(BoundProperties, MonteCarloDominance) {
  std::mt19937_64 gen(29);
  const Rect d{0, 0, 10, 10};
  RngStream rng(29, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const PointSet ps = testing::random_points(gen, d, 100 + gen() % 300, true);
    const int g = 2 + static_cast<int>(gen() % 7);
    const double lambda = 0.5 + trial * 0.3;
    const Histogram h = build(ps, GridSpec(d, g));
    const Rect qr = testing::random_rect_inside(gen, d);
    const QueryStats qs = query_stats(ps, h, qr);
    const double rho = 0.1 * ps.size();
    const auto overlap = overlap_vector(h.grid, qr);
    const int draws = 10000;
    double s = 0.0, s2 = 0.0, r = 0.0, r2 = 0.0;
    const double denom =
        std::max(static_cast<double>(qs.true_mass), rho);
    for (int k = 0; k < draws; ++k) {
      const NoisyHistogram noisy = perturb_histogram(h, 1.0 / lambda, rng);
      const double e =
          std::abs(range_query(noisy, overlap) - static_cast<double>(qs.true_mass));
      s += e;
      s2 += e * e;
      r += e / denom;
      r2 += (e / denom) * (e / denom);
    }
    const double mean = s / draws;
    const double se = std::sqrt((s2 / draws - mean * mean) / draws);
    EXPECT_LE(mean, abs_error_bound(qs, lambda) + 3.0 * se);
    const double rmean = r / draws;
    const double rse = std::sqrt((r2 / draws - rmean * rmean) / draws);
    EXPECT_LE(rmean, rel_error_bound(qs, lambda, rho) + 3.0 * rse);
  }
}

}  // namespace
}  // namespace dpgrid
