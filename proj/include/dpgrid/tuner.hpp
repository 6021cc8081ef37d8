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

// End-to-end private grid histogram release.
//
// Phase 1 scores every candidate grid size by its (negated) data-dependent
// error bound on a tuning workload and samples one with the exponential
// mechanism under eps1. Phase 2 rebuilds the histogram at the selected size
// and adds Lap(0, 1/eps2) noise to every cell. Total spend: eps1 + eps2.

#ifndef DPGRID_TUNER_HPP_
#define DPGRID_TUNER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dpgrid/bounds.hpp"
#include "dpgrid/histogram.hpp"
#include "dpgrid/mechanisms.hpp"
#include "dpgrid/rng.hpp"
#include "dpgrid/sensitivity.hpp"

namespace dpgrid {

enum class ScoreKind { kRelative, kAbsolute };

struct TuneConfig {
  std::vector<int> grid_candidates;
  std::vector<Rect> workload;
  PrivacyBudget budget{1.0, 0.2};
  double delta = 0.1;
  SensitivityMode sensitivity_mode = SensitivityMode::kResponseDependent;
  ScoreKind score_kind = ScoreKind::kRelative;
  // Per-grid scores are computed on the raw data and must not be released.
  bool debug_diagnostics = false;

  void validate() const {
    if (grid_candidates.empty()) {
      throw std::invalid_argument("no grid size candidates");
    }
    for (std::size_t i = 0; i < grid_candidates.size(); ++i) {
      if (grid_candidates[i] < 1) {
        throw std::invalid_argument("grid candidates must be >= 1");
      }
      if (i > 0 && grid_candidates[i] <= grid_candidates[i - 1]) {
        throw std::invalid_argument(
            "grid candidates must be distinct and ascending");
      }
    }
    if (workload.empty()) throw std::invalid_argument("empty tuning workload");
    for (const Rect& r : workload) {
      if (!r.valid()) throw std::invalid_argument("invalid workload region");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
      throw std::invalid_argument("delta must lie in (0,1)");
    }
  }
};

// Debug-only, non-releasable per-grid values.
struct GridDiagnostics {
  int g = 0;
  double score = 0.0;
  double sensitivity = 0.0;
  double probability = 0.0;
};

struct TuneResult {
  int selected_g = 0;
  std::optional<std::vector<GridDiagnostics>> diagnostics;
};

// Exact Phase-1 selection distribution. Deterministic; holds raw scores.
struct SelectionDistribution {
  std::vector<int> grids;
  std::vector<double> scores;
  std::vector<double> sensitivities;
  std::vector<double> probabilities;
  // alpha_l1[r][t]: ||alpha||_1 of workload query t on candidate grid r.
  std::vector<std::vector<double>> alpha_l1;
};

inline SelectionDistribution selection_distribution(const PointSet& ps,
                                                    const TuneConfig& cfg) {
  cfg.validate();
  if (ps.empty()) throw std::invalid_argument("phase 1 needs |D| >= 1");
  const std::size_t n = ps.size();
  const double lambda = NoiseSpec::for_budget(cfg.budget).lambda;
  const bool relative = cfg.score_kind == ScoreKind::kRelative;
  std::optional<SanityBound> sanity;
  if (relative) sanity.emplace(cfg.delta, n);

  SelectionDistribution out;
  out.grids = cfg.grid_candidates;
  for (int g : cfg.grid_candidates) {
    const Histogram h = build(ps, GridSpec(ps.domain(), g));
    const WorkloadStats ws = workload_stats(ps, h, cfg.workload);
    out.scores.push_back(relative ? score(ws, lambda, sanity->rho())
                                  : abs_score(ws, lambda));
    std::vector<double> a;
    a.reserve(ws.size());
    for (const QueryStats& q : ws) a.push_back(q.alpha_l1);
    out.alpha_l1.push_back(std::move(a));
  }

  const std::size_t n_grids = out.grids.size();
  if (!relative) {
    out.sensitivities.assign(n_grids, abs_sensitivity());
  } else {
    switch (cfg.sensitivity_mode) {
      case SensitivityMode::kResponseDependent:
        for (const auto& a : out.alpha_l1) {
          out.sensitivities.push_back(
              rel_sensitivity_avg(cfg.delta, n, lambda, a));
        }
        break;
      case SensitivityMode::kGlobalMaxR: {
        std::vector<double> max_a(cfg.workload.size(), 0.0);
        for (const auto& a : out.alpha_l1) {
          for (std::size_t t = 0; t < a.size(); ++t) {
            max_a[t] = std::max(max_a[t], a[t]);
          }
        }
        out.sensitivities.assign(
            n_grids, rel_sensitivity_global_maxr(cfg.delta, n, lambda, max_a));
        break;
      }
      case SensitivityMode::kGlobalMaxCells:
        out.sensitivities.assign(
            n_grids, rel_sensitivity_global_maxcells(
                         cfg.delta, n, lambda, cfg.grid_candidates.back()));
        break;
    }
  }
  out.probabilities = exp_mechanism_probabilities(
      out.scores, out.sensitivities, cfg.budget.eps1());
  return out;
}

inline TuneResult phase1_select(const PointSet& ps, const TuneConfig& cfg,
                                RngStream& rng) {
  const SelectionDistribution dist = selection_distribution(ps, cfg);
  TuneResult result;
  result.selected_g = dist.grids[exp_mechanism_sample(rng, dist.probabilities)];
  if (cfg.debug_diagnostics) {
    std::vector<GridDiagnostics> diag;
    for (std::size_t r = 0; r < dist.grids.size(); ++r) {
      diag.push_back({dist.grids[r], dist.scores[r], dist.sensitivities[r],
                      dist.probabilities[r]});
    }
    result.diagnostics = std::move(diag);
  }
  return result;
}

inline NoisyHistogram phase2_release(const PointSet& ps, int g_star,
                                     double eps2, RngStream& rng) {
  if (g_star < 1) throw std::invalid_argument("selected grid must be >= 1");
  const Histogram h = build(ps, GridSpec(ps.domain(), g_star));
  return perturb_histogram(h, eps2, rng);
}

struct Release {
  TuneResult tune;
  NoisyHistogram histogram;
  double epsilon_spent;
};

inline Release e2e_release(const PointSet& ps, const TuneConfig& cfg,
                           const RngStream& rng) {
  RngStream select_rng = rng.substream("phase1");
  RngStream release_rng = rng.substream("phase2");
  TuneResult tune = phase1_select(ps, cfg, select_rng);
  NoisyHistogram hist =
      phase2_release(ps, tune.selected_g, cfg.budget.eps2(), release_rng);
  return Release{std::move(tune), std::move(hist),
                 cfg.budget.eps1() + cfg.budget.eps2()};
}

struct UtilityParams {
  double delta_max;  // max over candidates of the score sensitivity
  double eps1;
  int n_candidates;
  int n_opt;  // number of candidates attaining the optimal score
  double tau;
};

struct UtilityTail {
  double threshold_gap;
  double failure_prob;
};

// Pr[s(g*) <= OPT - threshold_gap] <= failure_prob.
inline UtilityTail utility_tail_threshold(const UtilityParams& up) {
  if (!(up.delta_max > 0.0) || !(up.eps1 > 0.0) || !(up.tau > 0.0) ||
      up.n_opt < 1 || up.n_opt > up.n_candidates) {
    throw std::invalid_argument("invalid utility parameters");
  }
  const double gap = 2.0 * up.delta_max / up.eps1 *
                     (std::log(static_cast<double>(up.n_candidates) /
                               static_cast<double>(up.n_opt)) +
                      up.tau);
  return UtilityTail{gap, std::exp(-up.tau)};
}

}  // namespace dpgrid

#endif  // DPGRID_TUNER_HPP_
