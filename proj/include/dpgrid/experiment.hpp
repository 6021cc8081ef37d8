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

// Seeded experiment runner: runs each release method on fresh substreams,
// evaluates it on a fresh query workload and reports the median relative
// error per query size.
//
// Output ordering is canonical (method, setting, query size, repeat), so the
// results are byte-identical for a fixed seed whatever the thread count.

#ifndef DPGRID_EXPERIMENT_HPP_
#define DPGRID_EXPERIMENT_HPP_

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "dpgrid/baselines.hpp"
#include "dpgrid/evaluate.hpp"
#include "dpgrid/io.hpp"
#include "dpgrid/synth.hpp"
#include "dpgrid/tuner.hpp"
#include "json.hpp"

namespace dpgrid {

inline constexpr const char* kVersion = "0.1.0";

enum class Method { kE2E, kHeuristic, kLeaky, kBest };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::kE2E:
      return "e2e";
    case Method::kHeuristic:
      return "heuristic";
    case Method::kLeaky:
      return "leaky";
    case Method::kBest:
      return "best";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "e2e") return Method::kE2E;
  if (s == "heuristic") return Method::kHeuristic;
  if (s == "leaky") return Method::kLeaky;
  if (s == "best") return Method::kBest;
  throw std::invalid_argument("unknown method '" + s + "'");
}

inline std::string to_string(ScoreKind k) {
  return k == ScoreKind::kRelative ? "relative" : "absolute";
}

inline ScoreKind parse_score_kind(const std::string& s) {
  if (s == "relative") return ScoreKind::kRelative;
  if (s == "absolute") return ScoreKind::kAbsolute;
  throw std::invalid_argument("unknown score kind '" + s + "'");
}

// Defaults mirror the small-dataset settings: delta 0.1, epsilon 1, eps1 at
// 20% of the budget, six query sizes with 100 positions, 100 repeats.
struct ExperimentConfig {
  std::string dataset = "synthetic";
  std::string points_csv;  // empty: synthesize
  std::size_t synth_n = 8938;
  std::string synth_preset = "clustered";
  std::optional<Rect> domain;

  std::vector<Method> methods{Method::kE2E};
  std::vector<int> grids{30, 40, 50, 60, 70, 80};
  std::vector<double> epsilon{1.0};
  std::vector<double> eps1_frac{0.2};
  std::vector<double> delta{0.1};
  SensitivityMode sensitivity_mode = SensitivityMode::kResponseDependent;
  ScoreKind score = ScoreKind::kRelative;
  double heuristic_c = 10.0;

  std::vector<double> qr_fracs{0.1, 0.2, 0.3, 0.4, 0.5, 0.8};
  int tune_positions = 100;
  int eval_positions = 100;
  int repeats = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    if (methods.empty()) throw std::invalid_argument("no methods");
    if (grids.empty()) throw std::invalid_argument("no grid candidates");
    if (epsilon.empty() || eps1_frac.empty() || delta.empty()) {
      throw std::invalid_argument("empty parameter list");
    }
    WorkloadSpec{qr_fracs, tune_positions}.validate();
    WorkloadSpec{qr_fracs, eval_positions}.validate();
  }
};

namespace internal {

template <typename T, typename F>
std::vector<T> parse_list(const std::string& value, F&& parse_one) {
  std::vector<T> out;
  for (std::string_view item : split(value, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_one(std::string(item)));
  }
  if (out.empty()) throw std::invalid_argument("empty list '" + value + "'");
  return out;
}

inline double to_double(const std::string& s) {
  const auto v = parse_double(s);
  if (!v) throw std::invalid_argument("not a number: '" + s + "'");
  return *v;
}

inline long long to_integer(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    if constexpr (std::is_floating_point_v<T>) {
      os << format_double(v[i]);
    } else if constexpr (std::is_same_v<T, Method>) {
      os << to_string(v[i]);
    } else {
      os << v[i];
    }
  }
  return os.str();
}

}  // namespace internal

// Keys that apply_setting accepts; identical to the field names.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "dataset",      "points_csv",     "synth_n",    "synth_preset",
      "domain",       "method",         "grids",      "epsilon",
      "eps1_frac",    "delta",          "sensitivity_mode",
      "score",        "heuristic_c",    "qr_fracs",   "tune_positions",
      "eval_positions", "repeats",      "seed",       "threads"};
  return keys;
}

inline void apply_setting(ExperimentConfig& cfg, const std::string& key,
                          const std::string& raw) {
  using internal::parse_list;
  using internal::to_double;
  using internal::to_integer;
  const std::string value(internal::trim(raw));
  if (key == "dataset") {
    cfg.dataset = value;
  } else if (key == "points_csv") {
    cfg.points_csv = value;
  } else if (key == "synth_n") {
    cfg.synth_n = static_cast<std::size_t>(to_integer(value));
  } else if (key == "synth_preset") {
    if (value != "uniform" && value != "clustered") {
      throw std::invalid_argument("synth_preset must be uniform|clustered");
    }
    cfg.synth_preset = value;
  } else if (key == "domain") {
    cfg.domain = parse_rect(value);
  } else if (key == "method") {
    cfg.methods = parse_list<Method>(value, parse_method);
  } else if (key == "grids") {
    cfg.grids = parse_list<int>(
        value, [](const std::string& s) { return int(to_integer(s)); });
    std::sort(cfg.grids.begin(), cfg.grids.end());
    cfg.grids.erase(std::unique(cfg.grids.begin(), cfg.grids.end()),
                    cfg.grids.end());
  } else if (key == "epsilon") {
    cfg.epsilon = parse_list<double>(value, to_double);
  } else if (key == "eps1_frac") {
    cfg.eps1_frac = parse_list<double>(value, to_double);
  } else if (key == "delta") {
    cfg.delta = parse_list<double>(value, to_double);
  } else if (key == "sensitivity_mode") {
    cfg.sensitivity_mode = parse_sensitivity_mode(value);
  } else if (key == "score") {
    cfg.score = parse_score_kind(value);
  } else if (key == "heuristic_c") {
    cfg.heuristic_c = to_double(value);
  } else if (key == "qr_fracs") {
    cfg.qr_fracs = parse_list<double>(value, to_double);
  } else if (key == "tune_positions") {
    cfg.tune_positions = static_cast<int>(to_integer(value));
  } else if (key == "eval_positions") {
    cfg.eval_positions = static_cast<int>(to_integer(value));
  } else if (key == "repeats") {
    cfg.repeats = static_cast<int>(to_integer(value));
  } else if (key == "seed") {
    cfg.seed = std::stoull(value);
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(to_integer(value));
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

// Flat `key = value` text; '#' starts a comment.
inline void apply_config_text(ExperimentConfig& cfg, std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = line;
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) {
      sv = sv.substr(0, hash);
    }
    sv = internal::trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(lineno, "expected key=value");
    }
    const std::string key(internal::trim(sv.substr(0, eq)));
    try {
      apply_setting(cfg, key, std::string(sv.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw ParseError(lineno, e.what());
    }
  }
}

inline void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  apply_config_text(cfg, in);
}

struct ResultRow {
  std::string dataset;
  Method method;
  double epsilon;
  std::optional<double> eps1_frac;  // e2e only
  std::optional<double> delta;      // e2e only
  std::string sensitivity_mode;     // e2e only
  double qr_frac;
  int repeat;
  int selected_g;
  double median_rel_err;
  int zero_true_count;
};

inline constexpr const char* kResultsHeader =
    "dataset,method,epsilon,eps1_frac,delta,sensitivity_mode,qr_frac,repeat,"
    "selected_g,median_rel_err,zero_true_count";

inline void write_results_csv(std::ostream& out,
                              const std::vector<ResultRow>& rows) {
  using internal::format_double;
  out << kResultsHeader << '\n';
  for (const ResultRow& r : rows) {
    out << r.dataset << ',' << to_string(r.method) << ','
        << format_double(r.epsilon) << ','
        << (r.eps1_frac ? format_double(*r.eps1_frac) : "") << ','
        << (r.delta ? format_double(*r.delta) : "") << ','
        << r.sensitivity_mode << ',' << format_double(r.qr_frac) << ','
        << r.repeat << ',' << r.selected_g << ','
        << format_double(r.median_rel_err) << ',' << r.zero_true_count << '\n';
  }
}

inline PointSet load_dataset(const ExperimentConfig& cfg,
                             std::size_t* rejected = nullptr) {
  if (!cfg.points_csv.empty()) {
    LoadedPoints lp = load_points_csv(cfg.points_csv, cfg.domain);
    if (rejected) *rejected = lp.rejected;
    return std::move(lp.points);
  }
  const Rect d = cfg.domain.value_or(Rect{0.0, 0.0, 1.0, 1.0});
  const SynthSpec spec = cfg.synth_preset == "uniform"
                             ? SynthSpec::uniform(cfg.synth_n, d)
                             : SynthSpec::clustered(cfg.synth_n, d);
  RngStream rng = RngStream(cfg.seed, 0).substream("data");
  if (rejected) *rejected = 0;
  return synth_points(spec, rng);
}

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::size_t dataset_size = 0;
  std::size_t rejected_rows = 0;
};

namespace internal {

struct Setting {
  double epsilon;
  std::optional<double> eps1_frac;
  std::optional<double> delta;
};

inline std::vector<Setting> settings_for(const ExperimentConfig& cfg,
                                         Method m) {
  std::vector<Setting> out;
  for (double eps : cfg.epsilon) {
    if (m != Method::kE2E) {
      out.push_back({eps, std::nullopt, std::nullopt});
      continue;
    }
    for (double f : cfg.eps1_frac) {
      for (double d : cfg.delta) out.push_back({eps, f, d});
    }
  }
  return out;
}

inline std::uint64_t setting_key(const Setting& s) {
  std::ostringstream os;
  os << format_double(s.epsilon) << '/'
     << (s.eps1_frac ? format_double(*s.eps1_frac) : "-") << '/'
     << (s.delta ? format_double(*s.delta) : "-");
  return hash_label(os.str());
}

struct MethodOutcome {
  int selected_g;
  EvalResult eval;
};

inline MethodOutcome run_method(const ExperimentConfig& cfg, Method m,
                                const Setting& s, const PointSet& ps,
                                const Workload& tune, const Workload& eval,
                                const RngStream& rng) {
  switch (m) {
    case Method::kE2E: {
      TuneConfig tc;
      tc.grid_candidates = cfg.grids;
      tc.workload = tune.regions;
      tc.budget = PrivacyBudget(s.epsilon, *s.eps1_frac);
      tc.delta = *s.delta;
      tc.sensitivity_mode = cfg.sensitivity_mode;
      tc.score_kind = cfg.score;
      const Release rel = e2e_release(ps, tc, rng);
      return {rel.tune.selected_g, eval_relative_error(rel.histogram, ps, eval)};
    }
    case Method::kHeuristic: {
      const int g = heuristic_grid_size({ps.size(), s.epsilon, cfg.heuristic_c});
      RngStream noise = rng.substream("release");
      const NoisyHistogram h = phase2_release(ps, g, s.epsilon, noise);
      return {g, eval_relative_error(h, ps, eval)};
    }
    case Method::kLeaky: {
      const auto sel =
          leaky_select(ps, cfg.grids, tune.regions, s.epsilon, rng);
      return {sel.g, eval_relative_error(sel.histogram, ps, eval)};
    }
    case Method::kBest: {
      const auto sel = best_select(ps, cfg.grids);
      return {sel.g, eval_relative_error(sel.histogram, ps, eval)};
    }
  }
  throw std::logic_error("unhandled method");
}

}  // namespace internal

inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const PointSet& ps) {
  cfg.validate();
  const RngStream master(cfg.seed, 0);
  const RngStream repeats_root = master.substream("repeat");

  struct Keyed {
    std::tuple<std::size_t, std::size_t, std::size_t, int> key;
    ResultRow row;
  };

  auto run_repeat = [&](int rep) {
    std::vector<Keyed> out;
    const RngStream rep_rng = repeats_root.substream(rep);
    RngStream tune_rng = rep_rng.substream("tune_workload");
    RngStream eval_rng = rep_rng.substream("eval_workload");
    const Workload tune = gen_workload(
        ps.domain(), WorkloadSpec{cfg.qr_fracs, cfg.tune_positions}, tune_rng);
    const Workload eval = gen_workload(
        ps.domain(), WorkloadSpec{cfg.qr_fracs, cfg.eval_positions}, eval_rng);
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      const Method m = cfg.methods[mi];
      const auto settings = internal::settings_for(cfg, m);
      for (std::size_t si = 0; si < settings.size(); ++si) {
        const internal::Setting& s = settings[si];
        const RngStream mrng = rep_rng.substream(to_string(m))
                                   .substream(internal::setting_key(s));
        const auto outcome =
            internal::run_method(cfg, m, s, ps, tune, eval, mrng);
        for (std::size_t q = 0; q < cfg.qr_fracs.size(); ++q) {
          out.push_back(Keyed{
              {mi, si, q, rep},
              ResultRow{cfg.dataset, m, s.epsilon, s.eps1_frac, s.delta,
                        m == Method::kE2E ? to_string(cfg.sensitivity_mode)
                                          : std::string(),
                        cfg.qr_fracs[q], rep, outcome.selected_g,
                        outcome.eval.median_per_size[q],
                        outcome.eval.zero_true_per_size[q]}});
        }
      }
    }
    return out;
  };

  int threads = cfg.threads > 0
                    ? cfg.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, cfg.repeats);

  std::vector<Keyed> all;
  if (threads == 1) {
    for (int rep = 0; rep < cfg.repeats; ++rep) {
      auto part = run_repeat(rep);
      all.insert(all.end(), part.begin(), part.end());
    }
  } else {
    std::vector<std::future<std::vector<Keyed>>> futures;
    for (int t = 0; t < threads; ++t) {
      futures.push_back(std::async(std::launch::async, [&, t] {
        std::vector<Keyed> mine;
        for (int rep = t; rep < cfg.repeats; rep += threads) {
          auto part = run_repeat(rep);
          mine.insert(mine.end(), part.begin(), part.end());
        }
        return mine;
      }));
    }
    for (auto& f : futures) {
      auto part = f.get();
      all.insert(all.end(), part.begin(), part.end());
    }
  }
  std::sort(all.begin(), all.end(),
            [](const Keyed& a, const Keyed& b) { return a.key < b.key; });

  ExperimentResult result;
  result.dataset_size = ps.size();
  result.rows.reserve(all.size());
  for (auto& k : all) result.rows.push_back(std::move(k.row));
  return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  std::size_t rejected = 0;
  const PointSet ps = load_dataset(cfg, &rejected);
  ExperimentResult r = run_experiment(cfg, ps);
  r.rejected_rows = rejected;
  return r;
}

// Configuration, seed and version of a run, for reproducibility.
inline nlohmann::json run_manifest(const ExperimentConfig& cfg,
                                   const ExperimentResult& result) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["seed"] = cfg.seed;
  nlohmann::json c;
  c["dataset"] = cfg.dataset;
  c["points_csv"] = cfg.points_csv;
  c["synth_n"] = cfg.synth_n;
  c["synth_preset"] = cfg.synth_preset;
  if (cfg.domain) {
    c["domain"] = {cfg.domain->x_min, cfg.domain->y_min, cfg.domain->x_max,
                   cfg.domain->y_max};
  }
  c["method"] = internal::join(cfg.methods);
  c["grids"] = cfg.grids;
  c["epsilon"] = cfg.epsilon;
  c["eps1_frac"] = cfg.eps1_frac;
  c["delta"] = cfg.delta;
  c["sensitivity_mode"] = to_string(cfg.sensitivity_mode);
  c["score"] = to_string(cfg.score);
  c["heuristic_c"] = cfg.heuristic_c;
  c["qr_fracs"] = cfg.qr_fracs;
  c["tune_positions"] = cfg.tune_positions;
  c["eval_positions"] = cfg.eval_positions;
  c["repeats"] = cfg.repeats;
  j["config"] = c;
  j["dataset_size"] = result.dataset_size;
  j["rejected_rows"] = result.rejected_rows;
  j["rows"] = result.rows.size();
  return j;
}

}  // namespace dpgrid

#endif  // DPGRID_EXPERIMENT_HPP_
