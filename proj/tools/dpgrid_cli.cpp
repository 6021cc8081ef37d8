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

// dpgrid: command-line front end.
//
//   dpgrid synth   --synth_n 5000 --out points.csv
//   dpgrid tune    --points_csv points.csv --grids 10,20,40
//   dpgrid release --points_csv points.csv --out hist.csv
//   dpgrid query   --histogram hist.csv --rect 0.1,0.1,0.4,0.5
//   dpgrid bench   --config run.cfg --out results.csv
//   dpgrid oracle  --out report.jsonl
//
// Every experiment config key is also a flag and overrides --config.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpgrid/experiment.hpp"
#include "dpgrid/io.hpp"
#include "dpgrid/oracle.hpp"
#include "dpgrid/synth.hpp"
#include "dpgrid/tuner.hpp"
#include "json.hpp"

namespace {

using namespace dpgrid;

struct Globals {
  std::string config_path;
  std::string out;
  std::map<std::string, std::string> overrides;
};

ExperimentConfig resolve_config(const Globals& g) {
  ExperimentConfig cfg;
  if (!g.config_path.empty()) apply_config_file(cfg, g.config_path);
  for (const auto& [key, value] : g.overrides) {
    if (!value.empty()) apply_setting(cfg, key, value);
  }
  return cfg;
}

// Writes to --out, or stdout when it is empty.
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write(out);
}

TuneConfig tune_config(const ExperimentConfig& cfg, const PointSet& ps) {
  RngStream wrng = RngStream(cfg.seed, 0).substream("tune_workload");
  TuneConfig tc;
  tc.grid_candidates = cfg.grids;
  tc.workload = gen_workload(ps.domain(),
                             WorkloadSpec{cfg.qr_fracs, cfg.tune_positions}, wrng)
                    .regions;
  tc.budget = PrivacyBudget(cfg.epsilon.front(), cfg.eps1_frac.front());
  tc.delta = cfg.delta.front();
  tc.sensitivity_mode = cfg.sensitivity_mode;
  tc.score_kind = cfg.score;
  return tc;
}

RngStream release_stream(const ExperimentConfig& cfg) {
  return RngStream(cfg.seed, 0).substream("e2e");
}

void report_rejected(std::size_t rejected) {
  if (rejected) std::cerr << "dpgrid: dropped " << rejected << " rows outside the domain\n";
}

int cmd_synth(const Globals& g) {
  const ExperimentConfig cfg = resolve_config(g);
  const PointSet ps = load_dataset(cfg);
  emit(g.out, [&](std::ostream& os) { write_points_csv(os, ps); });
  return 0;
}

int cmd_tune(const Globals& g) {
  const ExperimentConfig cfg = resolve_config(g);
  std::size_t rejected = 0;
  const PointSet ps = load_dataset(cfg, &rejected);
  report_rejected(rejected);
  RngStream rng = release_stream(cfg).substream("phase1");
  const TuneResult tr = phase1_select(ps, tune_config(cfg, ps), rng);
  emit(g.out, [&](std::ostream& os) { os << tr.selected_g << '\n'; });
  return 0;
}

int cmd_release(const Globals& g) {
  const ExperimentConfig cfg = resolve_config(g);
  std::size_t rejected = 0;
  const PointSet ps = load_dataset(cfg, &rejected);
  report_rejected(rejected);
  const Release rel = e2e_release(ps, tune_config(cfg, ps), release_stream(cfg));
  emit(g.out, [&](std::ostream& os) { write_histogram_csv(os, rel.histogram); });
  if (!g.out.empty()) {
    const Rect& d = ps.domain();
    const nlohmann::json meta{{"g", rel.tune.selected_g},
                              {"domain", {d.x_min, d.y_min, d.x_max, d.y_max}},
                              {"epsilon", rel.epsilon_spent}};
    std::ofstream(g.out + ".json") << meta.dump(2) << '\n';
  }
  return 0;
}

int cmd_query(const Globals& g, const std::string& hist_path,
              const std::string& rect, const std::string& meta_path) {
  const std::string meta_file = meta_path.empty() ? hist_path + ".json" : meta_path;
  std::ifstream meta_in(meta_file);
  if (!meta_in) throw std::runtime_error("cannot open " + meta_file);
  const nlohmann::json meta = nlohmann::json::parse(meta_in);
  const auto& dj = meta.at("domain");
  const Rect domain = make_rect(dj.at(0), dj.at(1), dj.at(2), dj.at(3));
  std::ifstream in(hist_path);
  if (!in) throw std::runtime_error("cannot open " + hist_path);
  const NoisyHistogram h = read_histogram_csv(in, domain);
  const double answer = range_query(h, parse_rect(rect));
  emit(g.out, [&](std::ostream& os) { os << internal::format_double(answer) << '\n'; });
  return 0;
}

int cmd_bench(const Globals& g) {
  const ExperimentConfig cfg = resolve_config(g);
  const ExperimentResult res = run_experiment(cfg);
  report_rejected(res.rejected_rows);
  emit(g.out, [&](std::ostream& os) { write_results_csv(os, res.rows); });
  if (!g.out.empty()) {
    std::ofstream(g.out + ".manifest.json") << run_manifest(cfg, res).dump(2) << '\n';
  }
  return 0;
}

// Seeded small instances through every oracle check.
int cmd_oracle(const Globals& g, int instances) {
  const ExperimentConfig cfg = resolve_config(g);
  const RngStream root(cfg.seed, 0);
  oracle::Report all;
  {
    RngStream rng = root.substream("overlap");
    all.append(oracle::check_overlap_conservation(rng, 10000));
  }
  for (int k = 0; k < instances; ++k) {
    RngStream rng = root.substream("instance").substream(static_cast<std::uint64_t>(k));
    const Rect d{0.0, 0.0, 1.0, 1.0};
    const bool uniform = k % 2 == 1;
    const std::size_t n = 40 + static_cast<std::size_t>(rng() % 260);
    const PointSet ps = synth_points(
        uniform ? SynthSpec::uniform(n, d) : SynthSpec::clustered(n, d), rng);
    TuneConfig tc;
    tc.grid_candidates = {2, 4, 8};
    const Workload wl = gen_workload(d, WorkloadSpec{{0.2, 0.5}, 2}, rng);
    tc.workload = wl.regions;
    const std::string label = "instance#" + std::to_string(k) + " n=" + std::to_string(n);

    all.append(oracle::check_score_sensitivity(ps, tc, label));
    TuneConfig abs_tc = tc;
    abs_tc.score_kind = ScoreKind::kAbsolute;
    all.append(oracle::check_score_sensitivity(ps, abs_tc, label));
    all.append(oracle::check_exp_mechanism_dp(ps, tc, label));
    const double lambda = NoiseSpec::for_budget(tc.budget).lambda;
    all.append(oracle::check_error_bound(ps, GridSpec(d, 4), tc.workload[0], lambda,
                                         10000, rng, tc.delta * n, label));
  }
  {
    RngStream rng = root.substream("utility");
    const PointSet ps = synth_points(SynthSpec::clustered(400, Rect{0, 0, 1, 1}), rng);
    TuneConfig tc;
    tc.grid_candidates = {2, 4, 8, 16, 32};
    tc.workload = gen_workload(ps.domain(), WorkloadSpec{{0.3}, 5}, rng).regions;
    all.append(oracle::check_utility_tail(ps, tc, 10000, {1.0, 2.0, 3.0},
                                          root.substream("utility_runs"), "utility"));
  }
  emit(g.out, [&](std::ostream& os) { os << all.to_json_lines(); });
  std::size_t failed = 0;
  for (const auto& r : all.records) failed += !r.pass;
  std::cerr << "dpgrid oracle: " << all.records.size() << " checks, " << failed
            << " failed\n";
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private grid histograms with private grid-size tuning"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "key = value config file");
  app.add_option("--out", g.out, "output path (default: stdout)");
  for (const std::string& key : config_keys()) {
    app.add_option("--" + key, g.overrides[key], "override config key '" + key + "'");
  }

  CLI::App* synth = app.add_subcommand("synth", "emit a synthetic points CSV");
  CLI::App* tune = app.add_subcommand("tune", "privately select a grid size and print it");
  CLI::App* release =
      app.add_subcommand("release", "tune and release a noisy histogram CSV");
  CLI::App* query = app.add_subcommand("query", "answer a rectangle on a released histogram");
  std::string hist_path, rect, meta_path;
  query->add_option("--histogram", hist_path, "histogram CSV from `release`")->required();
  query->add_option("--rect", rect, "x_min,y_min,x_max,y_max")->required();
  query->add_option("--meta", meta_path, "sidecar JSON (default: <histogram>.json)");
  CLI::App* bench = app.add_subcommand("bench", "run the experiment and write the results CSV");
  CLI::App* orc = app.add_subcommand("oracle", "run the verification checks as JSON lines");
  int instances = 8;
  orc->add_option("--instances", instances, "number of random small instances")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(g);
    if (*tune) return cmd_tune(g);
    if (*release) return cmd_release(g);
    if (*query) return cmd_query(g, hist_path, rect, meta_path);
    if (*bench) return cmd_bench(g);
    if (*orc) return cmd_oracle(g, instances);
  } catch (const std::exception& e) {
    std::cerr << "dpgrid: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
