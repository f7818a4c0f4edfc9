// Copyright 2026 The Raceline Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// raceline: racing-line optimization from the command line.
//
//   raceline optimize --config data/configs/ethz1_like.toml --out out/ethz1
//   raceline evaluate --config data/configs/ethz1_like.toml --offsets out/ethz1/offsets.csv
//   raceline compare  --config data/configs/ethz1_like.toml --runs 10 --methods ei,nei,random

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "raceline/baseline.hpp"
#include "raceline/bayesopt.hpp"
#include "raceline/config.hpp"
#include "raceline/export.hpp"
#include "raceline/svg.hpp"

namespace fs = std::filesystem;
using namespace raceline;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config, track, acquisition, out, methods, offsets;
  int nodes = 0, budget = 0, jobs = 0, runs = 0;
  std::uint64_t seed = 0;
  bool quiet = false;
  CLI::Option *o_track = nullptr, *o_nodes = nullptr, *o_budget = nullptr, *o_seed = nullptr, *o_acq = nullptr, *o_jobs = nullptr,
              *o_out = nullptr, *o_runs = nullptr, *o_methods = nullptr;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Config file (TOML-style, or a previous summary.json)")->required();
  o.o_track = cmd->add_option("--track", o.track, "Track CSV (overrides the config)");
  o.o_nodes = cmd->add_option("--nodes", o.nodes, "Number of offset nodes");
  o.o_budget = cmd->add_option("--budget", o.budget, "BayesOpt steps after initialization");
  o.o_seed = cmd->add_option("--seed", o.seed, "Random seed");
  o.o_acq = cmd->add_option("--acquisition", o.acquisition, "ei or nei");
  o.o_jobs = cmd->add_option("--jobs", o.jobs, "Concurrent runs in compare");
  o.o_out = cmd->add_option("--out", o.out, "Output directory");
  cmd->add_flag("--quiet,-q", o.quiet, "No progress output");
}

RunConfig effective_config(const Overrides& o) {
  RunConfig c = load_config(o.config);
  if (o.o_track && o.o_track->count()) c.track = o.track;
  if (o.o_nodes && o.o_nodes->count()) c.nodes = o.nodes;
  if (o.o_budget && o.o_budget->count()) c.optimizer.budget = o.budget;
  if (o.o_seed && o.o_seed->count()) c.optimizer.rng_seed = o.seed;
  if (o.o_acq && o.o_acq->count()) c.optimizer.acquisition = parse_acquisition(o.acquisition);
  if (o.o_jobs && o.o_jobs->count()) c.jobs = o.jobs;
  if (o.o_out && o.o_out->count()) c.out = o.out;
  if (o.o_runs && o.o_runs->count()) c.runs = o.runs;
  if (o.o_methods && o.o_methods->count()) c.methods = split_methods(o.methods);
  c.validate();
  return c;
}

LapEvaluator<> make_evaluator(const RunConfig& c, const CenterLine& center) {
  return LapEvaluator<>(select_nodes(center, c.nodes), c.vehicle, c.resample, c.v0);
}

void make_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ValidationError("cannot create output directory " + dir.string());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_optimize(const Overrides& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = effective_config(o);
  const CenterLine center = load_track(c.track, c.closed);
  const LapEvaluator<> eval = make_evaluator(c, center);
  make_out_dir(c.out);

  const OptConfig& oc = c.optimizer;
  OptState st = initialize(eval, oc);
  if (!o.quiet) std::fprintf(stderr, "init: %d samples, best %.4f s\n", oc.n_init, st.tau_best);
  for (int i = 0; i < oc.budget; ++i) {
    st = step(std::move(st), eval, oc);
    const auto& h = st.history.back();
    if (!o.quiet) {
      std::fprintf(stderr, "iter %3d/%d  tau %.4f s  best %.4f s%s\n", h.iteration, oc.budget, h.tau, h.tau_best,
                   h.penalized ? "  (infeasible, penalized)" : "");
    }
    if (converged(st, oc)) break;
  }
  const TrajectoryEvaluation best = eval.evaluate(st.w_best);

  nlohmann::json center_time = nullptr;
  try {
    center_time = eval.lap_time(OffsetVector::zeros(eval.dimension()));
  } catch (const NumericalError&) {
  }

  write_file(c.out / "raceline.csv", [&](std::ostream& os) { write_profile_csv(os, best.profile); });
  write_file(c.out / "history.csv", [&](std::ostream& os) { write_history_csv(os, st); });
  write_file(c.out / "offsets.csv", [&](std::ostream& os) {
    os << "w_m\n";
    for (std::size_t i = 0; i < st.w_best.size(); ++i) os << format_double(st.w_best[i]) << '\n';
  });
  write_file(c.out / "gg.csv", [&](std::ostream& os) { write_gg_csv(os, best.profile); });
  write_file(c.out / "raceline.svg", [&](std::ostream& os) { write_raceline_svg(os, center, best.profile); });
  write_file(c.out / "gg.svg", [&](std::ostream& os) { write_gg_svg(os, best.profile, c.vehicle); });

  nlohmann::json summary;
  summary["command"] = "optimize";
  summary["lap_time_s"] = best.lap_time();
  summary["tau_best_s"] = st.tau_best;
  summary["center_line_lap_time_s"] = center_time;
  summary["seed"] = oc.rng_seed;
  summary["evaluations"] = st.evaluations.size();
  summary["bayesopt_steps"] = st.history.size();
  summary["w_best_m"] = st.w_best.values;
  summary["max_boundary_excess_m"] = boundary_excess(center, best.path);
  summary["runtime_s"] = seconds_since(t0);
  summary["config"] = config_to_json(c);
  write_file(c.out / "summary.json", [&](std::ostream& os) { os << summary.dump(2) << '\n'; });

  std::printf("lap time %s s (center line %s s), %zu evaluations, %.1f s\n", format_double(best.lap_time()).c_str(),
              center_time.is_null() ? "infeasible" : format_double(center_time.get<double>()).c_str(), st.evaluations.size(),
              seconds_since(t0));
  std::printf("artifacts in %s\n", c.out.string().c_str());
  return 0;
}

OffsetVector read_offsets(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("offsets file not found: " + path.string());
  std::vector<double> values;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::replace(raw.begin(), raw.end(), ',', ' ');
    std::istringstream cells(raw);
    std::string cell;
    while (cells >> cell) {
      if (values.empty() && line_no == 1 && !std::isdigit(static_cast<unsigned char>(cell[0])) && cell[0] != '-' && cell[0] != '+' &&
          cell[0] != '.') {
        continue;  // header
      }
      values.push_back(detail::parse_number(cell, path.string(), line_no));
    }
  }
  return OffsetVector(std::move(values));
}

int cmd_evaluate(const Overrides& o) {
  const RunConfig c = effective_config(o);
  const CenterLine center = load_track(c.track, c.closed);
  const LapEvaluator<> eval = make_evaluator(c, center);
  const OffsetVector w = o.offsets.empty() ? OffsetVector::zeros(eval.dimension()) : read_offsets(o.offsets);
  check_offsets(eval.nodes(), w);
  const TrajectoryEvaluation e = eval.evaluate(w);
  make_out_dir(c.out);
  write_file(c.out / "profile.csv", [&](std::ostream& os) { write_profile_csv(os, e.profile); });
  std::printf("lap_time_s %s\n", format_double(e.lap_time()).c_str());
  return 0;
}

int cmd_compare(const Overrides& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig c = effective_config(o);
  std::vector<MethodSpec> methods;
  for (const auto& m : c.methods) methods.push_back(parse_method(m));
  const CenterLine center = load_track(c.track, c.closed);
  const LapEvaluator<> eval = make_evaluator(c, center);
  make_out_dir(c.out);

  CompareConfig cc;
  cc.evaluations = c.optimizer.n_init + c.optimizer.budget;
  cc.n_runs = c.runs;
  cc.base_seed = c.optimizer.rng_seed;
  cc.jobs = c.jobs;
  cc.bayesopt = c.optimizer;
  if (!o.quiet) {
    std::fprintf(stderr, "compare: %zu methods x %d runs x %d evaluations, %d job(s)\n", methods.size(), cc.n_runs, cc.evaluations, cc.jobs);
  }
  const ComparisonReport rep = compare(eval, methods, cc);
  for (const auto& m : rep.methods) {
    for (const auto& f : m.failures) log_warning(m.label + " " + f);
  }

  write_file(c.out / "comparison.csv", [&](std::ostream& os) { write_comparison_csv(os, rep); });
  write_file(c.out / "comparison.json", [&](std::ostream& os) { os << comparison_json(rep).dump(2) << '\n'; });
  write_file(c.out / "comparison.svg", [&](std::ostream& os) { write_comparison_svg(os, rep); });

  nlohmann::json summary;
  summary["command"] = "compare";
  summary["seed"] = c.optimizer.rng_seed;
  summary["evaluations_per_run"] = cc.evaluations;
  summary["final_mean_s"] = nlohmann::json::object();
  for (const auto& m : rep.methods) {
    summary["final_mean_s"][m.label] = std::isfinite(m.final_mean) ? nlohmann::json(m.final_mean) : nlohmann::json(nullptr);
  }
  summary["runtime_s"] = seconds_since(t0);
  summary["config"] = config_to_json(c);
  write_file(c.out / "summary.json", [&](std::ostream& os) { os << summary.dump(2) << '\n'; });

  for (const auto& m : rep.methods) {
    if (m.mean.empty()) {
      std::printf("%-8s all runs failed\n", m.label.c_str());
    } else {
      std::printf("%-8s final best %.4f s  95%% band [%.4f, %.4f]  (%zu runs)\n", m.label.c_str(), m.final_mean, m.lower.back(),
                  m.upper.back(), m.runs.size());
    }
  }
  std::printf("artifacts in %s\n", c.out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Racing-line optimization with Bayesian optimization over lateral offsets"};
  app.require_subcommand(1);
  Overrides opt, eva, cmp;

  CLI::App* optimize = app.add_subcommand("optimize", "Optimize the racing line and write its artifacts");
  add_common(optimize, opt);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Lap time of one offset vector (all zeros without --offsets)");
  add_common(evaluate, eva);
  evaluate->add_option("--offsets", eva.offsets, "File with one offset per node (m)");

  CLI::App* comparison = app.add_subcommand("compare", "Compare sampling methods over repeated runs");
  add_common(comparison, cmp);
  cmp.o_runs = comparison->add_option("--runs", cmp.runs, "Runs per method (>= 2)");
  cmp.o_methods = comparison->add_option("--methods", cmp.methods, "Comma-separated subset of random,ei,nei");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(opt);
    if (evaluate->parsed()) return cmd_evaluate(eva);
    return cmd_compare(cmp);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
