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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 only
// when every criterion passes.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles/dp_speed_oracle.hpp"
#include "oracles/gp_dense_oracle.hpp"
#include "raceline/baseline.hpp"
#include "raceline/bayesopt.hpp"
#include "raceline/config.hpp"

namespace fs = std::filesystem;
using namespace raceline;
using Eigen::VectorXd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> read_numeric_csv(const fs::path& p) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> row;
    for (const auto& c : detail::split_csv_row(line)) row.push_back(std::stod(c));
    rows.push_back(std::move(row));
  }
  return rows;
}

VehicleParams unit_vehicle() {
  VehicleParams p;
  p.mass = 1.0;
  p.l_front = 0.5;
  p.l_rear = 0.5;
  p.mu_s = 1.0;
  p.v_cap = 50.0;
  return p;
}

// 1 -------------------------------------------------------------------------
Outcome straight_launch() {
  const VehicleParams p = unit_vehicle();
  const std::vector<Vec2> wp{{0, 0}, {100.0 / 3, 0}, {200.0 / 3, 0}, {100, 0}};
  const auto t0 = std::chrono::steady_clock::now();
  const SpeedProfile prof = solve_speed_profile(fit_and_resample(wp, false, 100), p);
  const double ms = 1e3 * elapsed(t0);
  const double expected = std::sqrt(2.0 * 100.0 / (p.drive_fraction() * p.grip()));
  const double rel = std::abs(prof.lap_time - expected) / expected;
  return {rel <= 0.005 && ms < 10.0, fmt("lap %.5f s vs %.5f s (%.3f%%), %.2f ms", prof.lap_time, expected, 100 * rel, ms)};
}

// 2 -------------------------------------------------------------------------
Outcome circle_bound() {
  const VehicleParams p = unit_vehicle();
  const double radius = 10.0;
  const SpeedProfile prof = solve_speed_profile(fit_and_resample(testing::circle_points(radius, 1440), true, 100), p);
  const double bound = std::sqrt(p.grip() * radius);
  double worst_over = -1.0, worst_steady = 0.0;
  for (std::size_t k = 0; k < prof.size(); ++k) worst_over = std::max(worst_over, prof.speeds[k] / bound - 1.0);
  // Launch transient: the speed first comes within 1% of the bound.
  std::size_t settle = prof.size();
  for (std::size_t k = 0; k < prof.size(); ++k) {
    if (prof.speeds[k] >= 0.99 * bound) {
      settle = k;
      break;
    }
  }
  for (std::size_t k = settle; k < prof.size(); ++k) worst_steady = std::max(worst_steady, std::abs(prof.speeds[k] / bound - 1.0));
  const bool pass = worst_over <= 1e-6 && settle < prof.size() && worst_steady <= 0.01;
  return {pass, fmt("max v/bound - 1 = %.2e, steady from station %zu of %zu, max deviation %.3f%%", worst_over, settle, prof.size(),
                    100 * worst_steady)};
}

// 3 -------------------------------------------------------------------------
Outcome dp_oracle() {
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  int paths = 0;
  for (int trial = 0; trial < 20; ++trial) {
    VehicleParams p = unit_vehicle();
    p.l_front = 0.3 + 0.4 * unit(rng);
    p.l_rear = 0.3 + 0.4 * unit(rng);
    p.mu_s = 0.6 + 0.8 * unit(rng);
    p.v_cap = 10.0 + 10.0 * unit(rng);
    const int n = 10 + static_cast<int>(20 * unit(rng));
    const SampledPath path = fit_and_resample(testing::wiggly_waypoints(n, 2.0, 0.5 + 1.5 * unit(rng), rng), false, 60);
    const double oracle = testing::dp_min_time(path.curvature, path.segment_lengths, {p.grip(), p.drive_fraction(), p.v_cap}, 2000);
    const double solver = solve_speed_profile(path, p).lap_time;
    worst = std::max(worst, std::abs(solver - oracle) / oracle);
    ++paths;
  }
  return {worst <= 0.01, fmt("%d random paths, worst relative gap %.3f%%", paths, 100 * worst)};
}

// 4 -------------------------------------------------------------------------
Dataset random_dataset(int n_points, int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Dataset d;
  d.inputs = Eigen::MatrixXd(n_points, dim);
  d.outputs = VectorXd(n_points);
  for (int i = 0; i < n_points; ++i) {
    double y = 5.0;
    for (int j = 0; j < dim; ++j) {
      d.inputs(i, j) = unit(rng);
      y += std::sin(2.0 * d.inputs(i, j) + j);
    }
    d.outputs[i] = y + 0.1 * unit(rng);
  }
  return d;
}

Outcome gp_oracle() {
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double mean_err = 0.0, var_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n_points = 2 + static_cast<int>(unit(rng) * 9);
    const int dim = 1 + static_cast<int>(unit(rng) * 20);
    const Dataset d = random_dataset(n_points, dim, rng);
    Hyperparams h;
    h.lengthscales = VectorXd(dim);
    for (int j = 0; j < dim; ++j) h.lengthscales[j] = 0.3 + 2.0 * unit(rng);
    h.signal_variance = 0.5 + 2.0 * unit(rng);
    h.noise_variance = 1e-4 + 1e-2 * unit(rng);
    h.prior_mean = 5.0 + unit(rng);
    const FittedGP gp(d, h);
    const testing::DenseGpParams dp{h.lengthscales, h.signal_variance, h.noise_variance, h.prior_mean};
    for (int q = 0; q < 5; ++q) {
      const VectorXd x = VectorXd::Random(dim);
      const Prediction p = gp.predict(x);
      const auto o = testing::dense_predict(d.inputs, d.outputs, x, dp);
      mean_err = std::max(mean_err, std::abs(p.mean - o.mean) / std::abs(o.mean));
      var_err = std::max(var_err, std::abs(p.variance - std::max(o.variance, 0.0)) / h.signal_variance);
    }
  }

  // Noiseless interpolation.
  double interp = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset d = random_dataset(8, 4, rng);
    Hyperparams h;
    h.lengthscales = VectorXd::Constant(4, 0.8);
    h.signal_variance = 1.0;
    h.noise_variance = 0.0;
    h.prior_mean = d.outputs.mean();
    const FittedGP gp(d, h);
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      interp = std::max(interp, std::abs(gp.predict(d.inputs.row(i).transpose()).mean - d.outputs[i]) / std::abs(d.outputs[i]));
    }
  }

  // Likelihood gradient against central differences in log space.
  double grad = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 1 + trial % 6;
    Dataset d = random_dataset(5 + trial % 5, dim, rng);
    const auto [m, s] = output_standardization(d.outputs);
    d.outputs = (d.outputs.array() - m) / s;
    Hyperparams h;
    h.lengthscales = VectorXd(trial % 2 == 0 ? dim : 1);
    for (Eigen::Index j = 0; j < h.lengthscales.size(); ++j) h.lengthscales[j] = 0.3 + 2.0 * unit(rng);
    h.signal_variance = 0.3 + 2.0 * unit(rng);
    h.noise_variance = 1e-3 + 0.05 * unit(rng);
    const LikelihoodValue v = log_marginal_likelihood(d, h);
    const VectorXd theta = pack_log(h);
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      VectorXd up = theta, down = theta;
      up[i] += 1e-5;
      down[i] -= 1e-5;
      const double fd = (log_marginal_likelihood(d, unpack_log(up, 0.0)).value - log_marginal_likelihood(d, unpack_log(down, 0.0)).value) / 2e-5;
      grad = std::max(grad, std::abs(v.gradient[i] - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  const bool pass = mean_err <= 1e-10 && var_err <= 1e-10 && interp <= 1e-6 && grad <= 1e-4;
  return {pass, fmt("dense oracle: mean %.1e, variance %.1e (100 datasets); interpolation %.1e; gradient vs FD %.1e", mean_err, var_err,
                    interp, grad)};
}

// 5 -------------------------------------------------------------------------
Outcome ei_monte_carlo() {
  std::mt19937_64 rng(5005);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr int kDraws = 1'000'000;
  double worst = 0.0;
  int within = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const double mean = 10.0 + 4.0 * (unit(rng) - 0.5);
    const double sigma = 0.05 + 2.0 * unit(rng);
    const double best = mean + sigma * 6.0 * (unit(rng) - 0.5);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < kDraws; ++i) {
      const double imp = std::max(best - (mean + sigma * normal(rng)), 0.0);
      sum += imp;
      sum_sq += imp * imp;
    }
    const double mc = sum / kDraws;
    const double se = std::sqrt(std::max(sum_sq / kDraws - mc * mc, 0.0) / kDraws);
    const double z = std::abs(expected_improvement(mean, sigma * sigma, best) - mc) / se;
    worst = std::max(worst, z);
    if (z <= 3.0) ++within;
  }
  const bool degenerate = expected_improvement(5.0, 0.0, 6.0) == 1.0 && expected_improvement(7.0, 0.0, 6.0) == 0.0 &&
                          expected_improvement(6.0, 0.0, 6.0) == 0.0;
  return {within == 50 && degenerate,
          fmt("%d/50 triples within 3 SE (worst %.2f SE, 1e6 draws each); sigma = 0 cases %s", within, worst, degenerate ? "exact" : "wrong")};
}

// 6 and 10 ------------------------------------------------------------------
RunConfig fixture_config(const std::string& name) { return load_config(testing::data_path("configs/" + name + ".toml")); }

LapEvaluator<> evaluator_for(const RunConfig& c) {
  return LapEvaluator<>(select_nodes(load_track(c.track, c.closed), c.nodes), c.vehicle, c.resample, c.v0);
}

ComparisonReport g_comparison;

Outcome convergence_vs_random() {
  const RunConfig c = fixture_config("ethz1_like");
  const LapEvaluator<> eval = evaluator_for(c);
  CompareConfig cc;
  cc.n_runs = 10;
  cc.evaluations = 50;
  cc.base_seed = c.optimizer.rng_seed;
  cc.bayesopt = c.optimizer;
  g_comparison = compare(eval, {parse_method("ei"), parse_method("random")}, cc);
  const MethodSummary& ei = g_comparison.methods[0];
  const MethodSummary& rnd = g_comparison.methods[1];
  if (ei.runs.size() != 10 || rnd.runs.size() != 10) return {false, "runs failed"};
  bool disjoint = true;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 40; i < 50; ++i) {
    disjoint = disjoint && ei.upper[i] < rnd.lower[i];
    gap = std::min(gap, rnd.lower[i] - ei.upper[i]);
  }
  const bool pass = ei.final_mean < rnd.final_mean && disjoint;
  return {pass, fmt("10 seeds x 50 evaluations: EI mean final %.4f s [%.4f, %.4f], random %.4f s [%.4f, %.4f]; smallest gap between bands "
                    "over evaluations 41-50 %.4f s",
                    ei.final_mean, ei.lower.back(), ei.upper.back(), rnd.final_mean, rnd.lower.back(), rnd.upper.back(), gap)};
}

// 7, 8, 9 -------------------------------------------------------------------
int run_cli(const std::string& args) {
  const std::string cmd = std::string(RACELINE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const fs::path g_out = fs::temp_directory_path() / "raceline_acceptance";

Outcome cli_runtime() {
  fs::remove_all(g_out);
  const auto t0 = std::chrono::steady_clock::now();
  const int code = run_cli("optimize --config " + testing::data_path("configs/ethz1_like.toml") + " --out " + (g_out / "a").string());
  const double s = elapsed(t0);
  const RunConfig c = fixture_config("ethz1_like");
  return {code == 0 && s < 180.0, fmt("optimize on ETHZ1-like (n = %d, K = %d, budget %d): exit %d in %.1f s", c.nodes, c.resample,
                                      c.optimizer.budget, code, s)};
}

Outcome gg_boundary() {
  const fs::path gg = g_out / "a" / "gg.csv";
  if (!fs::exists(gg)) return {false, "no gg.csv from the optimize run"};
  const RunConfig c = fixture_config("ethz1_like");
  const double r = c.vehicle.grip();
  const auto rows = read_numeric_csv(gg);
  std::size_t inside = 0, near = 0;
  double worst = 0.0;
  for (const auto& row : rows) {
    const double a = std::hypot(row[1], row[2]);
    worst = std::max(worst, a / r);
    if (a <= r * (1.0 + 1e-6)) ++inside;
    if (a >= 0.95 * r && a <= r * (1.0 + 1e-6)) ++near;
  }
  const double frac = static_cast<double>(near) / static_cast<double>(rows.size());
  return {inside == rows.size() && frac >= 0.6, fmt("%zu/%zu points inside the circle (max %.9f mu g), %.1f%% within 5%% of the boundary",
                                                   inside, rows.size(), worst, 100 * frac)};
}

Outcome reproducibility() {
  const int code = run_cli("optimize --config " + testing::data_path("configs/ethz1_like.toml") + " --out " + (g_out / "b").string());
  if (code != 0) return {false, fmt("second run exited %d", code)};
  bool same = true;
  std::string report;
  for (const char* f : {"history.csv", "raceline.csv"}) {
    const std::string a = slurp(g_out / "a" / f), b = slurp(g_out / "b" / f);
    const bool eq = !a.empty() && a == b;
    same = same && eq;
    report += std::string(f) + (eq ? " identical" : " DIFFERS") + " (" + std::to_string(a.size()) + " bytes); ";
  }
  return {same, report.substr(0, report.size() - 2)};
}

Outcome monotonicity() {
  std::string report;
  bool pass = true;
  for (const auto& m : g_comparison.methods) {
    for (const auto& r : m.runs) {
      for (std::size_t i = 1; i < r.best_so_far.size(); ++i) pass = pass && r.best_so_far[i] <= r.best_so_far[i - 1];
    }
  }
  report += pass ? "comparison curves nonincreasing; " : "comparison curve increases; ";

  auto check = [&](const std::string& name, const LapEvaluator<>& eval, const OptConfig& oc) {
    const RunResult r = run(eval, oc);
    bool mono = true, boxed = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& e : r.state.evaluations) {
      mono = mono && e.tau_best <= prev;
      prev = e.tau_best;
      for (std::size_t i = 0; i < e.w.size(); ++i) boxed = boxed && std::abs(e.w[i]) <= eval.nodes().half_widths[i];
    }
    const double center = eval.lap_time(OffsetVector::zeros(eval.dimension()));
    const bool better = r.best.lap_time() <= center;
    pass = pass && mono && boxed && better;
    report += fmt("%s %.4f <= %.4f s%s%s; ", name.c_str(), r.best.lap_time(), center, mono ? "" : " (tau_best increases)",
                  boxed ? "" : " (offset outside box)");
  };
  for (const char* name : {"ethz1_like", "oval", "s_curve"}) {
    const RunConfig c = fixture_config(name);
    check(name, evaluator_for(c), c.optimizer);
  }
  const LapEvaluator<> circle(select_nodes(testing::circle_track(5.0, 120, 2.0), 10), VehicleParams{}, 100);
  check("circle", circle, OptConfig{});
  return {pass, report.substr(0, report.size() - 2)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"analytic straight-line launch", straight_launch},
      {"constant-radius circle bound", circle_bound},
      {"speed solver vs DP oracle", dp_oracle},
      {"GP vs dense oracle, interpolation, gradient", gp_oracle},
      {"EI closed form vs Monte Carlo", ei_monte_carlo},
      {"BayesOpt-EI beats random search", convergence_vs_random},
      {"optimize runtime under 3 minutes", cli_runtime},
      {"GG diagram on the friction circle", gg_boundary},
      {"bit-identical reruns", reproducibility},
      {"monotonicity and racing line vs center line", monotonicity},
  };
  // Order matters: 8 and 9 read the artifacts of the optimize run in 7.
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, fn] = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  %2zu  %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, name.c_str(), o.detail.c_str(), elapsed(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
