// SPDX-License-Identifier: Apache-2.0
// radar: simulate a bistatic MIMO CPI and estimate range, Doppler, DOA and DOD.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "bimimo/harness.hpp"
#include "bimimo/io.hpp"
#include "bimimo/scenario.hpp"

namespace fs = std::filesystem;
using namespace bimimo;

namespace {

struct Options {
  std::string scenario;
  std::string method = "vst";
  std::optional<std::uint64_t> seed;
  std::vector<double> snr;
  std::optional<double> scr;
  int trials = 100;
  int jobs = 1;
  std::string out = "out";
  std::string code_kind;
  int known_k = -1;
  bool estimate_k = false;
  bool dump_cube = false;
  bool dump_codes = false;
  bool drop_failures = false;
  double coarse_step = 0.5;
  double refine_step = 0.01;
  double refine_span = 0.5;
  int doppler_zero_pad = 16;
  bool no_refine = false;
  bool full_virtual = false;
  bool no_clutter_filter = false;
  std::string clutter_model;
};

void add_common(CLI::App *cmd, Options &o) {
  cmd->add_option("--scenario", o.scenario, "Scenario JSON (default: built-in default scenario)")->check(CLI::ExistingFile);
  cmd->add_option("--method", o.method, "vst, baseline or both")->check(CLI::IsMember({"vst", "baseline", "both"}));
  cmd->add_option("--seed", o.seed, "Master seed (default: the scenario's rng_seed)");
  cmd->add_option("--snr", o.snr, "SNR in dB; a list for mc")->delimiter(',');
  cmd->add_option("--scr", o.scr, "Override the SCR in dB");
  cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--code-kind", o.code_kind, "mseq or gold")->check(CLI::IsMember({"mseq", "gold"}));
  auto *k = cmd->add_option("--known-k", o.known_k, "Number of targets (default: from the scenario)");
  cmd->add_flag("--estimate-k", o.estimate_k, "Estimate the target count from the eigen-gap")->excludes(k);
  cmd->add_option("--coarse-step", o.coarse_step, "Coarse angle grid step, degrees");
  cmd->add_option("--refine-step", o.refine_step, "Angle refinement step, degrees");
  cmd->add_option("--refine-span", o.refine_span, "Angle refinement half-width, degrees");
  cmd->add_option("--doppler-zero-pad", o.doppler_zero_pad, "Doppler refinement oversampling");
  cmd->add_flag("--no-doppler-refine", o.no_refine, "Report grid Doppler only");
  cmd->add_flag("--no-clutter-filter", o.no_clutter_filter, "Skip the zero-Doppler clutter notch");
  cmd->add_option("--clutter-model", o.clutter_model, "stationary or white")
      ->check(CLI::IsMember({"stationary", "white"}));
  cmd->add_flag("--full-virtual", o.full_virtual, "Virtual covariance over every row instead of the code support");
}

Scenario load(const Options &o) {
  Scenario sc = o.scenario.empty() ? default_scenario() : load_scenario(o.scenario);
  if (!o.code_kind.empty()) sc.system.code_kind = code_kind_from_string(o.code_kind);
  if (!o.snr.empty()) sc.system.snr_db = o.snr.front();
  if (o.scr) sc.system.scr_db = *o.scr;
  if (!o.clutter_model.empty()) sc.system.clutter_model = clutter_model_from_string(o.clutter_model);
  validate(sc);
  return sc;
}

RunOptions run_options(const Options &o) {
  RunOptions r;
  r.method = method_from_string(o.method);
  r.known_k = o.known_k;
  r.estimator.estimate_dim = o.estimate_k;
  r.estimator.angle_coarse_step_deg = o.coarse_step;
  r.estimator.angle_refine_step_deg = o.refine_step;
  r.estimator.angle_refine_span_deg = o.refine_span;
  r.estimator.doppler_zero_pad = o.doppler_zero_pad;
  r.estimator.refine_doppler = !o.no_refine;
  r.estimator.range_gate_virtual = !o.full_virtual;
  r.clutter_filter = !o.no_clutter_filter;
  return r;
}

nlohmann::ordered_json run_json(const std::string &command, const Scenario &sc, const Options &o, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["tool"] = "radar";
  j["version"] = "1.0.0";
  j["command"] = command;
  j["seed"] = seed;
  j["method"] = o.method;
  j["jobs"] = o.jobs;
  j["options"] = {{"known_k", o.known_k},         {"estimate_k", o.estimate_k},
                  {"coarse_step_deg", o.coarse_step}, {"refine_step_deg", o.refine_step},
                  {"refine_span_deg", o.refine_span}, {"doppler_zero_pad", o.doppler_zero_pad},
                  {"doppler_refine", !o.no_refine},   {"full_virtual", o.full_virtual},
                  {"clutter_filter", !o.no_clutter_filter},
                  {"drop_failures", o.drop_failures}};
  j["scenario"] = nlohmann::ordered_json::parse(scenario_to_json(sc));
  return j;
}

void print_report(const EstimateReport &rep) {
  auto show = [&](const char *name, const MethodOutcome &m) {
    if (!m.ran) return;
    if (!m.ok) {
      std::printf("%s: failed (%s)\n", name, m.error.c_str());
      return;
    }
    const auto match = match_to_truth(m.targets, rep.truth);
    std::printf("%s:\n  %-3s %8s %8s %11s %11s %9s %9s %9s %9s\n", name, "k", "d_true", "d_est", "F_true", "F_est",
                "doa_true", "doa_est", "dod_true", "dod_est");
    for (std::size_t t = 0; t < rep.truth.size(); ++t) {
      const auto &tr = rep.truth[t];
      if (match[t] < 0) {
        std::printf("  %-3zu %8d %8s\n", t, tr.delay_bins, "-");
        continue;
      }
      const auto &e = m.targets[match[t]];
      std::printf("  %-3zu %8d %8d %11.3f %11.3f %9.3f %9.3f %9.3f %9.3f\n", t, tr.delay_bins, e.delay_bins,
                  tr.doppler_hz, e.doppler_hz, tr.doa_deg, e.doa_deg, tr.dod_deg, e.dod_deg);
    }
  };
  show("vst", rep.vst);
  show("baseline", rep.baseline);
}

int cmd_run(const Options &o, bool grids) {
  const Scenario sc = load(o);
  const std::uint64_t seed = o.seed.value_or(sc.rng_seed);
  omp_set_num_threads(o.jobs);
  RunOptions ro = run_options(o);
  if (grids && ro.method == Method::baseline) ro.method = Method::both;
  RunArtifacts art;
  const EstimateReport rep = run_scenario(sc, ro, seed, &art);
  const fs::path out(o.out);
  io::write_estimates_csv(out / "estimates.csv", rep);
  if (grids && art.vst) {
    io::write_xi1_grid_csv(out / "xi1_grid.csv", art.vst->stage1);
    if (rep.vst.ok) io::write_xi2_grid_csv(out / "xi2_grid.csv", art.vst->stage2);
  }
  if (o.dump_cube) io::write_cube(out / "cube.c64", art.cube);
  if (o.dump_codes) io::write_codes_csv(out / "codes.csv", art.codes);

  auto j = run_json(grids ? "grids" : "run", sc, o, seed);
  j["timing_s"] = {{"synthesis", rep.seconds_synthesis}, {"vst", rep.seconds_vst}, {"baseline", rep.seconds_baseline}};
  j["noise_variance"] = rep.noise_variance;
  j["clutter_variance"] = rep.clutter_variance;
  j["reference_power"] = rep.reference_power;
  io::write_text(out / "run.json", j.dump(2) + "\n");
  print_report(rep);
  return (rep.vst.ran && !rep.vst.ok) || (rep.baseline.ran && !rep.baseline.ok) ? 3 : 0;
}

int cmd_mc(const Options &o) {
  const Scenario sc = load(o);
  McOptions mc;
  mc.run = run_options(o);
  if (!o.snr.empty()) mc.snr_db = o.snr;
  mc.trials = o.trials;
  mc.jobs = o.jobs;
  mc.drop_failures = o.drop_failures;
  mc.seed = o.seed.value_or(sc.rng_seed);
  const auto t0 = std::chrono::steady_clock::now();
  const RmseReport rep = monte_carlo_rmse(sc, mc);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const fs::path out(o.out);
  io::write_rmse_csv(out / "rmse.csv", rep);
  auto j = run_json("mc", sc, o, mc.seed);
  j["snr_db"] = mc.snr_db;
  j["trials"] = mc.trials;
  j["timing_s"] = {{"total", secs}};
  io::write_text(out / "run.json", j.dump(2) + "\n");
  std::printf("%7s %10s %10s %10s %10s %6s %6s\n", "snr_db", "doa_vst", "dod_vst", "doa_m", "dod_m", "fail_v",
              "fail_m");
  for (const auto &p : rep.points)
    std::printf("%7.1f %10.4f %10.4f %10.4f %10.4f %6d %6d\n", p.snr_db, p.doa_vst.value, p.dod_vst.value,
                p.doa_m.value, p.dod_m.value, p.vst_failures, p.baseline_failures);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Bistatic MIMO radar simulator and estimator"};
  app.require_subcommand(1);
  Options o;
  auto *run = app.add_subcommand("run", "Simulate one CPI and estimate");
  auto *mc = app.add_subcommand("mc", "Monte Carlo RMSE sweep over SNR");
  auto *grids = app.add_subcommand("grids", "Write the xi1 and xi2 surfaces of one run");
  for (auto *c : {run, mc, grids}) add_common(c, o);
  for (auto *c : {run, grids}) {
    c->add_flag("--dump-cube", o.dump_cube, "Write the raw cube (complex64) and a JSON sidecar");
    c->add_flag("--dump-codes", o.dump_codes, "Write the PN codes as CSV");
  }
  mc->add_option("--trials", o.trials, "Trials per SNR point")->check(CLI::PositiveNumber);
  mc->add_flag("--drop-failures", o.drop_failures, "Exclude failed trials from the RMSE");
  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(o, false);
    if (grids->parsed()) return cmd_run(o, true);
    if (mc->parsed()) return cmd_mc(o);
  } catch (const ScenarioError &e) {
    std::cerr << "radar: scenario error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "radar: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
