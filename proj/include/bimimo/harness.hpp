// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bimimo/baseline.hpp"
#include "bimimo/channel.hpp"
#include "bimimo/estimation.hpp"
#include "bimimo/scenario.hpp"

namespace bimimo {

enum class Method { vst, baseline, both };
std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

struct TargetEstimate {
  int delay_bins = 0;
  double doppler_hz = 0.0;
  double doa_deg = 0.0;
  double dod_deg = 0.0;
};

struct MethodOutcome {
  bool ran = false;
  bool ok = false;
  std::string error; // "<stage>: <message>" when !ok
  std::vector<TargetEstimate> targets;
};

struct EstimateReport {
  std::uint64_t seed = 0;
  std::vector<TruthRecord> truth;
  MethodOutcome vst;
  MethodOutcome baseline;
  std::vector<RangeDopplerPeak> range_peaks;
  double reference_power = 0.0;
  double noise_variance = 0.0;
  double clutter_variance = 0.0;
  double seconds_synthesis = 0.0;
  double seconds_vst = 0.0;
  double seconds_baseline = 0.0;
};

struct RunOptions {
  Method method = Method::vst;
  EstimatorConfig estimator;
  SynthesisOptions synthesis;
  int known_k = -1; // < 0: the scenario's target count
  bool clutter_filter = true;
};

/// Intermediate products of one run, for grid output and inspection.
struct RunArtifacts {
  CodeMatrix codes;
  SymbolSequence symbols;
  DataCube cube; // as synthesized, before the clutter filter
  std::optional<VstResult> vst;
  std::optional<BaselineResult> baseline;
};

/// Codes and symbols come from streams of `seed`; the cube from synthesize_cube
/// with the same seed. Estimation failures are caught and reported per method
/// with a stage label; scenario and I/O errors propagate.
EstimateReport run_scenario(const Scenario &sc, const RunOptions &opt, std::uint64_t seed,
                            RunArtifacts *artifacts = nullptr);

/// Minimum total angular distance assignment: result[k] = index of the
/// estimate matched to truth k, or -1 when there are fewer estimates.
std::vector<int> match_to_truth(const std::vector<TargetEstimate> &est, const std::vector<TruthRecord> &truth);

struct TargetErrors {
  double doa_deg = 0.0;
  double dod_deg = 0.0;
  bool missing = false;
};

/// Absolute angle errors per truth after matching; a failed or missing
/// estimate gets `failure_error_deg` in both angles.
std::vector<TargetErrors> angle_errors(const MethodOutcome &m, const std::vector<TruthRecord> &truth,
                                       double failure_error_deg = 180.0);

/// (1/K) sum_k sqrt(mean over trials of err_k^2); errors[trial][k].
double rmse(const std::vector<std::vector<double>> &errors);

struct McOptions {
  RunOptions run;
  std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0};
  int trials = 100;
  int jobs = 1;
  bool drop_failures = false;
  std::uint64_t seed = 1;
  int bootstrap_samples = 200;
  bool keep_reports = false;
};

struct RmseValue {
  double value = 0.0;
  double bootstrap_sd = 0.0;
};

struct RmsePoint {
  double snr_db = 0.0;
  int trials = 0;
  int vst_failures = 0;
  int baseline_failures = 0;
  RmseValue doa_vst, dod_vst, doa_m, dod_m;
  std::vector<EstimateReport> reports; // per trial when keep_reports
};

struct RmseReport {
  std::uint64_t seed = 0;
  std::vector<RmsePoint> points;
};

std::uint64_t trial_seed(std::uint64_t master, std::size_t snr_index, std::size_t trial_index);

/// Monte Carlo sweep. Trials run concurrently on up to `jobs` threads; each
/// trial is a pure function of its derived seed, so the report does not
/// depend on `jobs`.
RmseReport monte_carlo_rmse(const Scenario &sc, const McOptions &opt);

} // namespace bimimo
