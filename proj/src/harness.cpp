// SPDX-License-Identifier: Apache-2.0
#include "bimimo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include <omp.h>

#include "bimimo/rng.hpp"

namespace bimimo {

std::string_view to_string(Method m) {
  switch (m) {
  case Method::vst:
    return "vst";
  case Method::baseline:
    return "baseline";
  case Method::both:
    return "both";
  }
  return "?";
}

Method method_from_string(std::string_view s) {
  if (s == "vst") return Method::vst;
  if (s == "baseline") return Method::baseline;
  if (s == "both") return Method::both;
  throw std::invalid_argument("unknown method '" + std::string(s) + "' (expected vst, baseline or both)");
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool runs_vst(Method m) { return m == Method::vst || m == Method::both; }
bool runs_baseline(Method m) { return m == Method::baseline || m == Method::both; }

// Estimation errors become a failed outcome; anything else is a bug or bad input.
template <class F> void guarded(MethodOutcome &out, const char *stage, F &&f) {
  try {
    f();
  } catch (const PeakCountError &e) {
    out.ok = false;
    out.error = std::string(stage) + ": " + e.what();
  } catch (const GeometryError &e) {
    out.ok = false;
    out.error = std::string(stage) + ": " + e.what();
  } catch (const RangeAmbiguityError &e) {
    out.ok = false;
    out.error = std::string(stage) + ": " + e.what();
  }
}

} // namespace

EstimateReport run_scenario(const Scenario &sc, const RunOptions &opt, std::uint64_t seed, RunArtifacts *artifacts) {
  validate(sc);
  EstimateReport rep;
  rep.seed = seed;

  auto t0 = std::chrono::steady_clock::now();
  RunArtifacts local;
  RunArtifacts &art = artifacts ? *artifacts : local;
  art.codes = make_codes(sc.system, derive_seed(seed, {static_cast<std::uint64_t>(Stream::codes)}));
  art.symbols =
      generate_symbols(sc.system.pris_per_cpi, derive_seed(seed, {static_cast<std::uint64_t>(Stream::symbols)}));
  const SignalModel model = make_signal_model(sc, art.codes);
  art.cube = synthesize_cube(sc, model, art.symbols, seed, opt.synthesis);
  rep.truth = art.cube.truth;
  rep.reference_power = art.cube.reference_power;
  rep.noise_variance = art.cube.noise_variance;
  rep.clutter_variance = art.cube.clutter_variance;
  rep.seconds_synthesis = seconds_since(t0);

  const int k = opt.known_k >= 0 ? opt.known_k : static_cast<int>(sc.targets.size());
  const bool nothing = k == 0 && !opt.estimator.estimate_dim;
  rep.vst.ran = runs_vst(opt.method);
  rep.baseline.ran = runs_baseline(opt.method);
  rep.vst.ok = rep.vst.ran;
  rep.baseline.ok = rep.baseline.ran;
  if (nothing) return rep;

  t0 = std::chrono::steady_clock::now();
  const DataCube filtered = opt.clutter_filter ? zero_doppler_notch(art.cube, art.symbols) : DataCube();
  const DataCube &cube = opt.clutter_filter ? filtered : art.cube;
  std::optional<StageOne> stage1;
  MethodOutcome shared;
  guarded(shared, "range-doppler",
          [&] { stage1 = range_doppler_search(cube, model, art.symbols, k, opt.estimator); });
  if (!stage1) {
    for (MethodOutcome *m : {&rep.vst, &rep.baseline})
      if (m->ran) {
        m->ok = false;
        m->error = shared.error;
      }
    return rep;
  }
  rep.range_peaks = stage1->peaks;
  const double s1 = seconds_since(t0);

  if (rep.vst.ran) {
    t0 = std::chrono::steady_clock::now();
    VstResult res;
    res.stage1 = *stage1;
    for (const auto &p : stage1->peaks) res.delay_doppler.push_back({p.delay_bins, p.doppler_hz});
    res.seconds_stage1 = s1;
    guarded(rep.vst, "doa-dod", [&] {
      res.stage2 = angle_stage(cube, model, res.delay_doppler, opt.estimator);
      for (const auto &a : res.stage2.angles) {
        const auto &dd = res.delay_doppler[a.context];
        rep.vst.targets.push_back({dd.delay_bins, dd.doppler_hz, a.doa_deg, a.dod_deg});
      }
    });
    res.seconds_stage2 = seconds_since(t0);
    rep.seconds_vst = s1 + res.seconds_stage2;
    if (artifacts) art.vst = std::move(res);
  }

  if (rep.baseline.ran) {
    t0 = std::chrono::steady_clock::now();
    BaselineResult res;
    guarded(rep.baseline, "baseline", [&] {
      res = baseline_estimate(cube, model, art.symbols, sc.system.baseline_bins, k, opt.estimator, &*stage1);
      for (const auto &t : res.targets) rep.baseline.targets.push_back({t.delay_bins, t.doppler_hz, t.doa_deg, t.dod_deg});
    });
    rep.seconds_baseline = s1 + seconds_since(t0);
    if (artifacts) art.baseline = std::move(res);
  }
  return rep;
}

std::vector<int> match_to_truth(const std::vector<TargetEstimate> &est, const std::vector<TruthRecord> &truth) {
  const int nt = static_cast<int>(truth.size());
  const int ne = static_cast<int>(est.size());
  std::vector<int> result(nt, -1);
  if (nt == 0 || ne == 0) return result;

  auto dist = [&](int t, int e) {
    return std::hypot(est[e].doa_deg - truth[t].doa_deg, est[e].dod_deg - truth[t].dod_deg);
  };
  // Enumerate assignments of estimates to truths; sizes here are tiny.
  std::vector<int> idx(std::max(nt, ne));
  std::iota(idx.begin(), idx.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  if (idx.size() <= 8) {
    do {
      double s = 0.0;
      for (int t = 0; t < nt; ++t)
        if (idx[t] < ne) s += dist(t, idx[t]);
      if (s < best - 1e-12) {
        best = s;
        for (int t = 0; t < nt; ++t) result[t] = idx[t] < ne ? idx[t] : -1;
      }
    } while (std::next_permutation(idx.begin(), idx.end()));
    return result;
  }
  std::vector<char> used(ne, 0);
  for (int t = 0; t < nt; ++t) {
    int be = -1;
    for (int e = 0; e < ne; ++e)
      if (!used[e] && (be < 0 || dist(t, e) < dist(t, be))) be = e;
    if (be >= 0) {
      used[be] = 1;
      result[t] = be;
    }
  }
  return result;
}

std::vector<TargetErrors> angle_errors(const MethodOutcome &m, const std::vector<TruthRecord> &truth,
                                       double failure_error_deg) {
  std::vector<TargetErrors> out(truth.size());
  if (!m.ok) {
    for (auto &e : out) e = {failure_error_deg, failure_error_deg, true};
    return out;
  }
  const auto match = match_to_truth(m.targets, truth);
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (match[t] < 0) {
      out[t] = {failure_error_deg, failure_error_deg, true};
      continue;
    }
    const auto &e = m.targets[match[t]];
    out[t] = {std::abs(e.doa_deg - truth[t].doa_deg), std::abs(e.dod_deg - truth[t].dod_deg), false};
  }
  return out;
}

double rmse(const std::vector<std::vector<double>> &errors) {
  if (errors.empty() || errors[0].empty()) return 0.0;
  const std::size_t k = errors[0].size();
  double sum = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    double ms = 0.0;
    for (const auto &trial : errors) ms += trial[t] * trial[t];
    sum += std::sqrt(ms / static_cast<double>(errors.size()));
  }
  return sum / static_cast<double>(k);
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t snr_index, std::size_t trial_index) {
  return derive_seed(master, {static_cast<std::uint64_t>(Stream::trial), snr_index, trial_index});
}

namespace {

RmseValue rmse_with_bootstrap(const std::vector<std::vector<double>> &errors, int samples, std::uint64_t seed) {
  RmseValue v;
  v.value = rmse(errors);
  if (errors.size() < 2 || samples < 2) return v;
  Engine rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, errors.size() - 1);
  std::vector<std::vector<double>> resampled(errors.size());
  double mean = 0.0, m2 = 0.0;
  for (int b = 0; b < samples; ++b) {
    for (auto &r : resampled) r = errors[pick(rng)];
    const double x = rmse(resampled);
    const double delta = x - mean;
    mean += delta / (b + 1);
    m2 += delta * (x - mean);
  }
  v.bootstrap_sd = std::sqrt(m2 / (samples - 1));
  return v;
}

} // namespace

RmseReport monte_carlo_rmse(const Scenario &sc, const McOptions &opt) {
  if (opt.trials < 1) throw std::invalid_argument("trials must be >= 1");
  validate(sc);
  RmseReport report;
  report.seed = opt.seed;

  const int jobs = std::max(1, opt.jobs);
  const int saved_levels = omp_get_max_active_levels();
  // Trial-level parallelism only: kernels inside a trial run serially.
  omp_set_max_active_levels(1);

  for (std::size_t s = 0; s < opt.snr_db.size(); ++s) {
    Scenario point = sc;
    point.system.snr_db = opt.snr_db[s];
    std::vector<EstimateReport> reports(opt.trials);
    std::exception_ptr failure;

#pragma omp parallel for num_threads(jobs) schedule(dynamic, 1)
    for (int t = 0; t < opt.trials; ++t) {
      try {
        reports[t] = run_scenario(point, opt.run, trial_seed(opt.seed, s, static_cast<std::size_t>(t)));
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) {
      omp_set_max_active_levels(saved_levels);
      std::rethrow_exception(failure);
    }

    RmsePoint p;
    p.snr_db = opt.snr_db[s];
    p.trials = opt.trials;
    std::vector<std::vector<double>> doa_v, dod_v, doa_m, dod_m;
    for (const auto &r : reports) {
      if (r.vst.ran) {
        if (!r.vst.ok) ++p.vst_failures;
        if (r.vst.ok || !opt.drop_failures) {
          const auto e = angle_errors(r.vst, r.truth);
          doa_v.emplace_back();
          dod_v.emplace_back();
          for (const auto &x : e) {
            doa_v.back().push_back(x.doa_deg);
            dod_v.back().push_back(x.dod_deg);
          }
        }
      }
      if (r.baseline.ran) {
        if (!r.baseline.ok) ++p.baseline_failures;
        if (r.baseline.ok || !opt.drop_failures) {
          const auto e = angle_errors(r.baseline, r.truth);
          doa_m.emplace_back();
          dod_m.emplace_back();
          for (const auto &x : e) {
            doa_m.back().push_back(x.doa_deg);
            dod_m.back().push_back(x.dod_deg);
          }
        }
      }
    }
    const int b = opt.bootstrap_samples;
    auto boot_seed = [&](std::uint64_t which) {
      return derive_seed(opt.seed, {static_cast<std::uint64_t>(Stream::bootstrap), s, which});
    };
    p.doa_vst = rmse_with_bootstrap(doa_v, b, boot_seed(0));
    p.dod_vst = rmse_with_bootstrap(dod_v, b, boot_seed(1));
    p.doa_m = rmse_with_bootstrap(doa_m, b, boot_seed(2));
    p.dod_m = rmse_with_bootstrap(dod_m, b, boot_seed(3));
    if (opt.keep_reports) p.reports = std::move(reports);
    report.points.push_back(std::move(p));
  }
  omp_set_max_active_levels(saved_levels);
  return report;
}

} // namespace bimimo
