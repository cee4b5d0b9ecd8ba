// SPDX-License-Identifier: Apache-2.0
#include "bimimo/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace bimimo {

DataCube::DataCube(int pris, int fast_time_bins, int rx_count)
    : pris_(pris), bins_(fast_time_bins), rx_(rx_count),
      data_(static_cast<std::size_t>(pris) * fast_time_bins * rx_count, cplx{0.0, 0.0}) {}

DataCube &DataCube::operator+=(const DataCube &o) {
  if (o.pris_ != pris_ || o.bins_ != bins_ || o.rx_ != rx_) throw std::invalid_argument("cube shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

PathGain path_gain(const TargetSpec &t, const SystemConfig &sys, Engine &rng) {
  const double bin_m = kSpeedOfLight * sys.chip_period_s;
  const double r_tx = t.r_tx_bins * bin_m;
  const double r_rx = t.r_rx_bins * bin_m;
  if (!(r_tx > 0) || !(r_rx > 0)) throw std::invalid_argument("path gain needs non-zero ranges");
  const double lambda = kSpeedOfLight / sys.carrier_frequency_hz;
  PathGain g;
  g.magnitude = std::sqrt(1.0 / std::pow(4.0 * kPi, 3)) * lambda / (r_tx * r_rx) * std::sqrt(t.rcs_mean_m2);
  // Carrier term in cycles first so the huge phase is reduced before scaling by 2 pi.
  const double cycles = sys.carrier_frequency_hz * (r_tx + r_rx) / kSpeedOfLight;
  const double carrier = -kTwoPi * (cycles - std::floor(cycles));
  std::uniform_real_distribution<double> uni(0.0, kTwoPi);
  const double psi = uni(rng);
  g.phase = std::fmod(carrier + psi + 2.0 * kTwoPi, kTwoPi);
  return g;
}

std::vector<double> swerling_amplitude(int model, double mean_rcs, int n_s, Engine &rng) {
  if (!(mean_rcs > 0)) throw std::invalid_argument("mean RCS must be > 0");
  std::vector<double> out(n_s);
  switch (model) {
  case 1: {
    std::exponential_distribution<double> e(1.0 / mean_rcs);
    std::fill(out.begin(), out.end(), e(rng));
    break;
  }
  case 2: {
    std::exponential_distribution<double> e(1.0 / mean_rcs);
    for (auto &x : out) x = e(rng);
    break;
  }
  case 3: {
    std::gamma_distribution<double> g(2.0, mean_rcs / 2.0);
    std::fill(out.begin(), out.end(), g(rng));
    break;
  }
  default:
    throw std::invalid_argument("Swerling model must be 1, 2 or 3");
  }
  return out;
}

void add_target_echo(DataCube &cube, const TargetSpec &t, const SystemConfig &sys, const SignalModel &model,
                     const SymbolSequence &symbols, std::uint64_t seed, std::uint64_t stream_index) {
  const int n_s = cube.pris();
  const int n_rx = cube.rx_count();
  const int nc = model.code_length();
  if (symbols.size() != n_s) throw std::invalid_argument("symbol count does not match the cube");

  const TargetTruth truth = truth_from_geometry(t, sys);
  const int d = truth.delay_bins;
  const double f = truth.doppler_hz;

  Engine rng = make_engine(seed, Stream::target, stream_index);
  const PathGain beta = path_gain(t, sys, rng);
  const auto rcs = swerling_amplitude(t.swerling, t.rcs_mean_m2, n_s, rng);

  // Fast-time response: T(d, f) conj(S_tx), non-zero on the code support only.
  const CMatrix tm = transformation_matrix(model.codes, d, f, model.chip_period_s);
  const CVector s_tx = spatial_manifold(model.tx_array, t.dod_deg, 0.0, model.wavelength_m, ArraySide::tx);
  const CVector s_rx = spatial_manifold(model.rx_array, t.doa_deg, 0.0, model.wavelength_m, ArraySide::rx);
  const CVector w = tm.middleRows(d, nc) * s_tx.conjugate();

  const cplx g0 = std::sqrt(sys.tx_power_w) * beta.value();

#pragma omp parallel for schedule(static)
  for (int n = 0; n < n_s; ++n) {
    // Global-time Doppler: the per-PRI factor exp(j 2 pi f n PRI) continues the
    // intra-PRI phase across the CPI.
    const cplx slow = cis(kTwoPi * f * n * model.pri_s);
    const cplx amp = g0 * std::sqrt(rcs[n] / t.rcs_mean_m2) * symbols.values[n] * slow;
    auto x = cube.pri(n);
    for (int i = 0; i < n_rx; ++i) x.col(i).segment(d, nc) += (amp * s_rx[i]) * w;
  }
  cube.truth.push_back({d, f, t.doa_deg, t.dod_deg});
}

double occupied_bin_power(const DataCube &echoes, const std::vector<int> &delays, int code_length) {
  const int len = echoes.fast_time_bins();
  std::vector<char> occupied(len, 0);
  for (int d : delays)
    for (int l = d; l < std::min(len, d + code_length); ++l) occupied[l] = 1;
  double sum = 0.0;
  std::size_t count = 0;
  for (int n = 0; n < echoes.pris(); ++n)
    for (int i = 0; i < echoes.rx_count(); ++i)
      for (int l = 0; l < len; ++l)
        if (occupied[l]) {
          sum += std::norm(echoes.at(n, l, i));
          ++count;
        }
  return count ? sum / count : 0.0;
}

namespace {

void add_white_gaussian(DataCube &cube, double variance, std::uint64_t seed, Stream stream) {
  const double sd = std::sqrt(variance / 2.0);
#pragma omp parallel for schedule(static)
  for (int n = 0; n < cube.pris(); ++n) {
    Engine rng = make_engine(seed, stream, static_cast<std::uint64_t>(n));
    std::normal_distribution<double> g(0.0, sd);
    auto x = cube.pri(n);
    for (Eigen::Index i = 0; i < x.cols(); ++i)
      for (Eigen::Index l = 0; l < x.rows(); ++l) {
        const double re = g(rng);
        const double im = g(rng);
        x(l, i) += cplx(re, im);
      }
  }
}

} // namespace

void add_clutter(DataCube &cube, double scr_db, double reference_power, std::uint64_t seed, ClutterModel model,
                 const SymbolSequence *symbols) {
  if (std::isinf(scr_db) && scr_db > 0) return;
  cube.clutter_variance = reference_power / std::pow(10.0, scr_db / 10.0);
  if (model == ClutterModel::white) {
    add_white_gaussian(cube, cube.clutter_variance, seed, Stream::clutter);
    return;
  }
  if (symbols && symbols->size() != cube.pris()) throw std::invalid_argument("symbol count does not match the cube");
  Engine rng = make_engine(seed, Stream::clutter, 0);
  std::normal_distribution<double> g(0.0, std::sqrt(cube.clutter_variance / 2.0));
  CMatrix c(cube.fast_time_bins(), cube.rx_count());
  for (Eigen::Index i = 0; i < c.cols(); ++i)
    for (Eigen::Index l = 0; l < c.rows(); ++l) {
      const double re = g(rng);
      const double im = g(rng);
      c(l, i) = cplx(re, im);
    }
#pragma omp parallel for schedule(static)
  for (int n = 0; n < cube.pris(); ++n) cube.pri(n) += (symbols ? symbols->values[n] : 1.0) * c;
}

void add_noise(DataCube &cube, double snr_db, double reference_power, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0) return;
  cube.noise_variance = reference_power / std::pow(10.0, snr_db / 10.0);
  add_white_gaussian(cube, cube.noise_variance, seed, Stream::noise);
}

DataCube synthesize_cube(const Scenario &sc, const SignalModel &model, const SymbolSequence &symbols,
                         std::uint64_t seed, const SynthesisOptions &opt) {
  const auto &sys = sc.system;
  DataCube cube(sys.pris_per_cpi, sys.fast_time_bins, sys.rx_count);
  cube.seed = seed;
  std::vector<int> delays;
  for (std::size_t k = 0; k < sc.targets.size(); ++k) {
    const auto &t = sc.targets[k];
    if (opt.echoes) {
      add_target_echo(cube, t, sys, model, symbols, seed, k);
    } else {
      const auto tr = truth_from_geometry(t, sys);
      cube.truth.push_back({tr.delay_bins, tr.doppler_hz, t.doa_deg, t.dod_deg});
    }
    delays.push_back(cube.truth.back().delay_bins);
  }
  double ref = opt.echoes && !delays.empty() ? occupied_bin_power(cube, delays, sys.code_length) : 0.0;
  if (!(ref > 0)) ref = 1.0;
  cube.reference_power = ref;
  if (opt.clutter) add_clutter(cube, sys.scr_db, ref, seed, sys.clutter_model, &symbols);
  if (opt.noise) add_noise(cube, sys.snr_db, ref, seed);
  return cube;
}

} // namespace bimimo
