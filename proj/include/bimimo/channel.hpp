// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "bimimo/manifold.hpp"
#include "bimimo/rng.hpp"
#include "bimimo/scenario.hpp"
#include "bimimo/types.hpp"
#include "bimimo/waveform.hpp"

namespace bimimo {

struct PathGain {
  double magnitude = 0.0;
  double phase = 0.0; // carrier term plus random phase, radians in [0, 2pi)
  cplx value() const { return std::polar(magnitude, phase); }
};

/// Per-target parameters the synthesis used.
struct TruthRecord {
  int delay_bins = 0;
  double doppler_hz = 0.0;
  double doa_deg = 0.0;
  double dod_deg = 0.0;
};

// Aligned so Eigen's vectorized paths, and hence the rounding, do not depend on
// where the allocation lands.
using CubeStorage = std::vector<cplx, Eigen::aligned_allocator<cplx>>;

/// One CPI of Rx samples, logically indexed (PRI n, fast time l, Rx antenna i).
/// Storage keeps each antenna's fast-time vector contiguous, so pri(n) is the
/// L x N matrix X[n]^T and snapshots() is the L x (N * N_s) matrix of all
/// fast-time snapshots.
class DataCube {
public:
  DataCube() = default;
  DataCube(int pris, int fast_time_bins, int rx_count);

  int pris() const { return pris_; }
  int fast_time_bins() const { return bins_; }
  int rx_count() const { return rx_; }
  std::size_t size() const { return data_.size(); }

  cplx &at(int n, int l, int i) { return data_[index(n, l, i)]; }
  const cplx &at(int n, int l, int i) const { return data_[index(n, l, i)]; }

  Eigen::Map<CMatrix> pri(int n) { return {data_.data() + offset(n), bins_, rx_}; }
  Eigen::Map<const CMatrix> pri(int n) const { return {data_.data() + offset(n), bins_, rx_}; }
  Eigen::Map<const CMatrix> snapshots() const {
    return {data_.data(), bins_, static_cast<Eigen::Index>(rx_) * pris_};
  }

  CubeStorage &data() { return data_; }
  const CubeStorage &data() const { return data_; }

  DataCube &operator+=(const DataCube &o);

  std::vector<TruthRecord> truth;
  std::uint64_t seed = 0;
  double reference_power = 0.0; // mean per-element echo power over occupied bins
  double noise_variance = 0.0;
  double clutter_variance = 0.0;

private:
  std::size_t offset(int n) const { return static_cast<std::size_t>(n) * rx_ * bins_; }
  std::size_t index(int n, int l, int i) const { return offset(n) + static_cast<std::size_t>(i) * bins_ + l; }

  int pris_ = 0, bins_ = 0, rx_ = 0;
  CubeStorage data_;
};

/// |beta| = sqrt(G_tx G_rx / (4 pi)^3) * lambda / (R_tx R_rx) * sqrt(RCS), unity
/// gains, ranges converted to metres. Phase = -2 pi F_c R_bi / c + psi with psi
/// drawn uniformly. Throws std::invalid_argument on a zero range.
PathGain path_gain(const TargetSpec &t, const SystemConfig &sys, Engine &rng);

/// Per-PRI RCS values. 1: one exponential draw held for the CPI; 2: i.i.d.
/// exponential per PRI; 3: one chi-square(4) draw, density (4x/m^2) e^{-2x/m}.
std::vector<double> swerling_amplitude(int model, double mean_rcs, int n_s, Engine &rng);

/// Echo of target k alone (no clutter, no noise). Random draws (psi, Swerling)
/// come from the stream (seed, target, stream_index).
void add_target_echo(DataCube &cube, const TargetSpec &t, const SystemConfig &sys, const SignalModel &model,
                     const SymbolSequence &symbols, std::uint64_t seed, std::uint64_t stream_index);

/// Mean |x|^2 over every PRI, Rx antenna and fast-time bin occupied by at least
/// one echo.
double occupied_bin_power(const DataCube &echoes, const std::vector<int> &delays, int code_length);

/// Complex Gaussian clutter, i.i.d. over range bin and antenna, with
/// reference_power / clutter power = scr_db. Stationary clutter is one draw
/// C repeated as a[n] C in every PRI; white clutter is drawn afresh per PRI.
/// +inf leaves the cube unchanged.
void add_clutter(DataCube &cube, double scr_db, double reference_power, std::uint64_t seed,
                 ClutterModel model = ClutterModel::stationary, const SymbolSequence *symbols = nullptr);

/// AWGN with reference_power / sigma_n^2 = snr_db. +inf leaves the cube unchanged.
void add_noise(DataCube &cube, double snr_db, double reference_power, std::uint64_t seed);

struct SynthesisOptions {
  bool echoes = true;
  bool clutter = true;
  bool noise = true;
};

/// Full CPI: echoes of every target, then clutter and noise referenced to the
/// occupied-bin echo power (unit power when there are no targets).
DataCube synthesize_cube(const Scenario &sc, const SignalModel &model, const SymbolSequence &symbols,
                         std::uint64_t seed, const SynthesisOptions &opt = {});

} // namespace bimimo
