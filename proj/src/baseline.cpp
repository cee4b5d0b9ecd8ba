// SPDX-License-Identifier: Apache-2.0
#include "bimimo/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "bimimo/kernels.hpp"

namespace bimimo {

EllipseParams ellipse_params(double r_bi, double l_bi) {
  if (!(l_bi >= 0) || !(r_bi > l_bi)) {
    std::ostringstream msg;
    msg << "degenerate ellipse: bistatic range " << r_bi << " must exceed baseline " << l_bi;
    throw GeometryError(msg.str());
  }
  EllipseParams e;
  e.a = r_bi / 2.0;
  e.eps = (l_bi / 2.0) / e.a;
  e.b = std::sqrt(e.a * e.a - (l_bi / 2.0) * (l_bi / 2.0));
  return e;
}

std::pair<double, double> split_bistatic_range(const EllipseParams &e, double theta_deg, double r_bi) {
  const double den = 1.0 + e.eps * std::cos(deg2rad(theta_deg));
  if (std::abs(den) < 1e-9) throw GeometryError("range split denominator vanishes");
  const double r_rx = e.a * (1.0 - e.eps * e.eps) / den;
  return {r_rx, r_bi - r_rx};
}

double dod_from_geometry(const EllipseParams &e, double r_tx) {
  if (!(r_tx > 0)) throw GeometryError("Tx range must be positive");
  const double p = e.a * (1.0 - e.eps * e.eps);
  if (e.eps < 1e-12) {
    if (std::abs(r_tx - p) <= 1e-6 * p) return 90.0;
    throw GeometryError("circle geometry needs r_tx = a");
  }
  double arg = (1.0 - p / r_tx) / e.eps;
  if (std::abs(arg) > 1.0) {
    if (std::abs(arg) - 1.0 > 1e-6) {
      std::ostringstream msg;
      msg << "DOD arccos argument " << arg << " outside [-1, 1]";
      throw GeometryError(msg.str());
    }
    arg = std::clamp(arg, -1.0, 1.0);
  }
  return rad2deg(std::acos(arg));
}

double law_of_cosines_dod(double l_bi, double r_tx, double r_rx) {
  const double c = (l_bi * l_bi + r_tx * r_tx - r_rx * r_rx) / (2.0 * l_bi * r_tx);
  return rad2deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

CMatrix spatial_covariance(const DataCube &cube) {
  const int n_rx = cube.rx_count();
  CMatrix r = CMatrix::Zero(n_rx, n_rx);
  for (int n = 0; n < cube.pris(); ++n) {
    const auto x = cube.pri(n);
    r.noalias() += x.transpose() * x.conjugate();
  }
  return r / (static_cast<double>(cube.pris()) * cube.fast_time_bins());
}

namespace {

std::vector<int> spectrum_peaks_1d(const RVector &p, const std::vector<double> &theta, double nms_deg) {
  const auto n = static_cast<int>(p.size());
  std::vector<int> cand;
  for (int j = 0; j < n; ++j) {
    const bool left = j == 0 || p[j] >= p[j - 1];
    const bool right = j == n - 1 || p[j] > p[j + 1];
    if (left && right) cand.push_back(j);
  }
  std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) { return p[a] > p[b]; });
  std::vector<int> out;
  for (int j : cand) {
    bool clear = true;
    for (int k : out)
      if (std::abs(theta[j] - theta[k]) < nms_deg) {
        clear = false;
        break;
      }
    if (clear) out.push_back(j);
  }
  return out;
}

} // namespace

MusicResult music_doa_spectrum(const DataCube &cube, const SignalModel &model, int k,
                               const std::vector<double> &theta_deg, double nms_deg) {
  const int n_rx = model.rx_count();
  if (k < 1 || k >= n_rx)
    throw std::invalid_argument("MUSIC resolves 1.." + std::to_string(n_rx - 1) + " sources, asked for " +
                                std::to_string(k));
  const SubspaceBasis basis = subspace_split(spatial_covariance(cube), k);
  MusicResult out;
  out.theta_deg = theta_deg;
  out.spectrum = kernels::music_spectrum(basis.signal, model.rx_array, model.wavelength_m, theta_deg);
  const auto peaks = spectrum_peaks_1d(out.spectrum, theta_deg, nms_deg);
  if (static_cast<int>(peaks.size()) < k)
    throw PeakCountError("MUSIC found " + std::to_string(peaks.size()) + " peak(s), need " + std::to_string(k));
  for (int j = 0; j < k; ++j) out.peaks_deg.push_back(theta_deg[peaks[j]]);
  return out;
}

namespace {

// Permutation of columns maximizing the summed score; exhaustive up to 8, greedy beyond.
std::vector<int> best_assignment(const RMatrix &score) {
  const int k = static_cast<int>(score.rows());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  if (k <= 8) {
    std::vector<int> best = perm;
    double best_sum = -std::numeric_limits<double>::infinity();
    do {
      double s = 0.0;
      for (int j = 0; j < k; ++j) s += score(j, perm[j]);
      if (s > best_sum) {
        best_sum = s;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  std::vector<char> used(k, 0);
  for (int j = 0; j < k; ++j) {
    int bc = -1;
    for (int c = 0; c < k; ++c)
      if (!used[c] && (bc < 0 || score(j, c) > score(j, bc))) bc = c;
    perm[j] = bc;
    used[bc] = 1;
  }
  return perm;
}

} // namespace

BaselineResult baseline_estimate(const DataCube &cube, const SignalModel &model, const SymbolSequence &symbols,
                                 double baseline_bins, int k, const EstimatorConfig &cfg, const StageOne *stage1) {
  StageOne own;
  if (!stage1) {
    own = range_doppler_search(cube, model, symbols, k, cfg);
    stage1 = &own;
  }
  const auto &peaks = stage1->peaks;
  k = static_cast<int>(peaks.size());

  BaselineResult out;
  const auto grid = angle_grid(cfg.angle_min_deg, cfg.angle_max_deg, cfg.angle_refine_step_deg);
  out.music = music_doa_spectrum(cube, model, k, grid, cfg.angle_nms_deg);

  const int nc = model.code_length();
  const int n_rx = model.rx_count();
  std::vector<CVector> steer;
  for (double th : out.music.peaks_deg)
    steer.push_back(spatial_manifold(model.rx_array, th, 0.0, model.wavelength_m, ArraySide::rx));
  RMatrix score(k, k);
  for (int j = 0; j < k; ++j) {
    CMatrix rj = CMatrix::Zero(n_rx, n_rx);
    for (int n = 0; n < cube.pris(); ++n) {
      const auto x = cube.pri(n).middleRows(peaks[j].delay_bins, nc);
      rj.noalias() += x.transpose() * x.conjugate();
    }
    for (int p = 0; p < k; ++p) score(j, p) = (steer[p].adjoint() * rj * steer[p])(0, 0).real();
  }
  const auto perm = best_assignment(score);

  for (int j = 0; j < k; ++j) {
    BaselineTarget t;
    t.delay_bins = peaks[j].delay_bins;
    t.doppler_hz = peaks[j].doppler_hz;
    t.doa_deg = out.music.peaks_deg[perm[j]];
    const double r_bi = t.delay_bins;
    const EllipseParams e = ellipse_params(r_bi, baseline_bins);
    std::tie(t.r_rx_bins, t.r_tx_bins) = split_bistatic_range(e, t.doa_deg, r_bi);
    t.dod_deg = dod_from_geometry(e, t.r_tx_bins);
    out.targets.push_back(t);
  }
  return out;
}

} // namespace bimimo
