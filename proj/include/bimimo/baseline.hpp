// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bimimo/channel.hpp"
#include "bimimo/estimation.hpp"

namespace bimimo {

class GeometryError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Bistatic ellipse with the Tx and Rx sites at the foci; lengths in range bins.
struct EllipseParams {
  double a = 0.0;   // semi-major axis
  double b = 0.0;   // semi-minor axis
  double eps = 0.0; // eccentricity
};

/// a = r_bi / 2, eps = (l_bi / 2) / a, b = sqrt(a^2 - (l_bi / 2)^2).
/// Throws GeometryError unless r_bi > l_bi >= 0.
EllipseParams ellipse_params(double r_bi, double l_bi);

/// Focal polar form r_rx = a (1 - eps^2) / (1 + eps cos theta), r_tx = r_bi - r_rx.
/// theta is measured at the Rx focus from the baseline direction pointing away
/// from Tx, so theta = 180 deg looks straight at the Tx site.
std::pair<double, double> split_bistatic_range(const EllipseParams &e, double theta_deg, double r_bi);

/// Interior angle at the Tx focus: arccos((1/eps) (1 - a (1 - eps^2) / r_tx)).
/// Arguments outside [-1, 1] by at most 1e-6 are clamped, otherwise GeometryError.
double dod_from_geometry(const EllipseParams &e, double r_tx);

/// Tx-focus angle of the triangle (l, r_tx, r_rx) by the law of cosines.
double law_of_cosines_dod(double l_bi, double r_tx, double r_rx);

/// Rx-only spatial covariance (1 / (N_s L)) sum x x^H over every PRI and
/// fast-time sample.
CMatrix spatial_covariance(const DataCube &cube);

struct MusicResult {
  std::vector<double> theta_deg;
  RVector spectrum; // linear pseudo-spectrum
  std::vector<double> peaks_deg;
};

/// MUSIC on the Rx array. Throws std::invalid_argument when k >= N and
/// PeakCountError when fewer than k separated local maxima exist.
MusicResult music_doa_spectrum(const DataCube &cube, const SignalModel &model, int k,
                               const std::vector<double> &theta_deg, double nms_deg = 2.0);

struct BaselineTarget {
  int delay_bins = 0;
  double doppler_hz = 0.0;
  double r_rx_bins = 0.0;
  double r_tx_bins = 0.0;
  double doa_deg = 0.0;
  double dod_deg = 0.0;
};

struct BaselineResult {
  std::vector<BaselineTarget> targets;
  MusicResult music;
};

/// Range peaks (shared with the v-ST stage when stage1 is given), ellipse
/// parameters, MUSIC DOA, DOA-to-range association by the spatial power of
/// each range window, range split and DOD from geometry. Bistatic range is the
/// delay bin itself.
BaselineResult baseline_estimate(const DataCube &cube, const SignalModel &model, const SymbolSequence &symbols,
                                 double baseline_bins, int k, const EstimatorConfig &cfg = {},
                                 const StageOne *stage1 = nullptr);

} // namespace bimimo
