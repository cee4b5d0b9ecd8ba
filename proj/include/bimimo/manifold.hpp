// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

#include "bimimo/scenario.hpp"
#include "bimimo/types.hpp"
#include "bimimo/waveform.hpp"

namespace bimimo {

enum class ArraySide { tx, rx };

/// Echo delay d with d + code_length > fast_time_bins: the echo would spill
/// into the next PRI, which the no-wrap shift operator cannot represent.
class RangeAmbiguityError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Everything the signal model needs that is fixed for a CPI.
struct SignalModel {
  ArrayGeometry tx_array;
  ArrayGeometry rx_array;
  CodeMatrix codes;
  double wavelength_m = 0.0;
  double chip_period_s = 0.0;
  double pri_s = 0.0;
  int pris_per_cpi = 0;

  int tx_count() const { return tx_array.size(); }
  int rx_count() const { return rx_array.size(); }
  int fast_time_bins() const { return codes.fast_time_bins(); }
  int code_length() const { return codes.code_length(); }
  double prf_hz() const { return 1.0 / pri_s; }
  double doppler_bin_hz() const { return prf_hz() / pris_per_cpi; }
};

SignalModel make_signal_model(const Scenario &s, CodeMatrix codes);

/// (cos az cos el, sin az cos el, sin el).
Eigen::Vector3d direction_unit_vector(double theta_deg, double phi_deg);

/// exp(+j r^T k) on the Tx side, exp(-j r^T k) on the Rx side, with
/// k = (2 pi / lambda) u(theta, phi).
CVector spatial_manifold(const ArrayGeometry &geom, double theta_deg, double phi_deg, double wavelength_m,
                         ArraySide side);

/// Entry l (1-based) = exp(j 2 pi f l T_c), l = 1..length.
CVector doppler_phase_vector(double f_hz, int length, double chip_period_s);

/// J^d v: down-shift by d without wrap-around. Throws std::out_of_range
/// unless 0 <= d < v.size().
template <class Vec> Vec apply_shift(const Vec &v, int d) {
  const auto n = v.size();
  if (d < 0 || d >= n) throw std::out_of_range("shift out of range");
  Vec out = Vec::Zero(n);
  out.tail(n - d) = v.head(n - d);
  return out;
}

/// J^d c_s (.) F_c(f). Throws RangeAmbiguityError when d + code_length > L.
CVector temporal_signature(const CodeMatrix &codes, int d, double f_hz, double chip_period_s);

/// T(d, f): L x tx_count, column m = (J^d c_m) (.) F_c(f).
CMatrix transformation_matrix(const CodeMatrix &codes, int d, double f_hz, double chip_period_s);

/// h = conj(S_tx(theta_bar)) (x) S_rx(theta) (x) temporal(d, f), ordered with the
/// Tx antenna outermost, then Rx antenna, then fast time.
CVector extended_manifold(double theta_deg, double theta_bar_deg, int d, double f_hz, const SignalModel &model);

} // namespace bimimo
