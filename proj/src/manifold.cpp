// SPDX-License-Identifier: Apache-2.0
#include "bimimo/manifold.hpp"

#include <cmath>
#include <string>

namespace bimimo {

SignalModel make_signal_model(const Scenario &s, CodeMatrix codes) {
  SignalModel m;
  m.tx_array = s.tx_array;
  m.rx_array = s.rx_array;
  m.codes = std::move(codes);
  const auto dp = derive_params(s.system);
  m.wavelength_m = dp.wavelength_m;
  m.chip_period_s = s.system.chip_period_s;
  m.pri_s = s.system.pri_s();
  m.pris_per_cpi = s.system.pris_per_cpi;
  return m;
}

Eigen::Vector3d direction_unit_vector(double theta_deg, double phi_deg) {
  const double th = deg2rad(theta_deg);
  const double ph = deg2rad(phi_deg);
  return {std::cos(th) * std::cos(ph), std::sin(th) * std::cos(ph), std::sin(ph)};
}

CVector spatial_manifold(const ArrayGeometry &geom, double theta_deg, double phi_deg, double wavelength_m,
                         ArraySide side) {
  const Eigen::Vector3d k = (kTwoPi / wavelength_m) * direction_unit_vector(theta_deg, phi_deg);
  const double sign = side == ArraySide::tx ? 1.0 : -1.0;
  const RVector phase = geom.coordinates.transpose() * k;
  CVector out(geom.size());
  for (int i = 0; i < geom.size(); ++i) out[i] = cis(sign * phase[i]);
  return out;
}

CVector doppler_phase_vector(double f_hz, int length, double chip_period_s) {
  CVector out(length);
  for (int l = 0; l < length; ++l) out[l] = cis(kTwoPi * f_hz * (l + 1) * chip_period_s);
  return out;
}

namespace {

void check_support(const CodeMatrix &codes, int d) {
  if (d < 0 || d + codes.code_length() > codes.fast_time_bins())
    throw RangeAmbiguityError("delay " + std::to_string(d) + " + code length " +
                              std::to_string(codes.code_length()) + " exceeds the " +
                              std::to_string(codes.fast_time_bins()) + "-bin PRI");
}

} // namespace

CVector temporal_signature(const CodeMatrix &codes, int d, double f_hz, double chip_period_s) {
  check_support(codes, d);
  const int len = codes.fast_time_bins();
  CVector out = CVector::Zero(len);
  for (int q = 0; q < codes.code_length(); ++q) {
    const int l = d + q;
    out[l] = codes.composite[q] * cis(kTwoPi * f_hz * (l + 1) * chip_period_s);
  }
  return out;
}

CMatrix transformation_matrix(const CodeMatrix &codes, int d, double f_hz, double chip_period_s) {
  check_support(codes, d);
  const int len = codes.fast_time_bins();
  CMatrix t = CMatrix::Zero(len, codes.tx_count());
  for (int q = 0; q < codes.code_length(); ++q) {
    const int l = d + q;
    const cplx ph = cis(kTwoPi * f_hz * (l + 1) * chip_period_s);
    for (int m = 0; m < codes.tx_count(); ++m) t(l, m) = codes.chips(q, m) * ph;
  }
  return t;
}

CVector extended_manifold(double theta_deg, double theta_bar_deg, int d, double f_hz, const SignalModel &model) {
  const CVector s_rx = spatial_manifold(model.rx_array, theta_deg, 0.0, model.wavelength_m, ArraySide::rx);
  const CVector s_tx = spatial_manifold(model.tx_array, theta_bar_deg, 0.0, model.wavelength_m, ArraySide::tx);
  const CVector temporal = temporal_signature(model.codes, d, f_hz, model.chip_period_s);
  const Eigen::Index len = temporal.size();
  const Eigen::Index n_rx = s_rx.size();
  CVector h(s_tx.size() * n_rx * len);
  // Scalar products element by element; Eigen's packet path for complex
  // multiplication rounds differently from std::complex.
  for (Eigen::Index m = 0; m < s_tx.size(); ++m)
    for (Eigen::Index i = 0; i < n_rx; ++i) {
      const cplx a = std::conj(s_tx[m]) * s_rx[i];
      for (Eigen::Index l = 0; l < len; ++l) h[(m * n_rx + i) * len + l] = a * temporal[l];
    }
  return h;
}

} // namespace bimimo
