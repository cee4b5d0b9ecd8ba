// SPDX-License-Identifier: Apache-2.0
#include "bimimo/reference.hpp"

#include <cmath>
#include <limits>

namespace bimimo::reference {

RMatrix xi1_surface_serial(const Xi1Evaluator &eval, const std::vector<int> &delays,
                           const std::vector<double> &dopplers) {
  RMatrix out(static_cast<Eigen::Index>(delays.size()), static_cast<Eigen::Index>(dopplers.size()));
  for (std::size_t j = 0; j < dopplers.size(); ++j) {
    const CMatrix pc = eval.phased_chips(dopplers[j]);
    for (std::size_t r = 0; r < delays.size(); ++r) out(r, j) = eval.cost_phased(delays[r], pc);
  }
  return out;
}

RMatrix xi2_context_surface_serial(const Xi2Evaluator &eval, int k, const std::vector<double> &doa_deg,
                                   const std::vector<double> &dod_deg) {
  std::vector<CVector> s_tx;
  for (double b : dod_deg) s_tx.push_back(eval.tx_manifold(b));
  RMatrix out(static_cast<Eigen::Index>(doa_deg.size()), static_cast<Eigen::Index>(dod_deg.size()));
  for (std::size_t r = 0; r < doa_deg.size(); ++r) {
    const CMatrix h = eval.rx_combine(k, eval.rx_manifold(doa_deg[r]));
    for (std::size_t c = 0; c < dod_deg.size(); ++c) out(r, c) = eval.contribution_from(k, h, s_tx[c]);
  }
  return out;
}

RVector music_spectrum_serial(const CMatrix &signal_basis, const ArrayGeometry &rx, double wavelength_m,
                              const std::vector<double> &theta_deg) {
  RVector out(static_cast<Eigen::Index>(theta_deg.size()));
  for (std::size_t j = 0; j < theta_deg.size(); ++j) {
    const CVector s = spatial_manifold(rx, theta_deg[j], 0.0, wavelength_m, ArraySide::rx);
    const double den = s.squaredNorm() - (signal_basis.adjoint() * s).squaredNorm();
    out[j] = den > 0 ? 1.0 / den : std::numeric_limits<double>::infinity();
  }
  return out;
}

double xi1_cost_materialized(const CodeMatrix &codes, const CMatrix &signal_basis, double chip_period_s, int d,
                             double f_hz) {
  const CMatrix t = transformation_matrix(codes, d, f_hz, chip_period_s);
  const Eigen::Index len = t.rows();
  const CMatrix pn = CMatrix::Identity(len, len) - signal_basis * signal_basis.adjoint();
  const cplx num = (t.adjoint() * t).determinant();
  const cplx den = (t.adjoint() * pn * t).determinant();
  if (!(den.real() > 0)) return std::numeric_limits<double>::infinity();
  return num.real() / den.real();
}

namespace {

CMatrix block_projector(const BlockerSet &blockers, int rx_count) {
  const int n_bar = blockers.tx_count();
  const Eigen::Index len = blockers.fast_time_bins();
  const Eigen::Index dim = static_cast<Eigen::Index>(n_bar) * rx_count * len;
  CMatrix p = CMatrix::Zero(dim, dim);
  for (int m = 0; m < n_bar; ++m) {
    const CMatrix pm = blockers.projector(m);
    for (int i = 0; i < rx_count; ++i) {
      const Eigen::Index o = (static_cast<Eigen::Index>(m) * rx_count + i) * len;
      p.block(o, o, len, len) = pm;
    }
  }
  return p;
}

} // namespace

Xi2Evaluator::Terms xi2_terms_materialized(const SignalModel &model, const BlockerSet &blockers,
                                           const CMatrix &full_basis, const DelayDoppler &context, double doa_deg,
                                           double dod_deg) {
  const CVector h = extended_manifold(doa_deg, dod_deg, context.delay_bins, context.doppler_hz, model);
  const CVector ph = block_projector(blockers, model.rx_count()) * h;
  const Eigen::Index dim = ph.size();
  const CMatrix pnv = CMatrix::Identity(dim, dim) - full_basis * full_basis.adjoint();
  Xi2Evaluator::Terms t;
  t.numerator = ph.squaredNorm();
  t.denominator = (ph.adjoint() * pnv * ph)(0, 0).real();
  return t;
}

CMatrix virtual_snapshots_materialized(const DataCube &cube, const BlockerSet &blockers) {
  const int n_rx = cube.rx_count();
  const int n_bar = blockers.tx_count();
  const Eigen::Index len = cube.fast_time_bins();
  CMatrix out(static_cast<Eigen::Index>(n_bar) * n_rx * len, cube.pris());
  for (int m = 0; m < n_bar; ++m) {
    CMatrix big = CMatrix::Zero(n_rx * len, n_rx * len);
    const CMatrix pm = blockers.projector(m);
    for (int i = 0; i < n_rx; ++i) big.block(i * len, i * len, len, len) = pm;
    for (int n = 0; n < cube.pris(); ++n) {
      CVector x_st(n_rx * len);
      for (int i = 0; i < n_rx; ++i)
        for (Eigen::Index l = 0; l < len; ++l) x_st[i * len + l] = cube.at(n, static_cast<int>(l), i);
      out.col(n).segment(static_cast<Eigen::Index>(m) * n_rx * len, n_rx * len) = big * x_st;
    }
  }
  return out;
}

DataCube echoes_direct(const Scenario &sc, const SignalModel &model, const SymbolSequence &symbols,
                       std::uint64_t seed) {
  const auto &sys = sc.system;
  DataCube cube(sys.pris_per_cpi, sys.fast_time_bins, sys.rx_count);
  const int nc = sys.code_length;
  for (std::size_t k = 0; k < sc.targets.size(); ++k) {
    const auto &t = sc.targets[k];
    const auto truth = truth_from_geometry(t, sys);
    Engine rng = make_engine(seed, Stream::target, k);
    const PathGain beta = path_gain(t, sys, rng);
    const auto rcs = swerling_amplitude(t.swerling, t.rcs_mean_m2, sys.pris_per_cpi, rng);
    const CVector s_tx = spatial_manifold(model.tx_array, t.dod_deg, 0.0, model.wavelength_m, ArraySide::tx);
    const CVector s_rx = spatial_manifold(model.rx_array, t.doa_deg, 0.0, model.wavelength_m, ArraySide::rx);
    for (int n = 0; n < sys.pris_per_cpi; ++n)
      for (int i = 0; i < sys.rx_count; ++i)
        for (int l = truth.delay_bins; l < truth.delay_bins + nc; ++l) {
          // Sample time n * PRI + (l + 1) T_c.
          const double time = n * model.pri_s + (l + 1) * model.chip_period_s;
          cplx sum = 0.0;
          for (int m = 0; m < sys.tx_count; ++m)
            sum += std::conj(s_tx[m]) * model.codes.chips(l - truth.delay_bins, m);
          cube.at(n, l, i) += std::sqrt(sys.tx_power_w) * beta.value() * std::sqrt(rcs[n] / t.rcs_mean_m2) *
                              symbols.values[n] * s_rx[i] * sum * cis(kTwoPi * truth.doppler_hz * time);
        }
  }
  return cube;
}

} // namespace bimimo::reference
