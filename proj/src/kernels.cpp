// SPDX-License-Identifier: Apache-2.0
#include "bimimo/kernels.hpp"

#include <limits>

namespace bimimo::kernels {

RMatrix xi1_surface(const Xi1Evaluator &eval, const std::vector<int> &delays, const std::vector<double> &dopplers) {
  const auto nd = static_cast<Eigen::Index>(delays.size());
  const auto nf = static_cast<Eigen::Index>(dopplers.size());
  for (int d : delays)
    if (d < 0 || d > eval.max_delay()) throw RangeAmbiguityError("delay grid leaves the PRI");
  std::vector<CMatrix> phased(nf);
  for (Eigen::Index j = 0; j < nf; ++j) phased[j] = eval.phased_chips(dopplers[j]);

  RMatrix out(nd, nf);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index r = 0; r < nd; ++r)
    for (Eigen::Index j = 0; j < nf; ++j) out(r, j) = eval.cost_phased(delays[r], phased[j]);
  return out;
}

RMatrix xi2_context_surface(const Xi2Evaluator &eval, int k, const std::vector<double> &doa_deg,
                            const std::vector<double> &dod_deg) {
  const auto na = static_cast<Eigen::Index>(doa_deg.size());
  const auto nb = static_cast<Eigen::Index>(dod_deg.size());
  std::vector<CVector> s_tx(nb);
  for (Eigen::Index c = 0; c < nb; ++c) s_tx[c] = eval.tx_manifold(dod_deg[c]);

  RMatrix out(na, nb);
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index r = 0; r < na; ++r) {
    const CMatrix h = eval.rx_combine(k, eval.rx_manifold(doa_deg[r]));
    for (Eigen::Index c = 0; c < nb; ++c) out(r, c) = eval.contribution_from(k, h, s_tx[c]);
  }
  return out;
}

std::vector<RMatrix> xi2_surfaces(const Xi2Evaluator &eval, const std::vector<double> &doa_deg,
                                  const std::vector<double> &dod_deg) {
  std::vector<RMatrix> out;
  for (int k = 0; k < eval.contexts(); ++k) out.push_back(xi2_context_surface(eval, k, doa_deg, dod_deg));
  return out;
}

RVector music_spectrum(const CMatrix &signal_basis, const ArrayGeometry &rx, double wavelength_m,
                       const std::vector<double> &theta_deg) {
  const auto n = static_cast<Eigen::Index>(theta_deg.size());
  RVector out(n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    const CVector s = spatial_manifold(rx, theta_deg[j], 0.0, wavelength_m, ArraySide::rx);
    const double den = s.squaredNorm() - (signal_basis.adjoint() * s).squaredNorm();
    out[j] = den > 0 ? 1.0 / den : std::numeric_limits<double>::infinity();
  }
  return out;
}

} // namespace bimimo::kernels
