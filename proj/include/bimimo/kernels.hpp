// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "bimimo/estimation.hpp"

/// OpenMP grid kernels. Every kernel has a serial counterpart in
/// bimimo::reference that must agree with it; bench/ compares their speed.
/// Results do not depend on the thread count: each grid cell is computed
/// independently with the same arithmetic.
namespace bimimo::kernels {

/// xi1 (linear) at every (delay, Doppler) pair: delays x dopplers.
RMatrix xi1_surface(const Xi1Evaluator &eval, const std::vector<int> &delays, const std::vector<double> &dopplers);

/// One context's xi2 contribution (linear) over doa x dod.
RMatrix xi2_context_surface(const Xi2Evaluator &eval, int k, const std::vector<double> &doa_deg,
                            const std::vector<double> &dod_deg);

/// All contexts; the xi2 surface is their sum.
std::vector<RMatrix> xi2_surfaces(const Xi2Evaluator &eval, const std::vector<double> &doa_deg,
                                  const std::vector<double> &dod_deg);

/// Rx-only MUSIC pseudo-spectrum 1 / ||(I - U U^H) S(theta)||^2.
RVector music_spectrum(const CMatrix &signal_basis, const ArrayGeometry &rx, double wavelength_m,
                       const std::vector<double> &theta_deg);

} // namespace bimimo::kernels
