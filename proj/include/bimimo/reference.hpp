// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "bimimo/channel.hpp"
#include "bimimo/estimation.hpp"
#include "bimimo/extender.hpp"

/// Serial and materialized counterparts of the fast paths. Slow on purpose:
/// they exist for tests and for the kernel benchmark.
namespace bimimo::reference {

// Same arithmetic as the OpenMP kernels, single-threaded.
RMatrix xi1_surface_serial(const Xi1Evaluator &eval, const std::vector<int> &delays,
                           const std::vector<double> &dopplers);
RMatrix xi2_context_surface_serial(const Xi2Evaluator &eval, int k, const std::vector<double> &doa_deg,
                                   const std::vector<double> &dod_deg);
RVector music_spectrum_serial(const CMatrix &signal_basis, const ArrayGeometry &rx, double wavelength_m,
                              const std::vector<double> &theta_deg);

/// det(T^H T) / det(T^H P_n T) with T and P_n = I - U U^H formed explicitly.
double xi1_cost_materialized(const CodeMatrix &codes, const CMatrix &signal_basis, double chip_period_s, int d,
                             double f_hz);

/// ||P_B^perp h||^2 and (P_B^perp h)^H P_nv (P_B^perp h) with h the full extended
/// manifold, P_B^perp the materialized block-diagonal projector and P_nv formed
/// from a basis over the full virtual ambient space.
Xi2Evaluator::Terms xi2_terms_materialized(const SignalModel &model, const BlockerSet &blockers,
                                           const CMatrix &full_basis, const DelayDoppler &context, double doa_deg,
                                           double dod_deg);

/// x_vst[n] built with materialized (I_N (x) P_m^perp) blocks.
CMatrix virtual_snapshots_materialized(const DataCube &cube, const BlockerSet &blockers);

/// Echo-only cube written sample by sample from the signal model, drawing the
/// same per-target random streams as synthesize_cube.
DataCube echoes_direct(const Scenario &sc, const SignalModel &model, const SymbolSequence &symbols,
                       std::uint64_t seed);

} // namespace bimimo::reference
