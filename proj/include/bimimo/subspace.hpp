// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bimimo/channel.hpp"
#include "bimimo/types.hpp"

namespace bimimo {

/// Orthonormal signal-subspace basis. The noise-subspace projector is
/// I - signal signal^H and is applied implicitly.
struct SubspaceBasis {
  CMatrix signal;      // ambient x dim
  RVector eigenvalues; // covariance eigenvalues, descending (all of them when known)

  int dim() const { return static_cast<int>(signal.cols()); }
  Eigen::Index ambient() const { return signal.rows(); }
  /// ||P_n v||^2 = ||v||^2 - ||U^H v||^2.
  double noise_energy(const CVector &v) const { return v.squaredNorm() - (signal.adjoint() * v).squaredNorm(); }
};

/// (1 / (N N_s)) sum over PRIs and Rx antennas of x x^H, x the fast-time
/// snapshot of one antenna in one PRI: L x L.
CMatrix temporal_covariance(const DataCube &cube);

/// Top-dim eigenvectors of a Hermitian matrix. Throws std::invalid_argument
/// unless 0 <= dim <= rows.
SubspaceBasis subspace_split(const CMatrix &hermitian, int dim);

/// Signal subspace of (1/cols) Y Y^H from its cols x cols Gram G = Y^H Y:
/// U = Y V Lambda^{-1/2}, re-orthonormalized.
SubspaceBasis subspace_from_gram(const CMatrix &y, const CMatrix &gram, int dim);
SubspaceBasis subspace_from_snapshots(const CMatrix &y, int dim);

/// Signal dimension at the largest ratio between successive eigenvalues among
/// the first max_dim + 1 (descending). At least 1.
int estimate_signal_dim(const RVector &eigenvalues_desc, int max_dim);

} // namespace bimimo
