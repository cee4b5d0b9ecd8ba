// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "bimimo/channel.hpp"
#include "bimimo/types.hpp"
#include "bimimo/waveform.hpp"

namespace bimimo {

struct DelayDoppler {
  int delay_bins = 0;
  double doppler_hz = 0.0;
};

/// x_st = vec(X^T) for an N x L PRI matrix: Rx antenna outer, fast time inner.
CVector vectorize_pri(const CMatrix &x_n);
CMatrix devectorize_pri(const CVector &x_st, int rx_count, int fast_time_bins);

/// Code-isolation blockers, one per Tx antenna m. B_m stacks, for every
/// (delay, Doppler) estimate, the delayed Doppler-shifted codes of all other
/// antennas; the complement projector I - Q_m Q_m^H nulls them.
///
/// Every B_m is zero outside the union of the estimates' code supports, so
/// bases are stored compactly on those rows and projectors are only ever
/// applied, never materialized (except by projector() for tests).
class BlockerSet {
public:
  int tx_count() const { return tx_count_; }
  int fast_time_bins() const { return bins_; }
  const std::vector<int> &support() const { return support_; }
  const std::vector<DelayDoppler> &estimates() const { return estimates_; }

  /// Numerical rank kept for antenna m.
  int rank(int m) const { return static_cast<int>(bases_[m].cols()); }
  /// Orthonormal basis of B_m on the support rows.
  const CMatrix &compact_basis(int m) const { return bases_[m]; }

  /// P_m^perp v for a full-length fast-time vector.
  CVector project(int m, const CVector &v) const;
  void project_in_place(int m, Eigen::Ref<CVector> v) const;

  /// Full L x K(tx_count - 1) blocking matrix.
  CMatrix blocking_matrix(int m) const;
  /// Materialized L x L projector.
  CMatrix projector(int m) const;

private:
  friend BlockerSet build_blockers(const CodeMatrix &, const std::vector<DelayDoppler> &, double);

  int tx_count_ = 0;
  int bins_ = 0;
  std::vector<int> support_;
  std::vector<DelayDoppler> estimates_;
  std::vector<CMatrix> blocking_; // compact B_m
  std::vector<CMatrix> bases_;    // compact Q_m
};

/// Singular values below rank_tolerance * sigma_max are dropped from Q_m.
inline constexpr double kBlockerRankTolerance = 1e-8;

/// Throws std::invalid_argument for an empty estimate list or a blocking
/// matrix that is identically zero, RangeAmbiguityError for delays outside the PRI.
BlockerSet build_blockers(const CodeMatrix &codes, const std::vector<DelayDoppler> &estimates, double chip_period_s);

/// Columns x_vst[n], rows ordered (Tx antenna m, Rx antenna i, fast time l).
struct VirtualSnapshots {
  CMatrix data;
  int tx_count = 0;
  int rx_count = 0;
  int fast_time_bins = 0;
  std::vector<int> support; // fast-time rows where any projector acts

  Eigen::Index row(int m, int i, int l) const {
    return (static_cast<Eigen::Index>(m) * rx_count + i) * fast_time_bins + l;
  }
  int pris() const { return static_cast<int>(data.cols()); }

  /// Y^H Y. Rows outside the support are identical across Tx blocks, so their
  /// product is formed once and weighted by tx_count.
  CMatrix gram() const;

  /// Rows (m, i, l) with l in the support, in (m, i, support order) order.
  CMatrix gated() const;
};

VirtualSnapshots apply_virtual_extension(const DataCube &cube, const BlockerSet &blockers);

} // namespace bimimo
