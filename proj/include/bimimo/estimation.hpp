// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <vector>

#include "bimimo/channel.hpp"
#include "bimimo/extender.hpp"
#include "bimimo/manifold.hpp"
#include "bimimo/subspace.hpp"
#include "bimimo/types.hpp"
#include "bimimo/waveform.hpp"

namespace bimimo {

/// Raised when a search finds fewer peaks than requested.
class PeakCountError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct EstimatorConfig {
  int signal_dim = 0;         // 0: use the target count
  bool estimate_dim = false;  // eigen-gap estimate instead of a known K
  int max_dim = 8;

  // Range/Doppler stage
  int doppler_nms_bins = 2;
  double detection_gate_db = 3.0;      // xi1 range peak above the median profile
  double secondary_doppler_db = -6.0;  // second Doppler line within one range bin
  bool refine_doppler = true;
  int doppler_zero_pad = 16;

  // Angle stage
  double angle_min_deg = 0.0;
  double angle_max_deg = 180.0;
  double angle_coarse_step_deg = 0.5;
  double angle_refine_step_deg = 0.01;
  double angle_refine_span_deg = 0.5;
  double angle_nms_deg = 2.0;
  bool range_gate_virtual = true; // virtual covariance over blocker-support rows only
};

/// Clutter filter: a zero-Doppler notch applied after symbol demodulation,
/// x[n] <- x[n] - a[n] mean_m(a[m] x[m]). Removes stationary clutter exactly;
/// a target keeps all but a 1/N_s share of its energy unless its Doppler is a
/// multiple of the PRF.
DataCube zero_doppler_notch(const DataCube &cube, const SymbolSequence &symbols);

/// Evaluates det(T^H T) / det(T^H P_n T) for T = T(d, f) with P_n = I - U U^H
/// applied through U^H T. The global chip-index phase of T cancels, so only
/// the code-support rows of U are touched.
class Xi1Evaluator {
public:
  Xi1Evaluator(const CodeMatrix &codes, const CMatrix &signal_basis, double chip_period_s);

  /// +inf when T^H P_n T is not positive definite (exact subspace hit).
  double cost(int d, double f_hz) const;
  /// Same cost with the Doppler-phased chips diag(exp(j 2 pi f (q+1) T_c)) C precomputed.
  double cost_phased(int d, const CMatrix &phased_chips) const;
  CMatrix phased_chips(double f_hz) const;

  int max_delay() const { return bins_ - nc_; }
  const CMatrix &basis() const { return u_; }

private:
  CMatrix u_;
  RMatrix chips_;
  double tc_;
  int nc_, bins_;
  double log_det_a_;
  Eigen::MatrixXcd a_;
};

double xi1_cost(int d, double f_hz, const CodeMatrix &codes, const SubspaceBasis &basis, double chip_period_s);

/// Doppler grid j * PRF / N_s, j = -N_s/2 .. N_s/2 - 1.
std::vector<double> doppler_grid(const SignalModel &model);
std::vector<int> delay_grid(const SignalModel &model);

struct RangeDopplerPeak {
  int delay_bins = 0;
  double doppler_coarse_hz = 0.0; // slow-time spectrum on the Doppler grid
  double doppler_hz = 0.0;        // refined (equals coarse when refinement is off)
  double xi1_db = 0.0;            // range-profile peak
  double xi1_doppler_hz = 0.0;    // Doppler node of the xi1 maximum at this delay
  bool secondary = false;         // second Doppler line at an already-picked delay
};

struct StageOne {
  SubspaceBasis basis;
  std::vector<int> delays;
  std::vector<double> dopplers;
  RMatrix surface_db;        // delays x dopplers
  RVector range_profile_db;  // max over Doppler
  std::vector<RangeDopplerPeak> peaks;
  int signal_dim = 0;
};

/// Range/Doppler stage. k = number of targets to return; with
/// cfg.estimate_dim the eigen-gap estimate replaces k. Throws PeakCountError
/// when fewer than k candidates exist.
StageOne range_doppler_search(const DataCube &cube, const SignalModel &model, const SymbolSequence &symbols, int k,
                              const EstimatorConfig &cfg = {});

/// Slow-time sequences at delay d: column (i * tx_count + m) holds
/// a[n] * sum_q c_m[q] x_{n,i}[d + q], n = 0..N_s-1.
CMatrix despread_slow_time(const DataCube &cube, const CodeMatrix &codes, const SymbolSequence &symbols, int d);

/// sum over columns of |sum_n z[n] exp(-j 2 pi f n PRI)|^2 at each frequency.
RVector slow_time_spectrum(const CMatrix &z, const std::vector<double> &freqs_hz, double pri_s);

/// Fine Doppler: periodogram searched within +-doppler_bin of f_coarse at
/// doppler_bin / zero_pad spacing, 3-point parabolic interpolation of the log
/// power, result wrapped into (-PRF/2, PRF/2].
double doppler_refine(const DataCube &cube, const SignalModel &model, const SymbolSequence &symbols, int d,
                      double f_coarse_hz, int zero_pad = 16);

double wrap_doppler(double f_hz, double prf_hz);

/// xi2 for the K per-target contexts, factorized per (k, m, i):
///   psi_{k,m} = P_m^perp temporal_k on the blocker support W
///   G_{k,m}   = [U_{(m,i),W}^H psi_{k,m}]_i          (dim x N)
///   U^H phi   = sum_m conj(Sbar_m) G_{k,m} S_rx      (dim)
///   ||phi||^2 = N sum_m ||psi_{k,m}||^2              (angle independent)
class Xi2Evaluator {
public:
  struct Terms {
    double numerator = 0.0;   // ||P_B^perp h||^2
    double denominator = 0.0; // (P_B^perp h)^H P_nv (P_B^perp h)
  };

  /// support_basis holds the rows (m, i, l in blockers.support()) of the
  /// virtual signal basis, in that order.
  Xi2Evaluator(const SignalModel &model, const BlockerSet &blockers, const CMatrix &support_basis);

  int contexts() const { return static_cast<int>(g_.size()); }
  const SignalModel &model() const { return *model_; }

  Terms terms(int k, double doa_deg, double dod_deg) const;
  /// numerator / denominator; +inf on an exact hit, -inf for a context whose
  /// projected signature vanishes.
  double contribution(int k, double doa_deg, double dod_deg) const;
  double cost(double doa_deg, double dod_deg) const;

  // Pieces for grid kernels.
  CVector rx_manifold(double doa_deg) const;
  CVector tx_manifold(double dod_deg) const;
  /// dim x tx_count matrix with column m = G_{k,m} S_rx.
  CMatrix rx_combine(int k, const CVector &s_rx) const;
  double contribution_from(int k, const CMatrix &rx_combined, const CVector &s_tx) const;
  double phi_energy(int k) const { return phi_energy_[k]; }

private:
  const SignalModel *model_;
  std::vector<std::vector<CMatrix>> g_; // [k][m]: dim x N
  std::vector<double> phi_energy_;
};

/// Rows (m, i, l in support) of a basis over the full virtual ambient space.
CMatrix gather_support_rows(const CMatrix &full_basis, const VirtualSnapshots &v);

struct AngleEstimate {
  double doa_deg = 0.0;
  double dod_deg = 0.0;
  int context = 0;
  double xi2_db = 0.0;
};

struct StageTwo {
  std::vector<AngleEstimate> angles; // one per context, in context order
  std::vector<double> doa_grid;
  std::vector<double> dod_grid;
  RMatrix surface_db; // doa x dod, summed over contexts
  SubspaceBasis basis;
};

std::vector<double> angle_grid(double lo_deg, double hi_deg, double step_deg);

/// Coarse scan of every context's contribution, argmax per context, then a
/// local refinement at refine_step within +-refine_span of the coarse node.
StageTwo doa_dod_search(const Xi2Evaluator &eval, const EstimatorConfig &cfg = {});

struct VstResult {
  StageOne stage1;
  std::vector<DelayDoppler> delay_doppler;
  StageTwo stage2;
  double seconds_stage1 = 0.0;
  double seconds_stage2 = 0.0;
};

/// Second stage alone: blockers from the delay/Doppler estimates, virtual
/// extension, subspace, DOA/DOD search.
StageTwo angle_stage(const DataCube &cube, const SignalModel &model, const std::vector<DelayDoppler> &estimates,
                     const EstimatorConfig &cfg = {});

/// Full two-stage estimator.
VstResult vst_estimate(const DataCube &cube, const SignalModel &model, const SymbolSequence &symbols, int k,
                       const EstimatorConfig &cfg = {});

} // namespace bimimo
