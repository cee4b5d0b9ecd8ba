// SPDX-License-Identifier: Apache-2.0
#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bimimo/baseline.hpp"
#include "bimimo/estimation.hpp"
#include "bimimo/extender.hpp"
#include "bimimo/reference.hpp"
#include "bimimo/subspace.hpp"
#include "support.hpp"

namespace bimimo::test {

namespace {

std::vector<DelayDoppler> truth_estimates(const DataCube &cube) {
  std::vector<DelayDoppler> out;
  for (const auto &t : cube.truth) out.push_back({t.delay_bins, t.doppler_hz});
  return out;
}

// P_B h with the per-Tx projector applied to every (m, i) fast-time block.
CVector project_extended(const BlockerSet &b, const CVector &h, int rx_count) {
  const int len = b.fast_time_bins();
  CVector out = h;
  for (int m = 0; m < b.tx_count(); ++m)
    for (int i = 0; i < rx_count; ++i) {
      const Eigen::Index off = (static_cast<Eigen::Index>(m) * rx_count + i) * len;
      out.segment(off, len) = b.project(m, h.segment(off, len));
    }
  return out;
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

} // namespace

double projector_defect() {
  const Instance in = make_instance(small_scenario(2), 11);
  const BlockerSet b = build_blockers(in.codes, truth_estimates(in.cube), in.model.chip_period_s);
  double worst = 0.0;
  for (int m = 0; m < b.tx_count(); ++m) {
    const CMatrix p = b.projector(m);
    worst = std::max(worst, (p * p - p).cwiseAbs().maxCoeff());
    worst = std::max(worst, (p - p.adjoint()).cwiseAbs().maxCoeff());
  }
  return worst;
}

double projector_null_residual() {
  const Instance in = make_instance(small_scenario(2), 11);
  const BlockerSet b = build_blockers(in.codes, truth_estimates(in.cube), in.model.chip_period_s);
  double worst = 0.0;
  for (int m = 0; m < b.tx_count(); ++m) {
    const CMatrix bm = b.blocking_matrix(m);
    worst = std::max(worst, (b.projector(m) * bm).cwiseAbs().maxCoeff() / bm.cwiseAbs().maxCoeff());
  }
  return worst;
}

double virtual_collinearity() {
  const Instance in = make_instance(small_scenario(1), 5);
  const BlockerSet b = build_blockers(in.codes, truth_estimates(in.cube), in.model.chip_period_s);
  const VirtualSnapshots v = apply_virtual_extension(in.cube, b);
  const auto &t = in.cube.truth[0];
  const CVector h = extended_manifold(t.doa_deg, t.dod_deg, t.delay_bins, t.doppler_hz, in.model);
  const CVector ph = project_extended(b, h, in.model.rx_count());
  double worst = 1.0;
  for (int n = 0; n < v.pris(); ++n) {
    const CVector x = v.data.col(n);
    worst = std::min(worst, std::abs(ph.dot(x)) / (ph.norm() * x.norm()));
  }
  return worst;
}

double virtual_span_residual() {
  const Instance in = make_instance(small_scenario(2), 8);
  const BlockerSet b = build_blockers(in.codes, truth_estimates(in.cube), in.model.chip_period_s);
  const VirtualSnapshots v = apply_virtual_extension(in.cube, b);
  CMatrix span(v.data.rows(), 2);
  for (int k = 0; k < 2; ++k) {
    const auto &t = in.cube.truth[k];
    span.col(k) = project_extended(
        b, extended_manifold(t.doa_deg, t.dod_deg, t.delay_bins, t.doppler_hz, in.model), in.model.rx_count());
  }
  const Eigen::HouseholderQR<CMatrix> qr(span);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(span.rows(), 2);
  double worst = 0.0;
  for (int n = 0; n < v.pris(); ++n) {
    const CVector x = v.data.col(n);
    worst = std::max(worst, (x - q * (q.adjoint() * x)).norm() / x.norm());
  }
  return worst;
}

double manifold_triple_loop_gap(std::uint64_t seed, int draws) {
  const Instance in = make_instance(small_scenario(1), 2);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 180.0), freq(-5000.0, 5000.0);
  std::uniform_int_distribution<int> delay(0, in.model.fast_time_bins() - in.model.code_length());
  double worst = 0.0;
  for (int r = 0; r < draws; ++r) {
    const double th = angle(rng), tb = angle(rng), f = freq(rng);
    const int d = delay(rng);
    const CVector h = extended_manifold(th, tb, d, f, in.model);
    const CVector srx = spatial_manifold(in.model.rx_array, th, 0.0, in.model.wavelength_m, ArraySide::rx);
    const CVector stx = spatial_manifold(in.model.tx_array, tb, 0.0, in.model.wavelength_m, ArraySide::tx);
    const CVector tmp = temporal_signature(in.codes, d, f, in.model.chip_period_s);
    const int n_rx = in.model.rx_count(), len = in.model.fast_time_bins();
    for (int m = 0; m < in.model.tx_count(); ++m)
      for (int i = 0; i < n_rx; ++i)
        for (int l = 0; l < len; ++l) {
          const cplx expect = std::conj(stx[m]) * srx[i] * tmp[l];
          worst = std::max(worst, std::abs(h[(m * n_rx + i) * len + l] - expect));
        }
  }
  return worst;
}

double xi1_factorization_gap() {
  Scenario sc = small_scenario(2);
  sc.system.snr_db = 10.0;
  const Instance in = make_instance(sc, 21);
  const SubspaceBasis basis = subspace_split(temporal_covariance(in.cube), 2);
  const Xi1Evaluator eval(in.codes, basis.signal, in.model.chip_period_s);
  double worst = 0.0;
  for (int d = 0; d <= eval.max_delay(); d += 3)
    for (double f : {-3000.0, -120.0, 0.0, 410.0, 2500.0}) {
      const double fast = eval.cost(d, f);
      const double slow = reference::xi1_cost_materialized(in.codes, basis.signal, in.model.chip_period_s, d, f);
      worst = std::max(worst, rel_gap(fast, slow));
    }
  return worst;
}

double xi2_factorization_gap() {
  Scenario sc = small_scenario(2);
  sc.system.snr_db = 10.0;
  const Instance in = make_instance(sc, 22);
  const auto est = truth_estimates(in.cube);
  const BlockerSet b = build_blockers(in.codes, est, in.model.chip_period_s);
  const VirtualSnapshots v = apply_virtual_extension(in.cube, b);
  const SubspaceBasis full = subspace_from_gram(v.data, v.gram(), 2);
  const Xi2Evaluator eval(in.model, b, gather_support_rows(full.signal, v));
  double worst = 0.0;
  for (int k = 0; k < eval.contexts(); ++k)
    for (double th : {20.0, 95.0, 121.5, 170.0})
      for (double tb : {10.0, 55.0, 70.0, 140.0}) {
        const auto fast = eval.terms(k, th, tb);
        const auto slow = reference::xi2_terms_materialized(in.model, b, full.signal, est[k], th, tb);
        worst = std::max({worst, rel_gap(fast.numerator, slow.numerator), rel_gap(fast.denominator, slow.denominator)});
      }
  return worst;
}

double ellipse_triangle_gap(std::uint64_t seed, int triangles) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> base(5.0, 200.0), range(10.0, 300.0), theta(3.0, 177.0);
  double worst = 0.0;
  int done = 0;
  while (done < triangles) {
    // Rx at the origin, Tx at (-l, 0); theta is measured from +x.
    const double l = base(rng), r_rx = range(rng), th = theta(rng);
    const double px = r_rx * std::cos(deg2rad(th)), py = r_rx * std::sin(deg2rad(th));
    const double r_tx = std::hypot(px + l, py);
    const double tx_angle = rad2deg(std::atan2(py, px + l));
    const double r_bi = r_tx + r_rx;
    const EllipseParams e = ellipse_params(r_bi, l);
    // Skip near-degenerate shapes where the closed forms lose digits.
    if (e.eps < 0.05 || e.eps > 0.95 || tx_angle < 2.0 || tx_angle > 178.0) continue;
    ++done;
    const auto [rr, rt] = split_bistatic_range(e, th, r_bi);
    const double dod = dod_from_geometry(e, rt);
    const double loc = law_of_cosines_dod(l, r_tx, r_rx);
    worst = std::max({worst, std::abs(rr - r_rx), std::abs(rt - r_tx), std::abs(dod - loc), std::abs(loc - tx_angle)});
  }
  return worst;
}

double code_gram_ratio() {
  double worst = 0.0;
  for (CodeKind kind : {CodeKind::MSequenceShifts, CodeKind::Gold})
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
      const CodeMatrix c = generate_pn_codes(5, 15, kind, seed);
      worst = std::max(worst, max_off_diagonal(normalized_gram(c)) * 15.0 / 2.0);
    }
  return worst;
}

} // namespace bimimo::test
