// SPDX-License-Identifier: Apache-2.0
#include "bimimo/extender.hpp"

#include <algorithm>
#include <stdexcept>

#include "bimimo/manifold.hpp"

namespace bimimo {

CVector vectorize_pri(const CMatrix &x_n) {
  // vec of the transpose stacks rows of X: antenna i's fast-time samples in turn.
  const CMatrix xt = x_n.transpose();
  return Eigen::Map<const CVector>(xt.data(), xt.size());
}

CMatrix devectorize_pri(const CVector &x_st, int rx_count, int fast_time_bins) {
  if (x_st.size() != static_cast<Eigen::Index>(rx_count) * fast_time_bins)
    throw std::invalid_argument("vector length does not match rx_count * fast_time_bins");
  return Eigen::Map<const CMatrix>(x_st.data(), fast_time_bins, rx_count).transpose();
}

BlockerSet build_blockers(const CodeMatrix &codes, const std::vector<DelayDoppler> &estimates, double chip_period_s) {
  if (estimates.empty()) throw std::invalid_argument("blockers need at least one delay/Doppler estimate");
  BlockerSet b;
  b.tx_count_ = codes.tx_count();
  b.bins_ = codes.fast_time_bins();
  b.estimates_ = estimates;

  const int nc = codes.code_length();
  std::vector<char> used(b.bins_, 0);
  std::vector<CMatrix> t_list;
  for (const auto &e : estimates) {
    t_list.push_back(transformation_matrix(codes, e.delay_bins, e.doppler_hz, chip_period_s));
    for (int q = 0; q < nc; ++q) used[e.delay_bins + q] = 1;
  }
  for (int l = 0; l < b.bins_; ++l)
    if (used[l]) b.support_.push_back(l);
  const auto w = static_cast<Eigen::Index>(b.support_.size());

  const int n_bar = b.tx_count_;
  const int k = static_cast<int>(estimates.size());
  b.blocking_.resize(n_bar);
  b.bases_.resize(n_bar);
  for (int m = 0; m < n_bar; ++m) {
    CMatrix bm(w, static_cast<Eigen::Index>(k) * (n_bar - 1));
    for (int kk = 0; kk < k; ++kk) {
      int col = kk * (n_bar - 1);
      for (int mm = 0; mm < n_bar; ++mm) {
        if (mm == m) continue;
        for (Eigen::Index r = 0; r < w; ++r) bm(r, col) = t_list[kk](b.support_[r], mm);
        ++col;
      }
    }
    b.blocking_[m] = bm;
    if (bm.cols() == 0) {
      b.bases_[m] = CMatrix(w, 0);
      continue;
    }
    Eigen::JacobiSVD<CMatrix> svd(bm, Eigen::ComputeThinU);
    const RVector &sv = svd.singularValues();
    if (!(sv[0] > 0)) throw std::invalid_argument("blocking matrix for Tx antenna " + std::to_string(m) + " is zero");
    Eigen::Index r = 0;
    while (r < sv.size() && sv[r] >= kBlockerRankTolerance * sv[0]) ++r;
    b.bases_[m] = svd.matrixU().leftCols(r);
  }
  return b;
}

void BlockerSet::project_in_place(int m, Eigen::Ref<CVector> v) const {
  const CMatrix &q = bases_[m];
  if (q.cols() == 0) return;
  const auto w = static_cast<Eigen::Index>(support_.size());
  CVector vw(w);
  for (Eigen::Index r = 0; r < w; ++r) vw[r] = v[support_[r]];
  const CVector coef = q.adjoint() * vw;
  vw.noalias() = q * coef;
  for (Eigen::Index r = 0; r < w; ++r) v[support_[r]] -= vw[r];
}

CVector BlockerSet::project(int m, const CVector &v) const {
  if (v.size() != bins_) throw std::invalid_argument("vector length does not match the PRI");
  CVector out = v;
  project_in_place(m, out);
  return out;
}

CMatrix BlockerSet::blocking_matrix(int m) const {
  CMatrix full = CMatrix::Zero(bins_, blocking_[m].cols());
  for (std::size_t r = 0; r < support_.size(); ++r) full.row(support_[r]) = blocking_[m].row(r);
  return full;
}

CMatrix BlockerSet::projector(int m) const {
  CMatrix q = CMatrix::Zero(bins_, bases_[m].cols());
  for (std::size_t r = 0; r < support_.size(); ++r) q.row(support_[r]) = bases_[m].row(r);
  return CMatrix::Identity(bins_, bins_) - q * q.adjoint();
}

VirtualSnapshots apply_virtual_extension(const DataCube &cube, const BlockerSet &blockers) {
  if (cube.fast_time_bins() != blockers.fast_time_bins())
    throw std::invalid_argument("cube and blockers disagree on the PRI length");
  VirtualSnapshots v;
  v.tx_count = blockers.tx_count();
  v.rx_count = cube.rx_count();
  v.fast_time_bins = cube.fast_time_bins();
  v.support = blockers.support();
  const Eigen::Index len = v.fast_time_bins;
  v.data.resize(static_cast<Eigen::Index>(v.tx_count) * v.rx_count * len, cube.pris());

#pragma omp parallel for schedule(static)
  for (int n = 0; n < cube.pris(); ++n) {
    const auto x = cube.pri(n);
    for (int m = 0; m < v.tx_count; ++m)
      for (int i = 0; i < v.rx_count; ++i) {
        auto seg = v.data.col(n).segment(v.row(m, i, 0), len);
        seg = x.col(i);
        blockers.project_in_place(m, seg);
      }
  }
  return v;
}

CMatrix VirtualSnapshots::gram() const {
  const int n_s = pris();
  std::vector<char> in_support(fast_time_bins, 0);
  for (int l : support) in_support[l] = 1;
  const auto w = static_cast<Eigen::Index>(support.size());
  const Eigen::Index outside = fast_time_bins - w;

  CMatrix a(static_cast<Eigen::Index>(rx_count) * outside, n_s);
  for (int i = 0; i < rx_count; ++i) {
    Eigen::Index r = static_cast<Eigen::Index>(i) * outside;
    for (int l = 0; l < fast_time_bins; ++l)
      if (!in_support[l]) a.row(r++) = data.row(row(0, i, l));
  }
  const CMatrix b = gated();
  CMatrix g = CMatrix::Zero(n_s, n_s);
  g.selfadjointView<Eigen::Lower>().rankUpdate(a.adjoint(), static_cast<double>(tx_count));
  g.selfadjointView<Eigen::Lower>().rankUpdate(b.adjoint(), 1.0);
  return CMatrix(g.selfadjointView<Eigen::Lower>());
}

CMatrix VirtualSnapshots::gated() const {
  const auto w = static_cast<Eigen::Index>(support.size());
  CMatrix out(static_cast<Eigen::Index>(tx_count) * rx_count * w, pris());
  Eigen::Index r = 0;
  for (int m = 0; m < tx_count; ++m)
    for (int i = 0; i < rx_count; ++i)
      for (int l : support) out.row(r++) = data.row(row(m, i, l));
  return out;
}

} // namespace bimimo
