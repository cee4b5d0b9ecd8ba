// SPDX-License-Identifier: Apache-2.0
#include "bimimo/subspace.hpp"

#include <algorithm>
#include <stdexcept>

namespace bimimo {

CMatrix temporal_covariance(const DataCube &cube) {
  const auto z = cube.snapshots();
  const Eigen::Index len = z.rows();
  CMatrix r = CMatrix::Zero(len, len);
  r.selfadjointView<Eigen::Lower>().rankUpdate(z, 1.0 / static_cast<double>(z.cols()));
  return CMatrix(r.selfadjointView<Eigen::Lower>());
}

namespace {

void check_dim(Eigen::Index ambient, int dim) {
  if (dim < 0 || dim > ambient)
    throw std::invalid_argument("subspace dimension " + std::to_string(dim) + " outside [0, " +
                                std::to_string(ambient) + "]");
}

} // namespace

SubspaceBasis subspace_split(const CMatrix &hermitian, int dim) {
  if (hermitian.rows() != hermitian.cols()) throw std::invalid_argument("covariance must be square");
  check_dim(hermitian.rows(), dim);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  SubspaceBasis b;
  b.eigenvalues = es.eigenvalues().reverse();
  b.signal = es.eigenvectors().rightCols(dim).rowwise().reverse();
  return b;
}

SubspaceBasis subspace_from_gram(const CMatrix &y, const CMatrix &gram, int dim) {
  check_dim(std::min(y.rows(), y.cols()), dim);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const double scale = 1.0 / static_cast<double>(y.cols());
  SubspaceBasis b;
  b.eigenvalues = es.eigenvalues().reverse() * scale;
  const CMatrix v = es.eigenvectors().rightCols(dim).rowwise().reverse();
  CMatrix u = y * v;
  const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
  for (int j = 0; j < dim; ++j) {
    const double lam = b.eigenvalues[j] / scale;
    if (lam > 1e-14 * top && lam > 0) u.col(j) /= std::sqrt(lam);
  }
  // Columns with vanishing eigenvalues are noise; QR keeps the result orthonormal.
  if (dim > 0) {
    Eigen::HouseholderQR<CMatrix> qr(u);
    CMatrix q = qr.householderQ() * CMatrix::Identity(u.rows(), dim);
    // Undo the sign/phase ambiguity QR introduces so q matches u column-wise.
    for (int j = 0; j < dim; ++j) {
      const cplx p = q.col(j).dot(u.col(j));
      if (std::abs(p) > 0) q.col(j) *= p / std::abs(p);
    }
    b.signal = std::move(q);
  } else {
    b.signal = CMatrix(y.rows(), 0);
  }
  return b;
}

SubspaceBasis subspace_from_snapshots(const CMatrix &y, int dim) {
  CMatrix g = CMatrix::Zero(y.cols(), y.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(y.adjoint(), 1.0);
  return subspace_from_gram(y, CMatrix(g.selfadjointView<Eigen::Lower>()), dim);
}

int estimate_signal_dim(const RVector &ev, int max_dim) {
  const int lim = std::min<int>(max_dim, static_cast<int>(ev.size()) - 1);
  int best = 1;
  double best_ratio = -1.0;
  for (int k = 1; k <= lim; ++k) {
    const double lo = std::max(ev[k], 1e-300);
    const double ratio = ev[k - 1] / lo;
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = k;
    }
  }
  return best;
}

} // namespace bimimo
