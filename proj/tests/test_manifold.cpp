// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "bimimo/manifold.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace bimimo;

TEST_SUITE("manifold") {

TEST_CASE("direction unit vectors") {
  CHECK((direction_unit_vector(0, 0) - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
  CHECK((direction_unit_vector(90, 0) - Eigen::Vector3d(0, 1, 0)).norm() < 1e-15);
  CHECK((direction_unit_vector(150, 0) - Eigen::Vector3d(-0.8660254037844386, 0.5, 0)).norm() < 1e-15);
  CHECK(direction_unit_vector(33, 71).norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("spatial manifold special cases") {
  const Scenario s = default_scenario();
  const double lambda = derive_params(s).wavelength_m;
  const CVector up = spatial_manifold(s.rx_array, 37.0, 90.0, lambda, ArraySide::rx);
  CHECK((up - CVector::Ones(5)).cwiseAbs().maxCoeff() < 1e-12);

  ArrayGeometry origin;
  origin.coordinates = RMatrix::Zero(3, 1);
  const CVector one = spatial_manifold(origin, 123.0, 0.0, lambda, ArraySide::tx);
  CHECK(one.size() == 1);
  CHECK(one[0] == cplx(1.0, 0.0));
}

TEST_CASE("default Rx element 1 phase at 150 degrees") {
  const Scenario s = default_scenario();
  const double lambda = derive_params(s).wavelength_m;
  const CVector rx = spatial_manifold(s.rx_array, 150.0, 0.0, lambda, ArraySide::rx);
  CHECK(std::arg(rx[0]) == doctest::Approx(2.1709).epsilon(1e-4));
  const CVector tx = spatial_manifold(s.rx_array, 150.0, 0.0, lambda, ArraySide::tx);
  CHECK(std::abs(tx[0] - std::conj(rx[0])) < 1e-15);
}

TEST_CASE("Doppler phase vector") {
  const CVector dc = doppler_phase_vector(0.0, 524, 1e-6);
  CHECK((dc - CVector::Ones(524)).cwiseAbs().maxCoeff() == 0.0);
  const double prf = 1.0 / 524e-6;
  const CVector full = doppler_phase_vector(prf, 524, 1e-6);
  for (int l = 0; l < 524; l += 37) CHECK(std::abs(full[l] - cis(kTwoPi * (l + 1) / 524.0)) < 1e-12);
}

TEST_CASE("shift operator") {
  CVector v(5);
  v << 1.0, 2.0, 3.0, 4.0, 5.0;
  CHECK(apply_shift(v, 0) == v);
  const CVector last = apply_shift(v, 4);
  CHECK(last[4] == v[0]);
  CHECK(last.head(4).isZero(0.0));
  CHECK_THROWS_AS(apply_shift(v, 5), std::out_of_range);
  CHECK_THROWS_AS(apply_shift(v, -1), std::out_of_range);
}

TEST_CASE("temporal signature support and orthogonality") {
  const CodeMatrix codes = make_codes(SystemConfig{}, 0);
  const CVector zero = temporal_signature(codes, 0, 0.0, 1e-6);
  CHECK((zero - codes.composite.cast<cplx>()).cwiseAbs().maxCoeff() == 0.0);

  const CVector t1 = temporal_signature(codes, 152, -429.37, 1e-6);
  for (int l = 0; l < 524; ++l) {
    // 1-based rows 153..167.
    const bool inside = l >= 152 && l <= 166;
    if (!inside) CHECK(t1[l] == cplx(0.0, 0.0));
  }
  CHECK(t1.segment(152, 15).cwiseAbs().minCoeff() > 0.0);

  const CVector t2 = temporal_signature(codes, 152 + 15, 300.0, 1e-6);
  CHECK(std::abs(t1.dot(t2)) == 0.0);

  CHECK_THROWS_AS(temporal_signature(codes, 510, 0.0, 1e-6), RangeAmbiguityError);
  CHECK_NOTHROW(temporal_signature(codes, 509, 0.0, 1e-6));
}

TEST_CASE("transformation matrix") {
  const CodeMatrix codes = make_codes(SystemConfig{}, 0);
  const CMatrix t = transformation_matrix(codes, 0, 0.0, 1e-6);
  CHECK((t - codes.extended.cast<cplx>()).cwiseAbs().maxCoeff() == 0.0);
  const CMatrix td = transformation_matrix(codes, 40, 212.0, 1e-6);
  const CVector sum = td.rowwise().sum();
  CHECK((sum - temporal_signature(codes, 40, 212.0, 1e-6)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("extended manifold with one element per array is the temporal signature") {
  Scenario s = test::small_scenario(1);
  s.system.tx_count = 1;
  s.system.rx_count = 1;
  s.tx_array.coordinates = s.tx_array.coordinates.leftCols(1);
  s.rx_array.coordinates = s.rx_array.coordinates.leftCols(1);
  const CodeMatrix codes = make_codes(s.system, 0);
  const SignalModel model = make_signal_model(s, codes);
  const CVector h = extended_manifold(70.0, 20.0, 9, 150.0, model);
  CHECK((h - temporal_signature(codes, 9, 150.0, model.chip_period_s)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("extended manifold matches the triple-loop construction") {
  CHECK(test::manifold_triple_loop_gap(1, 50) == 0.0);
}

TEST_CASE("default target 1 block (m, i) ordering") {
  const Scenario s = default_scenario();
  const CodeMatrix codes = make_codes(s.system, 0);
  const SignalModel model = make_signal_model(s, codes);
  const CVector h = extended_manifold(150.0, 81.20, 152, -429.37, model);
  const CVector srx = spatial_manifold(s.rx_array, 150.0, 0.0, model.wavelength_m, ArraySide::rx);
  const CVector stx = spatial_manifold(s.tx_array, 81.20, 0.0, model.wavelength_m, ArraySide::tx);
  const CVector tmp = temporal_signature(codes, 152, -429.37, model.chip_period_s);
  const int len = 524;
  CHECK(h.size() == 5 * 5 * len);
  for (int m : {0, 3})
    for (int i : {1, 4}) {
      const CVector block = h.segment((m * 5 + i) * len, len);
      CHECK((block - std::conj(stx[m]) * srx[i] * tmp).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

} // TEST_SUITE
