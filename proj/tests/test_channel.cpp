// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "bimimo/channel.hpp"
#include "bimimo/reference.hpp"
#include "support.hpp"

using namespace bimimo;

namespace {

double mean_power(const DataCube &c) {
  double s = 0.0;
  for (const auto &x : c.data()) s += std::norm(x);
  return s / static_cast<double>(c.size());
}

double db(double x) { return 10.0 * std::log10(x); }

} // namespace

TEST_SUITE("channel") {

TEST_CASE("path gain scaling") {
  const Scenario s = default_scenario();
  Engine rng(1);
  const TargetSpec t = s.targets[0];
  const double base = path_gain(t, s.system, rng).magnitude;
  // |beta| for target 1 from the radar equation, evaluated independently.
  const double bin = 299792458.0 * 1e-6;
  const double expect = std::sqrt(1.0 / std::pow(4 * kPi, 3)) * (299792458.0 / 1.3e9) / (51 * bin * 101 * bin);
  CHECK(base == doctest::Approx(expect).epsilon(1e-12));
  CHECK(base == doctest::Approx(3.16e-10).epsilon(0.01));

  TargetSpec bright = t;
  bright.rcs_mean_m2 *= 4.0;
  CHECK(path_gain(bright, s.system, rng).magnitude == doctest::Approx(2.0 * base).epsilon(1e-12));
  TargetSpec far = t;
  far.r_tx_bins *= 2.0;
  far.r_rx_bins *= 2.0;
  CHECK(path_gain(far, s.system, rng).magnitude == doctest::Approx(base / 4.0).epsilon(1e-12));

  TargetSpec zero = t;
  zero.r_tx_bins = 0.0;
  CHECK_THROWS_AS(path_gain(zero, s.system, rng), std::invalid_argument);

  const PathGain g = path_gain(t, s.system, rng);
  CHECK(g.phase >= 0.0);
  CHECK(g.phase < kTwoPi);
}

TEST_CASE("Swerling draws") {
  Engine rng(2);
  const auto s1 = swerling_amplitude(1, 2.0, 256, rng);
  CHECK(std::all_of(s1.begin(), s1.end(), [&](double x) { return x == s1[0]; }));
  const auto s2 = swerling_amplitude(2, 2.0, 256, rng);
  CHECK(std::count(s2.begin(), s2.end(), s2[0]) == 1);
  const auto s3 = swerling_amplitude(3, 2.0, 256, rng);
  CHECK(std::all_of(s3.begin(), s3.end(), [&](double x) { return x == s3[0]; }));
  CHECK_THROWS_AS(swerling_amplitude(4, 1.0, 4, rng), std::invalid_argument);

  // Means over many CPIs.
  double m2 = 0.0, m3 = 0.0;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    m2 += swerling_amplitude(2, 2.0, 1, rng)[0];
    m3 += swerling_amplitude(3, 2.0, 1, rng)[0];
  }
  CHECK(m2 / reps == doctest::Approx(2.0).epsilon(0.05));
  CHECK(m3 / reps == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("noise-only cube has the requested variance") {
  Scenario s = default_scenario();
  s.targets.clear();
  s.system.scr_db = kDisabled;
  const test::Instance in = test::make_instance(s, 5);
  CHECK(in.cube.reference_power == 1.0);
  CHECK(mean_power(in.cube) == doctest::Approx(in.cube.noise_variance).epsilon(0.03));
  CHECK(in.cube.noise_variance == doctest::Approx(0.01));
}

TEST_CASE("single noiseless target gives a rank-1 spatial covariance") {
  const test::Instance in = test::make_instance(test::small_scenario(1), 6);
  CMatrix r = CMatrix::Zero(3, 3);
  for (int n = 0; n < in.cube.pris(); ++n) r += in.cube.pri(n).transpose() * in.cube.pri(n).conjugate();
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(r);
  const RVector ev = es.eigenvalues();
  CHECK(ev[1] < 1e-10 * ev[2]);
  // The dominant eigenvector is the Rx steering vector.
  const auto &t = in.cube.truth[0];
  const CVector srx = spatial_manifold(in.model.rx_array, t.doa_deg, 0.0, in.model.wavelength_m, ArraySide::rx);
  const CVector u = es.eigenvectors().col(2);
  CHECK(std::abs(u.dot(srx)) / srx.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("direct per-sample synthesis agrees with the vectorized path") {
  for (int k : {1, 3}) {
    Scenario s = test::small_scenario(k);
    s.targets[0].swerling = 2;
    const test::Instance in = test::make_instance(s, 40 + k, {true, false, false});
    const DataCube direct = reference::echoes_direct(s, in.model, in.symbols, 40 + k);
    double worst = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < direct.size(); ++j) {
      worst = std::max(worst, std::abs(direct.data()[j] - in.cube.data()[j]));
      scale = std::max(scale, std::abs(direct.data()[j]));
    }
    CHECK(worst <= 1e-12 * scale);
  }
}

TEST_CASE("default scenario range profile peaks at the true bistatic ranges") {
  const Scenario s = default_scenario();
  const test::Instance in = test::make_instance(s, 1, {true, false, true});
  // Matched filter per Tx code, summed non-coherently over PRIs and antennas.
  const int nc = s.system.code_length, len = s.system.fast_time_bins;
  RVector profile = RVector::Zero(len - nc + 1);
  for (int d = 0; d + nc <= len; ++d)
    for (int n = 0; n < in.cube.pris(); ++n) {
      const CMatrix z = in.codes.chips.transpose() * in.cube.pri(n).middleRows(d, nc);
      profile[d] += z.squaredNorm();
    }
  std::vector<int> peaks;
  RVector p = profile;
  for (int k = 0; k < 3; ++k) {
    Eigen::Index j;
    p.maxCoeff(&j);
    peaks.push_back(static_cast<int>(j));
    for (int d = std::max<int>(0, j - nc + 1); d < std::min<int>(p.size(), j + nc); ++d) p[d] = 0.0;
  }
  std::sort(peaks.begin(), peaks.end());
  CHECK(peaks == std::vector<int>{152, 189, 228});
}

TEST_CASE("clutter power and zero mean") {
  for (ClutterModel model : {ClutterModel::stationary, ClutterModel::white}) {
    DataCube c(256, 524, 5);
    const SymbolSequence a = generate_symbols(256, 3);
    add_clutter(c, -5.0, 1.0, 77, model, &a);
    CHECK(c.clutter_variance == doctest::Approx(std::pow(10.0, 0.5)));
    CHECK(std::abs(db(mean_power(c)) - 5.0) <= 0.3);
    // Mean over one PRI: L N independent samples under either model.
    cplx mean = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int l = 0; l < 524; ++l) mean += c.at(0, l, i);
    mean /= 524.0 * 5.0;
    const double sigma = std::sqrt(c.clutter_variance);
    CHECK(std::abs(mean) <= 4.0 * sigma / std::sqrt(524.0 * 5.0));
  }
}

TEST_CASE("stationary clutter repeats with the symbol sign") {
  DataCube c(4, 30, 2);
  SymbolSequence a;
  a.values.resize(4);
  a.values << 1, -1, -1, 1;
  add_clutter(c, 0.0, 1.0, 9, ClutterModel::stationary, &a);
  CHECK((c.pri(1) + c.pri(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((c.pri(3) - c.pri(0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noise power") {
  DataCube c(256, 524, 5);
  add_noise(c, 20.0, 2.0, 13);
  CHECK(std::abs(db(2.0 / mean_power(c)) - 20.0) <= 0.3);
}

TEST_CASE("disabled clutter and noise leave the cube unchanged") {
  const test::Instance in = test::make_instance(test::small_scenario(2), 4, {true, false, false});
  DataCube c = in.cube;
  add_clutter(c, kDisabled, 1.0, 1, ClutterModel::stationary, &in.symbols);
  add_noise(c, kDisabled, 1.0, 1);
  CHECK(c.data() == in.cube.data());
}

TEST_CASE("occupied-bin power") {
  DataCube c(2, 10, 1);
  for (int n = 0; n < 2; ++n)
    for (int l = 3; l < 5; ++l) c.at(n, l, 0) = cplx(2.0, 0.0);
  CHECK(occupied_bin_power(c, {3}, 2) == 4.0);
  CHECK(occupied_bin_power(c, {3}, 4) == 2.0);
  CHECK(occupied_bin_power(c, {}, 4) == 0.0);
}

TEST_CASE("synthesis is deterministic in the seed") {
  const Scenario s = test::small_scenario(3);
  Scenario noisy = s;
  noisy.system.snr_db = 5.0;
  noisy.system.scr_db = 0.0;
  const test::Instance a = test::make_instance(noisy, 99);
  const test::Instance b = test::make_instance(noisy, 99);
  CHECK(a.cube.data() == b.cube.data());
  const test::Instance c = test::make_instance(noisy, 100);
  CHECK(a.cube.data() != c.cube.data());
}

} // TEST_SUITE
