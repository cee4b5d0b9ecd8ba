// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"

#include "bimimo/baseline.hpp"
#include "bimimo/kernels.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace bimimo;

namespace {

// r_rx from the triangle (l, r_bi - r_rx, r_rx) with the Rx angle theta measured
// away from the Tx site.
double r_rx_oracle(double r_bi, double l, double theta_deg) {
  return (r_bi * r_bi - l * l) / (2.0 * (r_bi + l * std::cos(deg2rad(theta_deg))));
}

} // namespace

TEST_SUITE("baseline") {

TEST_CASE("ellipse parameters") {
  const EllipseParams e1 = ellipse_params(152, 95);
  CHECK(e1.a == 76.0);
  CHECK(e1.eps == doctest::Approx(0.625));
  CHECK(e1.b == doctest::Approx(59.3275).epsilon(1e-6));
  const EllipseParams e2 = ellipse_params(189, 95);
  CHECK(e2.a == 94.5);
  CHECK(e2.eps == doctest::Approx(0.50265).epsilon(1e-5));
  CHECK(e2.b == doctest::Approx(81.6946).epsilon(1e-6));
  const EllipseParams c = ellipse_params(40, 0);
  CHECK(c.eps == 0.0);
  CHECK(c.b == c.a);
  CHECK_THROWS_AS(ellipse_params(95, 95), GeometryError);
  CHECK_THROWS_AS(ellipse_params(90, 95), GeometryError);
  CHECK_THROWS_AS(ellipse_params(90, -1), GeometryError);
}

TEST_CASE("range split") {
  const EllipseParams e1 = ellipse_params(152, 95);
  const auto [r_rx, r_tx] = split_bistatic_range(e1, 150.0, 152);
  CHECK(r_rx == doctest::Approx(r_rx_oracle(152, 95, 150)).epsilon(1e-12));
  CHECK(r_rx == doctest::Approx(100.957).epsilon(1e-5));
  CHECK(r_tx == doctest::Approx(152 - r_rx));
  CHECK(std::round(r_rx) == 101);
  CHECK(std::round(r_tx) == 51);

  const auto [lr, lt] = split_bistatic_range(e1, 90.0, 152);
  CHECK(lr == doctest::Approx(e1.a * (1 - e1.eps * e1.eps)));
  (void)lt;

  const EllipseParams e3 = ellipse_params(228, 95);
  CHECK(e3.eps == doctest::Approx(0.41667).epsilon(1e-5));
  const double r3 = split_bistatic_range(e3, 100.0, 228).first;
  CHECK(r3 == doctest::Approx(101.56).epsilon(1e-4));
  CHECK(std::round(r3) == 102);
}

TEST_CASE("DOD from geometry") {
  const EllipseParams e1 = ellipse_params(152, 95);
  const auto [r_rx, r_tx] = split_bistatic_range(e1, 150.0, 152);
  const double dod = dod_from_geometry(e1, r_tx);
  CHECK(dod == doctest::Approx(law_of_cosines_dod(95, r_tx, r_rx)).epsilon(1e-12));
  CHECK(std::abs(dod - 81.44) < 0.05);

  const EllipseParams e3 = ellipse_params(228, 95);
  const auto [r3, t3] = split_bistatic_range(e3, 100.0, 228);
  CHECK(std::abs(dod_from_geometry(e3, t3) - 52.5) <= 0.5);
  (void)r3;

  const EllipseParams circle = ellipse_params(60, 0);
  CHECK(dod_from_geometry(circle, circle.a) == 90.0);
  CHECK_THROWS_AS(dod_from_geometry(circle, 10.0), GeometryError);
  CHECK_THROWS_AS(dod_from_geometry(e1, 5.0), GeometryError);
  CHECK_THROWS_AS(dod_from_geometry(e1, 0.0), GeometryError);
}

TEST_CASE("ellipse round trip and law of cosines on random triangles") {
  CHECK(test::ellipse_triangle_gap(2024, 10000) <= 1e-9);
}

TEST_CASE("MUSIC on a noiseless single target") {
  Scenario s = default_scenario();
  s.targets = {s.targets[0]};
  s.system.snr_db = kDisabled;
  s.system.scr_db = kDisabled;
  const test::Instance in = test::make_instance(s, 1);
  const auto grid = angle_grid(0, 180, 0.01);
  const MusicResult m = music_doa_spectrum(in.cube, in.model, 1, grid);
  REQUIRE(m.peaks_deg.size() == 1);
  CHECK(std::abs(m.peaks_deg[0] - 150.0) <= 0.01);
  CHECK_THROWS_AS(music_doa_spectrum(in.cube, in.model, 5, grid), std::invalid_argument);
  CHECK_THROWS_AS(music_doa_spectrum(in.cube, in.model, 0, grid), std::invalid_argument);
}

TEST_CASE("MUSIC resolves the three default targets at 20 dB") {
  const test::Instance in = test::make_instance(default_scenario(), 1);
  const DataCube filtered = zero_doppler_notch(in.cube, in.symbols);
  const MusicResult m = music_doa_spectrum(filtered, in.model, 3, angle_grid(0, 180, 0.01));
  std::vector<double> p = m.peaks_deg;
  std::sort(p.begin(), p.end());
  CHECK(std::abs(p[0] - 100.0) <= 0.5);
  CHECK(std::abs(p[1] - 130.0) <= 0.5);
  CHECK(std::abs(p[2] - 150.0) <= 0.5);
}

TEST_CASE("MUSIC spectrum equals the explicit noise-projector form") {
  const test::Instance in = test::make_instance(default_scenario(), 4);
  const CMatrix r = spatial_covariance(zero_doppler_notch(in.cube, in.symbols));
  const CMatrix u = subspace_split(r, 3).signal;
  const CMatrix pn = CMatrix::Identity(5, 5) - u * u.adjoint();
  const Scenario s = default_scenario();
  const double lambda = derive_params(s).wavelength_m;
  const auto grid = angle_grid(0, 180, 0.25);
  const RVector p = kernels::music_spectrum(u, s.rx_array, lambda, grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const CVector a = spatial_manifold(s.rx_array, grid[j], 0.0, lambda, ArraySide::rx);
    const double expected = 1.0 / (a.adjoint() * pn * a)(0, 0).real();
    CHECK(p[static_cast<Eigen::Index>(j)] == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("MUSIC without a signal subspace is flat") {
  const Scenario s = default_scenario();
  const CMatrix none(5, 0);
  const double lambda = derive_params(s).wavelength_m;
  const RVector p = kernels::music_spectrum(none, s.rx_array, lambda, angle_grid(0, 180, 1));
  CHECK(p.maxCoeff() / p.minCoeff() == doctest::Approx(1.0));

  // Spatially white noise: the covariance eigenvalues are nearly equal.
  Scenario n = s;
  n.targets.clear();
  n.system.scr_db = kDisabled;
  const test::Instance in = test::make_instance(n, 2);
  const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(spatial_covariance(in.cube)).eigenvalues();
  CHECK(ev.maxCoeff() / ev.minCoeff() < 1.05);
}

TEST_CASE("noiseless single-target chain") {
  Scenario s = default_scenario();
  s.targets = {s.targets[0]};
  s.system.snr_db = kDisabled;
  s.system.scr_db = kDisabled;
  const test::Instance in = test::make_instance(s, 1);
  const BaselineResult r = baseline_estimate(in.cube, in.model, in.symbols, 95.0, 1);
  REQUIRE(r.targets.size() == 1);
  const auto &t = r.targets[0];
  CHECK(t.delay_bins == 152);
  CHECK(std::abs(t.doa_deg - 150.0) <= 0.01);
  CHECK(t.r_rx_bins == doctest::Approx(r_rx_oracle(152, 95, t.doa_deg)).epsilon(1e-12));
  CHECK(t.dod_deg == doctest::Approx(law_of_cosines_dod(95, t.r_tx_bins, t.r_rx_bins)).epsilon(1e-10));
}

TEST_CASE("default scenario baseline DOD within a degree") {
  const test::Instance in = test::make_instance(default_scenario(), 1);
  const DataCube filtered = zero_doppler_notch(in.cube, in.symbols);
  const BaselineResult r = baseline_estimate(filtered, in.model, in.symbols, 95.0, 3);
  REQUIRE(r.targets.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(r.targets[k].delay_bins == in.cube.truth[k].delay_bins);
    CHECK(std::abs(r.targets[k].dod_deg - in.cube.truth[k].dod_deg) < 1.0);
  }
}

} // TEST_SUITE
