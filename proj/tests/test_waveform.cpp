// SPDX-License-Identifier: Apache-2.0
#include <numeric>
#include <stdexcept>

#include "doctest.h"

#include "bimimo/waveform.hpp"

using namespace bimimo;

TEST_SUITE("waveform") {

TEST_CASE("m-sequences are balanced and two-valued in autocorrelation") {
  for (int degree = 2; degree <= 10; ++degree) {
    const auto s = m_sequence(degree);
    const int len = (1 << degree) - 1;
    REQUIRE(static_cast<int>(s.size()) == len);
    CHECK(std::accumulate(s.begin(), s.end(), 0) == -1);
    for (int tau = 1; tau < len; tau += 1 + len / 7) {
      int acc = 0;
      for (int q = 0; q < len; ++q) acc += s[q] * s[(q + tau) % len];
      CHECK(acc == -1);
    }
  }
  CHECK_THROWS_AS(m_sequence(1), std::invalid_argument);
  CHECK_THROWS_AS(m_sequence(11), std::invalid_argument);
}

TEST_CASE("shifted m-sequence codes: distinct columns correlate to -1") {
  const CodeMatrix c = generate_pn_codes(5, 15, CodeKind::MSequenceShifts);
  REQUIRE(c.chips.rows() == 15);
  REQUIRE(c.chips.cols() == 5);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      if (a == b) continue;
      for (int tau = 0; tau < 15; ++tau) {
        double acc = 0.0;
        for (int q = 0; q < 15; ++q) acc += c.chips(q, a) * c.chips((q + tau) % 15, b);
        // Columns are shifts of one sequence, so exactly one lag hits the peak.
        CHECK((acc == -1.0 || acc == 15.0));
      }
    }
  const RMatrix g = c.chips.transpose() * c.chips;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) CHECK(g(a, b) == (a == b ? 15.0 : -1.0));
}

TEST_CASE("single code has unit gram") {
  const CodeMatrix c = generate_pn_codes(1, 15, CodeKind::MSequenceShifts);
  const RMatrix g = normalized_gram(c);
  CHECK(g.rows() == 1);
  CHECK(g(0, 0) == 1.0);
}

TEST_CASE("gold codes meet the 2/Nc cross-correlation bound") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const CodeMatrix c = generate_pn_codes(5, 15, CodeKind::Gold, seed);
    CHECK(max_off_diagonal(normalized_gram(c)) <= 2.0 / 15.0 + 1e-15);
  }
}

TEST_CASE("invalid code requests") {
  CHECK_THROWS_AS(generate_pn_codes(0, 15, CodeKind::MSequenceShifts), std::invalid_argument);
  CHECK_THROWS_AS(generate_pn_codes(3, 14, CodeKind::MSequenceShifts), std::invalid_argument);
  CHECK_THROWS_AS(generate_pn_codes(8, 7, CodeKind::MSequenceShifts), std::invalid_argument);
}

TEST_CASE("extension to the PRI") {
  const CodeMatrix c = generate_pn_codes(5, 15, CodeKind::MSequenceShifts);
  const CodeMatrix same = extend_codes(c, 15);
  CHECK(same.extended == c.chips);

  const CodeMatrix ex = extend_codes(c, 524);
  CHECK(ex.extended.rows() == 524);
  CHECK(ex.extended.cols() == 5);
  CHECK(ex.extended.topRows(15) == c.chips);
  CHECK(ex.extended.bottomRows(524 - 15).isZero(0.0));
  CHECK(ex.composite == ex.extended.rowwise().sum());
  CHECK_THROWS_AS(extend_codes(c, 14), std::invalid_argument);
}

TEST_CASE("symbol matrix") {
  const CodeMatrix c = extend_codes(generate_pn_codes(3, 7, CodeKind::MSequenceShifts), 10);
  SymbolSequence one;
  one.values = RVector::Ones(1);
  CHECK(symbol_matrix(one, c) == c.extended.transpose());

  SymbolSequence two;
  two.values.resize(2);
  two.values << 1.0, -1.0;
  const RMatrix m = symbol_matrix(two, c);
  REQUIRE(m.cols() == 20);
  CHECK(m.rightCols(10) == -m.leftCols(10));
}

TEST_CASE("full-size symbol matrix keeps codes nearly orthogonal") {
  const SystemConfig sys;
  const CodeMatrix c = make_codes(sys, 4);
  const SymbolSequence a = generate_symbols(sys.pris_per_cpi, 9);
  const RMatrix m = symbol_matrix(a, c);
  const RMatrix g = m * m.transpose() / (15.0 * sys.pris_per_cpi);
  CHECK(max_off_diagonal(g) <= 2.0 / 15.0);
}

TEST_CASE("symbols") {
  const SymbolSequence a = generate_symbols(256, 42);
  const SymbolSequence b = generate_symbols(256, 42);
  CHECK(a.size() == 256);
  CHECK(a.values == b.values);
  for (int n = 0; n < a.size(); ++n) CHECK((a.values[n] == 1.0 || a.values[n] == -1.0));
  CHECK(generate_symbols(256, 43).values != a.values);
  CHECK_THROWS_AS(generate_symbols(0, 1), std::invalid_argument);
}

} // TEST_SUITE
