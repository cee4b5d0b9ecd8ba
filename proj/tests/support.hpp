// SPDX-License-Identifier: Apache-2.0
// Small scenarios and helpers shared by the unit tests and the acceptance run.
#pragma once

#include <cstdint>
#include <vector>

#include "bimimo/channel.hpp"
#include "bimimo/rng.hpp"
#include "bimimo/scenario.hpp"
#include "bimimo/waveform.hpp"

namespace bimimo::test {

/// 3 Tx, 3 Rx, 7-chip codes, L = 60, 16 PRIs; noise and clutter off.
inline Scenario small_scenario(int targets = 1) {
  Scenario s;
  auto &sys = s.system;
  sys.code_length = 7;
  sys.fast_time_bins = 60;
  sys.pris_per_cpi = 16;
  sys.tx_count = 3;
  sys.rx_count = 3;
  sys.baseline_bins = 20.0;
  sys.snr_db = kDisabled;
  sys.scr_db = kDisabled;
  s.tx_array.coordinates.resize(3, 3);
  s.tx_array.coordinates << 0.0, 0.11, 0.23, //
      0.0, 0.02, -0.05,                       //
      0.0, 0.0, 0.0;
  s.rx_array.coordinates.resize(3, 3);
  s.rx_array.coordinates << 0.0, 0.1, 0.04, //
      0.0, 0.0, 0.09,                       //
      0.0, 0.0, 0.0;
  const std::vector<TargetSpec> pool = {
      {12, 14, 120.0, 70.0, 40.0, 1.0, 1, 25.0, 10.0},
      {18, 16, 95.0, 55.0, 30.0, 1.0, 1, -40.0, 0.0},
      {22, 19, 60.0, 110.0, 35.0, 1.0, 1, 55.0, 20.0},
  };
  s.targets.assign(pool.begin(), pool.begin() + targets);
  s.rng_seed = 3;
  return s;
}

struct Instance {
  Scenario scenario;
  CodeMatrix codes;
  SymbolSequence symbols;
  SignalModel model;
  DataCube cube;
};

inline Instance make_instance(const Scenario &sc, std::uint64_t seed, const SynthesisOptions &opt = {}) {
  Instance in;
  in.scenario = sc;
  in.codes = make_codes(sc.system, derive_seed(seed, {static_cast<std::uint64_t>(Stream::codes)}));
  in.symbols =
      generate_symbols(sc.system.pris_per_cpi, derive_seed(seed, {static_cast<std::uint64_t>(Stream::symbols)}));
  in.model = make_signal_model(sc, in.codes);
  in.cube = synthesize_cube(sc, in.model, in.symbols, seed, opt);
  return in;
}

} // namespace bimimo::test
