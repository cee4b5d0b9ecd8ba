// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bimimo/types.hpp"

namespace bimimo {

enum class CodeKind { MSequenceShifts, Gold };

std::string_view to_string(CodeKind kind);
CodeKind code_kind_from_string(std::string_view s);

/// stationary: ground clutter, one whitened realization echoed every PRI (zero
///             Doppler, modulated by the transmit symbols like any echo).
/// white:      independent draws per PRI, i.e. clutter indistinguishable from AWGN.
enum class ClutterModel { stationary, white };
std::string_view to_string(ClutterModel m);
ClutterModel clutter_model_from_string(std::string_view s);

/// Raised for malformed scenario files and violated scenario invariants. The
/// message always starts with the offending field path, e.g.
/// "targets[1].r_rx_bins: ...".
class ScenarioError : public std::runtime_error {
public:
  ScenarioError(std::string field, const std::string &what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string &field() const noexcept { return field_; }

private:
  std::string field_;
};

inline constexpr double kDisabled = std::numeric_limits<double>::infinity();

/// Radar system constants. Ranges are in compressed range bins (one chip).
struct SystemConfig {
  double carrier_frequency_hz = 1.3e9;
  double chip_period_s = 1e-6;
  int code_length = 15;     // chips per PN code
  int fast_time_bins = 524; // L: compressed range bins per PRI
  int pris_per_cpi = 256;
  int tx_count = 5;
  int rx_count = 5;
  double tx_power_w = 1.0;
  double snr_db = 20.0;  // +inf disables noise
  double scr_db = -5.0;  // +inf disables clutter
  double baseline_bins = 95.0;
  CodeKind code_kind = CodeKind::MSequenceShifts;
  ClutterModel clutter_model = ClutterModel::stationary;

  double pulse_duration_s() const { return code_length * chip_period_s; }
  double pri_s() const { return fast_time_bins * chip_period_s; }
  double cpi_s() const { return pris_per_cpi * pri_s(); }
  double bandwidth_hz() const { return 1.0 / chip_period_s; }
  /// N_p; not necessarily an integer (L = 2 R_u need not be a multiple of the code length).
  double pulses_per_pri() const { return static_cast<double>(fast_time_bins) / code_length; }
  double unambiguous_range_bins() const { return fast_time_bins / 2.0; }

  bool operator==(const SystemConfig &) const = default;
};

/// Element positions in metres, one column per antenna (rows x, y, z).
struct ArrayGeometry {
  RMatrix coordinates = RMatrix(3, 0);

  int size() const { return static_cast<int>(coordinates.cols()); }
  bool operator==(const ArrayGeometry &o) const {
    return coordinates.rows() == o.coordinates.rows() && coordinates.cols() == o.coordinates.cols() &&
           coordinates == o.coordinates;
  }
};

struct TargetSpec {
  double r_tx_bins = 0.0;
  double r_rx_bins = 0.0;
  double doa_deg = 0.0;
  double dod_deg = 0.0;
  double bistatic_angle_deg = 0.0;
  double rcs_mean_m2 = 1.0;
  int swerling = 1;
  double velocity_mps = 0.0;
  double motion_angle_deg = 0.0;

  double r_bi_bins() const { return r_tx_bins + r_rx_bins; }
  bool operator==(const TargetSpec &) const = default;
};

struct Scenario {
  SystemConfig system;
  ArrayGeometry tx_array;
  ArrayGeometry rx_array;
  std::vector<TargetSpec> targets;
  std::uint64_t rng_seed = 0;

  bool operator==(const Scenario &) const = default;
};

struct DerivedParams {
  double wavelength_m = 0.0;
  double prf_hz = 0.0;
  double doppler_bin_hz = 0.0;    // PRF / N_s
  double range_bin_m = 0.0;       // c * T_c
  double unambiguous_doppler_hz = 0.0; // PRF / 2
};

struct TargetTruth {
  int delay_bins = 0;
  double doppler_hz = 0.0;
  bool doppler_ambiguous = false; // |F| > PRF/2, estimation will alias
};

/// Throws ScenarioError naming the first violated invariant.
void validate(const Scenario &s);

Scenario default_scenario();
DerivedParams derive_params(const SystemConfig &sys);
inline DerivedParams derive_params(const Scenario &s) { return derive_params(s.system); }
TargetTruth truth_from_geometry(const TargetSpec &t, const SystemConfig &sys);

Scenario scenario_from_json(std::string_view text);
std::string scenario_to_json(const Scenario &s);
Scenario load_scenario(const std::filesystem::path &path);
void save_scenario(const Scenario &s, const std::filesystem::path &path);

} // namespace bimimo
