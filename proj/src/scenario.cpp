// SPDX-License-Identifier: Apache-2.0
#include "bimimo/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bimimo {

using nlohmann::json;

std::string_view to_string(CodeKind kind) {
  return kind == CodeKind::Gold ? "gold" : "mseq";
}

CodeKind code_kind_from_string(std::string_view s) {
  if (s == "mseq" || s == "m-sequence-shifts") return CodeKind::MSequenceShifts;
  if (s == "gold") return CodeKind::Gold;
  throw ScenarioError("system.code_kind", "unknown code kind '" + std::string(s) + "'");
}

std::string_view to_string(ClutterModel m) {
  return m == ClutterModel::white ? "white" : "stationary";
}

ClutterModel clutter_model_from_string(std::string_view s) {
  if (s == "stationary") return ClutterModel::stationary;
  if (s == "white") return ClutterModel::white;
  throw ScenarioError("system.clutter_model", "unknown clutter model '" + std::string(s) + "'");
}

namespace {

void require(bool ok, const std::string &field, const std::string &what) {
  if (!ok) throw ScenarioError(field, what);
}

void validate_array(const ArrayGeometry &g, int expected, const std::string &field) {
  require(g.coordinates.rows() == 3, field, "coordinates must have 3 rows (x, y, z)");
  require(g.size() == expected, field,
          "element count " + std::to_string(g.size()) + " does not match " + std::to_string(expected));
  require(g.coordinates.allFinite(), field, "non-finite element position");
}

} // namespace

void validate(const Scenario &s) {
  const auto &sys = s.system;
  require(std::isfinite(sys.carrier_frequency_hz) && sys.carrier_frequency_hz > 0, "system.carrier_frequency_hz",
          "must be finite and > 0");
  require(std::isfinite(sys.chip_period_s) && sys.chip_period_s > 0, "system.chip_period_s", "must be finite and > 0");
  require(sys.code_length >= 1, "system.code_length", "must be >= 1");
  require(sys.fast_time_bins >= sys.code_length, "system.fast_time_bins", "must be >= code_length");
  require(sys.pris_per_cpi >= 1, "system.pris_per_cpi", "must be >= 1");
  require(sys.tx_count >= 1, "system.tx_count", "must be >= 1");
  require(sys.rx_count >= 1, "system.rx_count", "must be >= 1");
  require(std::isfinite(sys.tx_power_w) && sys.tx_power_w > 0, "system.tx_power_w", "must be finite and > 0");
  // +inf is the documented "disabled" value; NaN and -inf are not.
  require(!std::isnan(sys.snr_db) && sys.snr_db != -kDisabled, "system.snr_db", "must be finite or +inf");
  require(!std::isnan(sys.scr_db) && sys.scr_db != -kDisabled, "system.scr_db", "must be finite or +inf");
  require(std::isfinite(sys.baseline_bins) && sys.baseline_bins >= 0, "system.baseline_bins",
          "must be finite and >= 0");

  validate_array(s.tx_array, sys.tx_count, "tx_array");
  validate_array(s.rx_array, sys.rx_count, "rx_array");

  for (std::size_t k = 0; k < s.targets.size(); ++k) {
    const auto &t = s.targets[k];
    const std::string p = "targets[" + std::to_string(k) + "]";
    require(std::isfinite(t.r_tx_bins) && t.r_tx_bins > 0, p + ".r_tx_bins", "must be finite and > 0");
    require(std::isfinite(t.r_rx_bins) && t.r_rx_bins > 0, p + ".r_rx_bins", "must be finite and > 0");
    require(t.r_bi_bins() > sys.baseline_bins, p + ".r_rx_bins",
            "bistatic range " + std::to_string(t.r_bi_bins()) + " must exceed the baseline " +
                std::to_string(sys.baseline_bins) + " (target on the baseline)");
    require(std::abs(t.r_tx_bins - t.r_rx_bins) < sys.baseline_bins, p + ".r_tx_bins",
            "|r_tx - r_rx| must be below the baseline (triangle inequality)");
    require(std::isfinite(t.doa_deg), p + ".doa_deg", "must be finite");
    require(std::isfinite(t.dod_deg), p + ".dod_deg", "must be finite");
    require(std::isfinite(t.bistatic_angle_deg), p + ".bistatic_angle_deg", "must be finite");
    require(std::isfinite(t.rcs_mean_m2) && t.rcs_mean_m2 > 0, p + ".rcs_mean_m2", "must be finite and > 0");
    require(t.swerling >= 1 && t.swerling <= 3, p + ".swerling", "must be 1, 2 or 3");
    require(std::isfinite(t.velocity_mps), p + ".velocity_mps", "must be finite");
    require(std::isfinite(t.motion_angle_deg), p + ".motion_angle_deg", "must be finite");
    const int d = truth_from_geometry(t, sys).delay_bins;
    require(d + sys.code_length <= sys.fast_time_bins, p + ".r_rx_bins",
            "echo at delay " + std::to_string(d) + " does not fit inside the PRI listening window");
  }
}

Scenario default_scenario() {
  Scenario s;
  // T_c is not stated numerically by the source tables; 1 us keeps every
  // listed Doppler inside +-PRF/2.
  s.system = SystemConfig{};

  s.tx_array.coordinates.resize(3, 5);
  s.tx_array.coordinates << 0.28, 0.09, -0.22, -0.22, 0.09, //
      0.0, 0.26, 0.16, -0.16, -0.26,                        //
      0.0, 0.0, 0.0, 0.0, 0.0;
  s.rx_array.coordinates.resize(3, 5);
  s.rx_array.coordinates << 0.092, 0.028, -0.074, -0.074, 0.028, //
      0.0, 0.087, 0.054, -0.054, -0.087,                         //
      0.0, 0.0, 0.0, 0.0, 0.0;

  s.targets = {
      TargetSpec{51, 101, 150.0, 81.20, 68.80, 1.0, 1, -60.0, 0.0},
      TargetSpec{85, 104, 130.0, 70.83, 59.17, 1.5, 2, 20.0, 0.0},
      TargetSpec{126, 102, 100.0, 52.31, 47.69, 2.0, 3, 60.0, 0.0},
  };
  s.rng_seed = 0;
  return s;
}

DerivedParams derive_params(const SystemConfig &sys) {
  if (!(sys.carrier_frequency_hz > 0) || !std::isfinite(sys.carrier_frequency_hz))
    throw ScenarioError("system.carrier_frequency_hz", "must be finite and > 0");
  if (!(sys.chip_period_s > 0)) throw ScenarioError("system.chip_period_s", "must be > 0");
  DerivedParams d;
  d.wavelength_m = kSpeedOfLight / sys.carrier_frequency_hz;
  d.prf_hz = 1.0 / sys.pri_s();
  d.doppler_bin_hz = d.prf_hz / sys.pris_per_cpi;
  d.range_bin_m = kSpeedOfLight * sys.chip_period_s;
  d.unambiguous_doppler_hz = d.prf_hz / 2.0;
  return d;
}

TargetTruth truth_from_geometry(const TargetSpec &t, const SystemConfig &sys) {
  const double range_bin_m = kSpeedOfLight * sys.chip_period_s;
  const double tau = (t.r_tx_bins + t.r_rx_bins) * range_bin_m / kSpeedOfLight;
  TargetTruth out;
  // The 1e-9 slack keeps integer bin ranges from flooring one bin low after the
  // metres round trip.
  out.delay_bins = static_cast<int>(std::floor(tau / sys.chip_period_s + 1e-9));
  const double lambda = kSpeedOfLight / sys.carrier_frequency_hz;
  out.doppler_hz = 2.0 * t.velocity_mps / lambda * std::cos(deg2rad(t.motion_angle_deg)) *
                   std::cos(deg2rad(t.bistatic_angle_deg) / 2.0);
  out.doppler_ambiguous = std::abs(out.doppler_hz) > 0.5 / sys.pri_s();
  return out;
}

// ---------------------------------------------------------------- JSON

namespace {

json db_to_json(double v) { return std::isinf(v) && v > 0 ? json(nullptr) : json(v); }

double db_from_json(const json &j, const std::string &field) {
  if (j.is_null()) return kDisabled;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "off") return kDisabled;
    throw ScenarioError(field, "expected a number, null or \"inf\"");
  }
  if (!j.is_number()) throw ScenarioError(field, "expected a number");
  return j.get<double>();
}

template <class T> T get_field(const json &obj, const char *key, const std::string &path, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ScenarioError(path + "." + key, e.what());
  }
}

template <class T> T get_required(const json &obj, const char *key, const std::string &path) {
  if (!obj.contains(key)) throw ScenarioError(path + "." + key, "missing required field");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception &e) {
    throw ScenarioError(path + "." + key, e.what());
  }
}

json array_to_json(const ArrayGeometry &g) {
  json j;
  const char *axes[] = {"x", "y", "z"};
  for (int r = 0; r < 3; ++r) {
    std::vector<double> row(g.coordinates.cols());
    for (int c = 0; c < g.coordinates.cols(); ++c) row[c] = g.coordinates(r, c);
    j[axes[r]] = row;
  }
  return j;
}

ArrayGeometry array_from_json(const json &j, const std::string &path) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object with x, y, z arrays");
  const auto x = get_required<std::vector<double>>(j, "x", path);
  const auto y = get_required<std::vector<double>>(j, "y", path);
  const auto z = get_field<std::vector<double>>(j, "z", path, std::vector<double>(x.size(), 0.0));
  if (y.size() != x.size() || z.size() != x.size())
    throw ScenarioError(path, "x, y and z must have the same length");
  ArrayGeometry g;
  g.coordinates.resize(3, static_cast<Eigen::Index>(x.size()));
  for (std::size_t c = 0; c < x.size(); ++c) {
    g.coordinates(0, c) = x[c];
    g.coordinates(1, c) = y[c];
    g.coordinates(2, c) = z[c];
  }
  return g;
}

} // namespace

Scenario scenario_from_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ScenarioError("<document>", std::string("parse error: ") + e.what());
  }
  if (!root.is_object()) throw ScenarioError("<document>", "expected a JSON object");

  Scenario s;
  s.targets.clear();
  if (root.contains("system")) {
    const json &j = root.at("system");
    const std::string p = "system";
    if (!j.is_object()) throw ScenarioError(p, "expected an object");
    auto &sys = s.system;
    sys.carrier_frequency_hz = get_field(j, "carrier_frequency_hz", p, sys.carrier_frequency_hz);
    sys.chip_period_s = get_field(j, "chip_period_s", p, sys.chip_period_s);
    sys.code_length = get_field(j, "code_length", p, sys.code_length);
    const int n_len = int(j.contains("fast_time_bins")) + int(j.contains("pulses_per_pri")) +
                      int(j.contains("unambiguous_range_bins"));
    if (n_len > 1)
      throw ScenarioError(p + ".fast_time_bins",
                          "give only one of fast_time_bins, pulses_per_pri, unambiguous_range_bins");
    if (j.contains("fast_time_bins")) sys.fast_time_bins = get_required<int>(j, "fast_time_bins", p);
    if (j.contains("pulses_per_pri"))
      sys.fast_time_bins = get_required<int>(j, "pulses_per_pri", p) * sys.code_length;
    if (j.contains("unambiguous_range_bins"))
      sys.fast_time_bins = 2 * get_required<int>(j, "unambiguous_range_bins", p);
    sys.pris_per_cpi = get_field(j, "pris_per_cpi", p, sys.pris_per_cpi);
    sys.tx_power_w = get_field(j, "tx_power_w", p, sys.tx_power_w);
    if (j.contains("snr_db")) sys.snr_db = db_from_json(j.at("snr_db"), p + ".snr_db");
    if (j.contains("scr_db")) sys.scr_db = db_from_json(j.at("scr_db"), p + ".scr_db");
    sys.baseline_bins = get_field(j, "baseline_bins", p, sys.baseline_bins);
    if (j.contains("code_kind")) sys.code_kind = code_kind_from_string(get_required<std::string>(j, "code_kind", p));
    if (j.contains("clutter_model"))
      sys.clutter_model = clutter_model_from_string(get_required<std::string>(j, "clutter_model", p));
    sys.tx_count = get_field(j, "tx_count", p, -1);
    sys.rx_count = get_field(j, "rx_count", p, -1);
  } else {
    s.system.tx_count = -1;
    s.system.rx_count = -1;
  }

  if (!root.contains("tx_array")) throw ScenarioError("tx_array", "missing required field");
  if (!root.contains("rx_array")) throw ScenarioError("rx_array", "missing required field");
  s.tx_array = array_from_json(root.at("tx_array"), "tx_array");
  s.rx_array = array_from_json(root.at("rx_array"), "rx_array");
  // Counts default to the array sizes.
  if (s.system.tx_count < 0) s.system.tx_count = s.tx_array.size();
  if (s.system.rx_count < 0) s.system.rx_count = s.rx_array.size();

  if (root.contains("targets")) {
    const json &ts = root.at("targets");
    if (!ts.is_array()) throw ScenarioError("targets", "expected an array");
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const std::string p = "targets[" + std::to_string(k) + "]";
      const json &j = ts[k];
      if (!j.is_object()) throw ScenarioError(p, "expected an object");
      TargetSpec t;
      t.r_tx_bins = get_required<double>(j, "r_tx_bins", p);
      t.r_rx_bins = get_required<double>(j, "r_rx_bins", p);
      t.doa_deg = get_required<double>(j, "doa_deg", p);
      t.dod_deg = get_required<double>(j, "dod_deg", p);
      t.bistatic_angle_deg = get_required<double>(j, "bistatic_angle_deg", p);
      t.rcs_mean_m2 = get_field(j, "rcs_mean_m2", p, 1.0);
      t.swerling = get_field(j, "swerling", p, 1);
      t.velocity_mps = get_field(j, "velocity_mps", p, 0.0);
      t.motion_angle_deg = get_field(j, "motion_angle_deg", p, 0.0);
      s.targets.push_back(t);
    }
  }
  s.rng_seed = get_field<std::uint64_t>(root, "rng_seed", "", 0);
  validate(s);
  return s;
}

std::string scenario_to_json(const Scenario &s) {
  json root;
  const auto &sys = s.system;
  root["system"] = {
      {"carrier_frequency_hz", sys.carrier_frequency_hz},
      {"chip_period_s", sys.chip_period_s},
      {"code_length", sys.code_length},
      {"fast_time_bins", sys.fast_time_bins},
      {"pris_per_cpi", sys.pris_per_cpi},
      {"tx_count", sys.tx_count},
      {"rx_count", sys.rx_count},
      {"tx_power_w", sys.tx_power_w},
      {"snr_db", db_to_json(sys.snr_db)},
      {"scr_db", db_to_json(sys.scr_db)},
      {"baseline_bins", sys.baseline_bins},
      {"code_kind", std::string(to_string(sys.code_kind))},
      {"clutter_model", std::string(to_string(sys.clutter_model))},
  };
  root["tx_array"] = array_to_json(s.tx_array);
  root["rx_array"] = array_to_json(s.rx_array);
  root["targets"] = json::array();
  for (const auto &t : s.targets) {
    root["targets"].push_back({
        {"r_tx_bins", t.r_tx_bins},
        {"r_rx_bins", t.r_rx_bins},
        {"doa_deg", t.doa_deg},
        {"dod_deg", t.dod_deg},
        {"bistatic_angle_deg", t.bistatic_angle_deg},
        {"rcs_mean_m2", t.rcs_mean_m2},
        {"swerling", t.swerling},
        {"velocity_mps", t.velocity_mps},
        {"motion_angle_deg", t.motion_angle_deg},
    });
  }
  root["rng_seed"] = s.rng_seed;
  return root.dump(2);
}

Scenario load_scenario(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("<file>", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

void save_scenario(const Scenario &s, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << scenario_to_json(s) << '\n';
}

} // namespace bimimo
