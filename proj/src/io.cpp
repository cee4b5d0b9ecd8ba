// SPDX-License-Identifier: Apache-2.0
#include "bimimo/io.hpp"

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace bimimo::io {

namespace {

std::ofstream open_out(const std::filesystem::path &path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, mode | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing: " + std::strerror(errno));
  return f;
}

void finish(std::ofstream &f, const std::filesystem::path &path) {
  f.flush();
  if (!f) throw std::runtime_error("write to " + path.string() + " failed: " + std::strerror(errno));
}

} // namespace

std::string format_number(double x, int precision) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, x);
  // Avoid "-0.000000" so that sign noise on zero never changes a file.
  if (buf[0] == '-') {
    bool zero = true;
    for (const char *p = buf + 1; *p; ++p)
      if (*p != '0' && *p != '.') zero = false;
    if (zero) return buf + 1;
  }
  return buf;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  auto f = open_out(path);
  f << text;
  finish(f, path);
}

void write_estimates_csv(const std::filesystem::path &path, const EstimateReport &rep) {
  auto f = open_out(path);
  f << "method,target,true_delay_bins,est_delay_bins,true_doppler_hz,est_doppler_hz,true_doa_deg,est_doa_deg,"
       "true_dod_deg,est_dod_deg,status\r\n";
  auto emit = [&](const char *name, const MethodOutcome &m) {
    if (!m.ran) return;
    const auto match = m.ok ? match_to_truth(m.targets, rep.truth) : std::vector<int>(rep.truth.size(), -1);
    for (std::size_t t = 0; t < rep.truth.size(); ++t) {
      const auto &tr = rep.truth[t];
      f << name << ',' << t << ',' << tr.delay_bins << ',';
      const TargetEstimate *e = match[t] >= 0 ? &m.targets[match[t]] : nullptr;
      f << (e ? std::to_string(e->delay_bins) : "") << ',' << format_number(tr.doppler_hz, 4) << ','
        << (e ? format_number(e->doppler_hz, 4) : "") << ',' << format_number(tr.doa_deg, 4) << ','
        << (e ? format_number(e->doa_deg, 4) : "") << ',' << format_number(tr.dod_deg, 4) << ','
        << (e ? format_number(e->dod_deg, 4) : "") << ',' << (m.ok ? (e ? "ok" : "missing") : "failed") << "\r\n";
    }
  };
  emit("vst", rep.vst);
  emit("baseline", rep.baseline);
  finish(f, path);
}

void write_rmse_csv(const std::filesystem::path &path, const RmseReport &rep) {
  auto f = open_out(path);
  f << "snr_db,trials,doa_vst_deg,dod_vst_deg,doa_m_deg,dod_m_deg,doa_vst_boot_sd,dod_vst_boot_sd,doa_m_boot_sd,"
       "dod_m_boot_sd,vst_failures,baseline_failures,seed\r\n";
  for (const auto &p : rep.points) {
    f << format_number(p.snr_db, 2) << ',' << p.trials << ',' << format_number(p.doa_vst.value) << ','
      << format_number(p.dod_vst.value) << ',' << format_number(p.doa_m.value) << ',' << format_number(p.dod_m.value)
      << ',' << format_number(p.doa_vst.bootstrap_sd) << ',' << format_number(p.dod_vst.bootstrap_sd) << ','
      << format_number(p.doa_m.bootstrap_sd) << ',' << format_number(p.dod_m.bootstrap_sd) << ',' << p.vst_failures
      << ',' << p.baseline_failures << ',' << rep.seed << "\r\n";
  }
  finish(f, path);
}

void write_xi1_grid_csv(const std::filesystem::path &path, const StageOne &s1) {
  auto f = open_out(path);
  f << "d,doppler_hz,xi1_db\r\n";
  for (std::size_t r = 0; r < s1.delays.size(); ++r)
    for (std::size_t c = 0; c < s1.dopplers.size(); ++c)
      f << s1.delays[r] << ',' << format_number(s1.dopplers[c], 4) << ','
        << format_number(s1.surface_db(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)), 4) << "\r\n";
  finish(f, path);
}

void write_xi2_grid_csv(const std::filesystem::path &path, const StageTwo &s2) {
  auto f = open_out(path);
  f << "theta,theta_bar,xi2_db\r\n";
  for (std::size_t r = 0; r < s2.doa_grid.size(); ++r)
    for (std::size_t c = 0; c < s2.dod_grid.size(); ++c)
      f << format_number(s2.doa_grid[r], 3) << ',' << format_number(s2.dod_grid[c], 3) << ','
        << format_number(s2.surface_db(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)), 4) << "\r\n";
  finish(f, path);
}

namespace {

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

std::filesystem::path sidecar(const std::filesystem::path &p) { return std::filesystem::path(p.string() + ".json"); }

} // namespace

void write_cube(const std::filesystem::path &path, const DataCube &cube) {
  auto f = open_out(path, std::ios::out | std::ios::binary);
  std::vector<std::uint32_t> buf;
  buf.reserve(cube.size() * 2);
  for (int n = 0; n < cube.pris(); ++n)
    for (int l = 0; l < cube.fast_time_bins(); ++l)
      for (int i = 0; i < cube.rx_count(); ++i) {
        const cplx v = cube.at(n, l, i);
        buf.push_back(to_le(std::bit_cast<std::uint32_t>(static_cast<float>(v.real()))));
        buf.push_back(to_le(std::bit_cast<std::uint32_t>(static_cast<float>(v.imag()))));
      }
  f.write(reinterpret_cast<const char *>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
  finish(f, path);

  nlohmann::ordered_json j;
  j["format"] = "complex64-le";
  j["order"] = {"pri", "fast_time", "rx"};
  j["shape"] = {cube.pris(), cube.fast_time_bins(), cube.rx_count()};
  j["seed"] = cube.seed;
  j["reference_power"] = cube.reference_power;
  j["noise_variance"] = cube.noise_variance;
  j["clutter_variance"] = cube.clutter_variance;
  j["truth"] = nlohmann::ordered_json::array();
  for (const auto &t : cube.truth)
    j["truth"].push_back(
        {{"delay_bins", t.delay_bins}, {"doppler_hz", t.doppler_hz}, {"doa_deg", t.doa_deg}, {"dod_deg", t.dod_deg}});
  write_text(sidecar(path), j.dump(2) + "\n");
}

DataCube read_cube(const std::filesystem::path &path) {
  std::ifstream js(sidecar(path));
  if (!js) throw std::runtime_error("cannot open " + sidecar(path).string());
  const auto j = nlohmann::json::parse(js);
  const auto shape = j.at("shape").get<std::vector<int>>();
  if (shape.size() != 3) throw std::runtime_error(sidecar(path).string() + ": shape must have 3 entries");
  DataCube cube(shape[0], shape[1], shape[2]);
  cube.seed = j.value("seed", std::uint64_t{0});
  cube.reference_power = j.value("reference_power", 0.0);
  cube.noise_variance = j.value("noise_variance", 0.0);
  cube.clutter_variance = j.value("clutter_variance", 0.0);
  for (const auto &t : j.value("truth", nlohmann::json::array()))
    cube.truth.push_back({t.at("delay_bins").get<int>(), t.at("doppler_hz").get<double>(), t.at("doa_deg").get<double>(),
                          t.at("dod_deg").get<double>()});

  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint32_t> buf(cube.size() * 2);
  f.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
  if (f.gcount() != static_cast<std::streamsize>(buf.size() * 4))
    throw std::runtime_error(path.string() + ": truncated cube file");
  std::size_t k = 0;
  for (int n = 0; n < cube.pris(); ++n)
    for (int l = 0; l < cube.fast_time_bins(); ++l)
      for (int i = 0; i < cube.rx_count(); ++i) {
        const float re = std::bit_cast<float>(to_le(buf[k++]));
        const float im = std::bit_cast<float>(to_le(buf[k++]));
        cube.at(n, l, i) = cplx(re, im);
      }
  return cube;
}

void write_codes_csv(const std::filesystem::path &path, const CodeMatrix &codes) {
  auto f = open_out(path);
  f << "chip";
  for (int m = 0; m < codes.tx_count(); ++m) f << ",tx" << m;
  f << "\r\n";
  for (int q = 0; q < codes.code_length(); ++q) {
    f << q;
    for (int m = 0; m < codes.tx_count(); ++m) f << ',' << static_cast<int>(codes.chips(q, m));
    f << "\r\n";
  }
  finish(f, path);
}

} // namespace bimimo::io
