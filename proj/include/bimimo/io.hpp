// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "bimimo/channel.hpp"
#include "bimimo/estimation.hpp"
#include "bimimo/harness.hpp"
#include "bimimo/waveform.hpp"

namespace bimimo::io {

/// Fixed-precision text for CSV cells; "inf", "-inf" and "nan" spelled out.
std::string format_number(double x, int precision = 6);

/// One row per (method, truth target) with true and estimated d, F, theta,
/// theta_bar. Estimates are matched to truths; missing ones are left empty.
void write_estimates_csv(const std::filesystem::path &path, const EstimateReport &rep);

void write_rmse_csv(const std::filesystem::path &path, const RmseReport &rep);

/// Columns d, doppler_hz, xi1_db.
void write_xi1_grid_csv(const std::filesystem::path &path, const StageOne &s1);

/// Columns theta, theta_bar, xi2_db.
void write_xi2_grid_csv(const std::filesystem::path &path, const StageTwo &s2);

/// Raw cube as little-endian complex64 in (n, l, i) row-major order, plus
/// <path>.json describing shape, order, seed and truth.
void write_cube(const std::filesystem::path &path, const DataCube &cube);
DataCube read_cube(const std::filesystem::path &path);

/// Columns chip, tx0, tx1, ...
void write_codes_csv(const std::filesystem::path &path, const CodeMatrix &codes);

void write_text(const std::filesystem::path &path, const std::string &text);

} // namespace bimimo::io
