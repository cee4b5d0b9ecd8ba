// SPDX-License-Identifier: Apache-2.0
#include "bimimo/estimation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bimimo/kernels.hpp"

namespace bimimo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double to_db(double x) { return 10.0 * std::log10(x); }

// log det of a Hermitian positive-definite matrix; NaN when the Cholesky fails.
double log_det_hpd(const CMatrix &m) {
  Eigen::LLT<CMatrix> llt(m);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  const auto &l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double d = l(i, i).real();
    if (!(d > 0)) return std::numeric_limits<double>::quiet_NaN();
    s += 2.0 * std::log(d);
  }
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

DataCube zero_doppler_notch(const DataCube &cube, const SymbolSequence &symbols) {
  if (symbols.size() != cube.pris()) throw std::invalid_argument("symbol count does not match the cube");
  CMatrix mean = CMatrix::Zero(cube.fast_time_bins(), cube.rx_count());
  for (int n = 0; n < cube.pris(); ++n) mean += symbols.values[n] * cube.pri(n);
  mean /= static_cast<double>(cube.pris());
  DataCube out = cube;
  for (int n = 0; n < cube.pris(); ++n) out.pri(n) -= symbols.values[n] * mean;
  return out;
}

Xi1Evaluator::Xi1Evaluator(const CodeMatrix &codes, const CMatrix &signal_basis, double chip_period_s)
    : u_(signal_basis), chips_(codes.chips), tc_(chip_period_s), nc_(codes.code_length()),
      bins_(codes.fast_time_bins()) {
  if (signal_basis.rows() != bins_) throw std::invalid_argument("basis rows must equal the PRI length");
  a_ = (chips_.transpose() * chips_).cast<cplx>();
  log_det_a_ = log_det_hpd(a_);
  if (std::isnan(log_det_a_)) throw std::invalid_argument("code matrix is not full column rank");
}

CMatrix Xi1Evaluator::phased_chips(double f_hz) const {
  CMatrix pc(nc_, chips_.cols());
  for (int q = 0; q < nc_; ++q) pc.row(q) = chips_.row(q).cast<cplx>() * cis(kTwoPi * f_hz * (q + 1) * tc_);
  return pc;
}

double Xi1Evaluator::cost_phased(int d, const CMatrix &pc) const {
  if (u_.cols() == 0) return 1.0;
  const CMatrix w = u_.middleRows(d, nc_).adjoint() * pc;
  const CMatrix den = a_ - w.adjoint() * w;
  const double ld = log_det_hpd(den);
  if (std::isnan(ld)) return kInf;
  return std::exp(log_det_a_ - ld);
}

double Xi1Evaluator::cost(int d, double f_hz) const {
  if (d < 0 || d > max_delay())
    throw RangeAmbiguityError("delay " + std::to_string(d) + " outside 0.." + std::to_string(max_delay()));
  return cost_phased(d, phased_chips(f_hz));
}

double xi1_cost(int d, double f_hz, const CodeMatrix &codes, const SubspaceBasis &basis, double chip_period_s) {
  return Xi1Evaluator(codes, basis.signal, chip_period_s).cost(d, f_hz);
}

std::vector<double> doppler_grid(const SignalModel &model) {
  const int n_s = model.pris_per_cpi;
  const double bin = model.doppler_bin_hz();
  std::vector<double> out(n_s);
  for (int j = 0; j < n_s; ++j) out[j] = (j - n_s / 2) * bin;
  return out;
}

std::vector<int> delay_grid(const SignalModel &model) {
  std::vector<int> out(model.fast_time_bins() - model.code_length() + 1);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

CMatrix despread_slow_time(const DataCube &cube, const CodeMatrix &codes, const SymbolSequence &symbols, int d) {
  const int nc = codes.code_length();
  const int n_bar = codes.tx_count();
  if (d < 0 || d + nc > cube.fast_time_bins()) throw RangeAmbiguityError("despread delay outside the PRI");
  if (symbols.size() != cube.pris()) throw std::invalid_argument("symbol count does not match the cube");
  const CMatrix c = codes.chips.cast<cplx>();
  CMatrix z(cube.pris(), static_cast<Eigen::Index>(cube.rx_count()) * n_bar);
  for (int n = 0; n < cube.pris(); ++n) {
    const auto x = cube.pri(n);
    // (N x nc) * (nc x n_bar)
    const CMatrix r = x.middleRows(d, nc).transpose() * c;
    for (int i = 0; i < cube.rx_count(); ++i)
      for (int m = 0; m < n_bar; ++m) z(n, i * n_bar + m) = symbols.values[n] * r(i, m);
  }
  return z;
}

RVector slow_time_spectrum(const CMatrix &z, const std::vector<double> &freqs_hz, double pri_s) {
  const Eigen::Index n_s = z.rows();
  RVector p(static_cast<Eigen::Index>(freqs_hz.size()));
  CVector e(n_s);
  for (std::size_t j = 0; j < freqs_hz.size(); ++j) {
    for (Eigen::Index n = 0; n < n_s; ++n) e[n] = cis(-kTwoPi * freqs_hz[j] * n * pri_s);
    p[j] = (z.transpose() * e).squaredNorm();
  }
  return p;
}

double wrap_doppler(double f_hz, double prf_hz) {
  double w = std::fmod(f_hz + prf_hz / 2.0, prf_hz);
  if (w <= 0) w += prf_hz;
  return w - prf_hz / 2.0;
}

double doppler_refine(const DataCube &cube, const SignalModel &model, const SymbolSequence &symbols, int d,
                      double f_coarse_hz, int zero_pad) {
  if (zero_pad < 1) throw std::invalid_argument("zero_pad must be >= 1");
  const CMatrix z = despread_slow_time(cube, model.codes, symbols, d);
  const double step = model.doppler_bin_hz() / zero_pad;
  std::vector<double> f(2 * zero_pad + 1);
  for (int s = -zero_pad; s <= zero_pad; ++s) f[s + zero_pad] = f_coarse_hz + s * step;
  const RVector p = slow_time_spectrum(z, f, model.pri_s);
  Eigen::Index j = 0;
  p.maxCoeff(&j);
  double est = f[j];
  if (j > 0 && j + 1 < p.size() && p[j - 1] > 0 && p[j + 1] > 0 && p[j] > 0) {
    const double ym = std::log(p[j - 1]), y0 = std::log(p[j]), yp = std::log(p[j + 1]);
    const double den = ym - 2.0 * y0 + yp;
    if (den < 0) est += 0.5 * (ym - yp) / den * step;
  }
  return wrap_doppler(est, model.prf_hz());
}

namespace {

struct Candidate {
  int d;
  double rho_db;
};

// Greedy non-maximum suppression: highest first, lowest index on ties, no two
// picks closer than `radius`.
std::vector<Candidate> range_peaks(const RVector &rho, int radius) {
  std::vector<int> order(rho.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rho[a] > rho[b]; });
  std::vector<Candidate> out;
  for (int d : order) {
    bool clear = true;
    for (const auto &c : out)
      if (std::abs(c.d - d) < radius) {
        clear = false;
        break;
      }
    if (clear) out.push_back({d, rho[d]});
  }
  return out;
}

// Local maxima of a circular spectrum at least `rel` of the global maximum,
// strongest first, none within `radius` bins of a stronger pick.
std::vector<int> spectrum_peaks(const RVector &p, double rel, int radius) {
  const int n = static_cast<int>(p.size());
  const double top = p.maxCoeff();
  if (!(top > 0)) return {};
  std::vector<int> cand;
  for (int j = 0; j < n; ++j) {
    const double l = p[(j + n - 1) % n], r = p[(j + 1) % n];
    if (p[j] >= l && p[j] >= r && p[j] >= rel * top) cand.push_back(j);
  }
  std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) { return p[a] > p[b]; });
  std::vector<int> out;
  for (int j : cand) {
    bool clear = true;
    for (int k : out) {
      const int dist = std::min(std::abs(j - k), n - std::abs(j - k));
      if (dist < radius) {
        clear = false;
        break;
      }
    }
    if (clear) out.push_back(j);
  }
  return out;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

} // namespace

StageOne range_doppler_search(const DataCube &cube, const SignalModel &model, const SymbolSequence &symbols, int k,
                              const EstimatorConfig &cfg) {
  if (k < 1 && !cfg.estimate_dim) throw std::invalid_argument("range_doppler_search needs k >= 1");
  if (cube.fast_time_bins() != model.fast_time_bins()) throw std::invalid_argument("cube and model disagree on L");

  StageOne out;
  const CMatrix r = temporal_covariance(cube);
  if (cfg.estimate_dim) {
    out.basis = subspace_split(r, std::min<int>(cfg.max_dim, static_cast<int>(r.rows())));
    k = estimate_signal_dim(out.basis.eigenvalues, cfg.max_dim);
    out.signal_dim = cfg.signal_dim > 0 ? cfg.signal_dim : k;
    out.basis.signal = out.basis.signal.leftCols(out.signal_dim).eval();
  } else {
    out.signal_dim = cfg.signal_dim > 0 ? cfg.signal_dim : k;
    out.basis = subspace_split(r, out.signal_dim);
  }

  const Xi1Evaluator eval(model.codes, out.basis.signal, model.chip_period_s);
  out.delays = delay_grid(model);
  out.dopplers = doppler_grid(model);
  const RMatrix surface = kernels::xi1_surface(eval, out.delays, out.dopplers);
  out.surface_db = surface.unaryExpr([](double x) { return to_db(x); });
  out.range_profile_db = out.surface_db.rowwise().maxCoeff();

  const int nc = model.code_length();
  const auto primaries = range_peaks(out.range_profile_db, nc);
  const double gate = median(std::vector<double>(out.range_profile_db.data(),
                                                 out.range_profile_db.data() + out.range_profile_db.size())) +
                      cfg.detection_gate_db;

  auto make_peak = [&](const Candidate &c, int j, bool secondary) {
    RangeDopplerPeak p;
    p.delay_bins = out.delays[c.d];
    p.doppler_coarse_hz = out.dopplers[j];
    p.xi1_db = c.rho_db;
    Eigen::Index jx = 0;
    out.surface_db.row(c.d).maxCoeff(&jx);
    p.xi1_doppler_hz = out.dopplers[jx];
    p.secondary = secondary;
    return p;
  };
  auto spectrum_at = [&](int d) {
    return slow_time_spectrum(despread_slow_time(cube, model.codes, symbols, out.delays[d]), out.dopplers,
                              model.pri_s);
  };

  std::vector<RangeDopplerPeak> picked;
  std::vector<std::pair<Candidate, RVector>> genuine;
  for (const auto &c : primaries) {
    if (static_cast<int>(picked.size()) == k || c.rho_db < gate) break;
    RVector p = spectrum_at(c.d);
    Eigen::Index j = 0;
    p.maxCoeff(&j);
    picked.push_back(make_peak(c, static_cast<int>(j), false));
    genuine.emplace_back(c, std::move(p));
  }
  const double rel = std::pow(10.0, cfg.secondary_doppler_db / 10.0);
  for (const auto &[c, p] : genuine) {
    if (static_cast<int>(picked.size()) >= k) break;
    const auto lines = spectrum_peaks(p, rel, cfg.doppler_nms_bins);
    for (std::size_t s = 1; s < lines.size() && static_cast<int>(picked.size()) < k; ++s)
      picked.push_back(make_peak(c, lines[s], true));
  }
  for (const auto &c : primaries) {
    if (static_cast<int>(picked.size()) >= k) break;
    if (c.rho_db >= gate) continue;
    const RVector p = spectrum_at(c.d);
    Eigen::Index j = 0;
    p.maxCoeff(&j);
    picked.push_back(make_peak(c, static_cast<int>(j), false));
  }
  if (static_cast<int>(picked.size()) < k) {
    std::ostringstream msg;
    msg << "range/Doppler search found " << picked.size() << " peak(s), need " << k << ":";
    for (const auto &p : picked) msg << " (" << p.delay_bins << ", " << p.doppler_coarse_hz << " Hz)";
    throw PeakCountError(msg.str());
  }

  for (auto &p : picked)
    p.doppler_hz = cfg.refine_doppler
                       ? doppler_refine(cube, model, symbols, p.delay_bins, p.doppler_coarse_hz, cfg.doppler_zero_pad)
                       : p.doppler_coarse_hz;
  std::stable_sort(picked.begin(), picked.end(), [](const auto &a, const auto &b) {
    return a.delay_bins != b.delay_bins ? a.delay_bins < b.delay_bins : a.doppler_hz < b.doppler_hz;
  });
  out.peaks = std::move(picked);
  return out;
}

Xi2Evaluator::Xi2Evaluator(const SignalModel &model, const BlockerSet &blockers, const CMatrix &support_basis)
    : model_(&model) {
  const int n_rx = model.rx_count();
  const int n_bar = model.tx_count();
  const auto &support = blockers.support();
  const auto w = static_cast<Eigen::Index>(support.size());
  if (support_basis.rows() != static_cast<Eigen::Index>(n_bar) * n_rx * w)
    throw std::invalid_argument("support basis rows do not match tx_count * rx_count * |support|");
  if (blockers.tx_count() != n_bar) throw std::invalid_argument("blockers and model disagree on tx_count");

  for (const auto &e : blockers.estimates()) {
    const CVector t = temporal_signature(model.codes, e.delay_bins, e.doppler_hz, model.chip_period_s);
    CVector tw(w);
    for (Eigen::Index r = 0; r < w; ++r) tw[r] = t[support[r]];
    std::vector<CMatrix> gk(n_bar);
    double energy = 0.0;
    for (int m = 0; m < n_bar; ++m) {
      const CMatrix &q = blockers.compact_basis(m);
      CVector psi = tw;
      if (q.cols() > 0) psi -= q * (q.adjoint() * tw);
      energy += psi.squaredNorm();
      gk[m].resize(support_basis.cols(), n_rx);
      for (int i = 0; i < n_rx; ++i)
        gk[m].col(i) = support_basis.middleRows((static_cast<Eigen::Index>(m) * n_rx + i) * w, w).adjoint() * psi;
    }
    g_.push_back(std::move(gk));
    phi_energy_.push_back(n_rx * energy);
  }
}

CVector Xi2Evaluator::rx_manifold(double doa_deg) const {
  return spatial_manifold(model_->rx_array, doa_deg, 0.0, model_->wavelength_m, ArraySide::rx);
}

CVector Xi2Evaluator::tx_manifold(double dod_deg) const {
  return spatial_manifold(model_->tx_array, dod_deg, 0.0, model_->wavelength_m, ArraySide::tx);
}

CMatrix Xi2Evaluator::rx_combine(int k, const CVector &s_rx) const {
  const auto &gk = g_[k];
  CMatrix h(gk.empty() ? 0 : gk[0].rows(), static_cast<Eigen::Index>(gk.size()));
  for (std::size_t m = 0; m < gk.size(); ++m) h.col(m) = gk[m] * s_rx;
  return h;
}

double Xi2Evaluator::contribution_from(int k, const CMatrix &h, const CVector &s_tx) const {
  const double num = phi_energy_[k];
  if (!(num > 0)) return -kInf;
  const double den = num - (h * s_tx.conjugate()).squaredNorm();
  return den > 0 ? num / den : kInf;
}

Xi2Evaluator::Terms Xi2Evaluator::terms(int k, double doa_deg, double dod_deg) const {
  const CMatrix h = rx_combine(k, rx_manifold(doa_deg));
  Terms t;
  t.numerator = phi_energy_[k];
  t.denominator = std::max(0.0, t.numerator - (h * tx_manifold(dod_deg).conjugate()).squaredNorm());
  return t;
}

double Xi2Evaluator::contribution(int k, double doa_deg, double dod_deg) const {
  return contribution_from(k, rx_combine(k, rx_manifold(doa_deg)), tx_manifold(dod_deg));
}

double Xi2Evaluator::cost(double doa_deg, double dod_deg) const {
  const CVector s_rx = rx_manifold(doa_deg);
  const CVector s_tx = tx_manifold(dod_deg);
  double sum = 0.0;
  for (int k = 0; k < contexts(); ++k) {
    const double c = contribution_from(k, rx_combine(k, s_rx), s_tx);
    if (c > -kInf) sum += c;
  }
  return sum;
}

CMatrix gather_support_rows(const CMatrix &full_basis, const VirtualSnapshots &v) {
  const auto w = static_cast<Eigen::Index>(v.support.size());
  CMatrix out(static_cast<Eigen::Index>(v.tx_count) * v.rx_count * w, full_basis.cols());
  Eigen::Index r = 0;
  for (int m = 0; m < v.tx_count; ++m)
    for (int i = 0; i < v.rx_count; ++i)
      for (int l : v.support) out.row(r++) = full_basis.row(v.row(m, i, l));
  return out;
}

std::vector<double> angle_grid(double lo_deg, double hi_deg, double step_deg) {
  if (!(step_deg > 0) || !(hi_deg >= lo_deg)) throw std::invalid_argument("invalid angle grid");
  const auto n = static_cast<int>(std::floor((hi_deg - lo_deg) / step_deg + 1e-9)) + 1;
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = lo_deg + j * step_deg;
  return out;
}

namespace {

// Argmax of a matrix, first (row-major) occurrence on ties; NaN never wins.
std::pair<Eigen::Index, Eigen::Index> argmax(const RMatrix &m) {
  Eigen::Index br = 0, bc = 0;
  double best = -kInf;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (m(r, c) > best) {
        best = m(r, c);
        br = r;
        bc = c;
      }
  return {br, bc};
}

std::vector<double> local_grid(double centre, double span, double step, double lo, double hi) {
  const int half = static_cast<int>(std::lround(span / step));
  std::vector<double> out;
  for (int j = -half; j <= half; ++j) {
    const double a = centre + j * step;
    if (a >= lo - 1e-12 && a <= hi + 1e-12) out.push_back(a);
  }
  return out;
}

} // namespace

StageTwo doa_dod_search(const Xi2Evaluator &eval, const EstimatorConfig &cfg) {
  StageTwo out;
  out.doa_grid = angle_grid(cfg.angle_min_deg, cfg.angle_max_deg, cfg.angle_coarse_step_deg);
  out.dod_grid = out.doa_grid;
  const int k_total = eval.contexts();
  if (k_total == 0) throw PeakCountError("angle search needs at least one delay/Doppler context");

  const auto surfaces = kernels::xi2_surfaces(eval, out.doa_grid, out.dod_grid);
  RMatrix total = RMatrix::Zero(static_cast<Eigen::Index>(out.doa_grid.size()),
                                static_cast<Eigen::Index>(out.dod_grid.size()));
  for (const auto &s : surfaces) total += s.unaryExpr([](double x) { return x > -kInf ? x : 0.0; });
  out.surface_db = total.unaryExpr([](double x) { return to_db(x); });

  for (int k = 0; k < k_total; ++k) {
    const auto [rc, cc] = argmax(surfaces[k]);
    if (!(surfaces[k](rc, cc) > -kInf)) throw PeakCountError("context " + std::to_string(k) + " has no finite peak");
    const auto fine_doa = local_grid(out.doa_grid[rc], cfg.angle_refine_span_deg, cfg.angle_refine_step_deg,
                                     cfg.angle_min_deg, cfg.angle_max_deg);
    const auto fine_dod = local_grid(out.dod_grid[cc], cfg.angle_refine_span_deg, cfg.angle_refine_step_deg,
                                     cfg.angle_min_deg, cfg.angle_max_deg);
    const RMatrix fine = kernels::xi2_context_surface(eval, k, fine_doa, fine_dod);
    const auto [rf, cf] = argmax(fine);
    out.angles.push_back({fine_doa[rf], fine_dod[cf], k, to_db(fine(rf, cf))});
  }
  return out;
}

StageTwo angle_stage(const DataCube &cube, const SignalModel &model, const std::vector<DelayDoppler> &estimates,
                     const EstimatorConfig &cfg) {
  const BlockerSet blockers = build_blockers(model.codes, estimates, model.chip_period_s);
  const VirtualSnapshots v = apply_virtual_extension(cube, blockers);
  const int dim = static_cast<int>(estimates.size());
  SubspaceBasis basis;
  CMatrix support_basis;
  if (cfg.range_gate_virtual) {
    basis = subspace_from_snapshots(v.gated(), dim);
    support_basis = basis.signal;
  } else {
    basis = subspace_from_gram(v.data, v.gram(), dim);
    support_basis = gather_support_rows(basis.signal, v);
  }
  const Xi2Evaluator eval(model, blockers, support_basis);
  StageTwo out = doa_dod_search(eval, cfg);
  out.basis = std::move(basis);
  return out;
}

VstResult vst_estimate(const DataCube &cube, const SignalModel &model, const SymbolSequence &symbols, int k,
                       const EstimatorConfig &cfg) {
  VstResult res;
  auto t0 = std::chrono::steady_clock::now();
  res.stage1 = range_doppler_search(cube, model, symbols, k, cfg);
  for (const auto &p : res.stage1.peaks) res.delay_doppler.push_back({p.delay_bins, p.doppler_hz});
  res.seconds_stage1 = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  res.stage2 = angle_stage(cube, model, res.delay_doppler, cfg);
  res.seconds_stage2 = seconds_since(t0);
  return res;
}

} // namespace bimimo
