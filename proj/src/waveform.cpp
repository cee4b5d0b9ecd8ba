// SPDX-License-Identifier: Apache-2.0
#include "bimimo/waveform.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bimimo/rng.hpp"

namespace bimimo {

namespace {

// Primitive polynomials by degree, as feedback tap masks (bit i = x^(i+1)).
// Two entries per degree where a distinct (reciprocal) polynomial exists; the
// pair feeds the Gold construction.
struct PolyEntry {
  int degree;
  std::array<std::uint32_t, 2> taps;
  int count;
};

constexpr PolyEntry kPolys[] = {
    {2, {0b11, 0}, 1},                               // x^2 + x + 1
    {3, {0b110, 0b101}, 2},                          // x^3 + x^2 + 1, x^3 + x + 1
    {4, {0b1001, 0b1100}, 2},                        // x^4 + x + 1, x^4 + x^3 + 1
    {5, {0b10100, 0b10010}, 2},                      // x^5 + x^3 + 1, x^5 + x^2 + 1
    {6, {0b100001, 0b110000}, 2},                    // x^6 + x + 1, x^6 + x^5 + 1
    {7, {0b1000001, 0b1100000}, 2},                  // x^7 + x + 1, x^7 + x^6 + 1
    {8, {0b10111000, 0b10001110}, 2},                // x^8 + x^6 + x^5 + x^4 + 1 and reciprocal
    {9, {0b100010000, 0b100001000}, 2},              // x^9 + x^5 + 1, x^9 + x^4 + 1
    {10, {0b1001000000, 0b1000000100}, 2},           // x^10 + x^7 + 1, x^10 + x^3 + 1
};

const PolyEntry &poly_for(int degree) {
  for (const auto &p : kPolys)
    if (p.degree == degree) return p;
  throw std::invalid_argument("no primitive polynomial for LFSR degree " + std::to_string(degree));
}

int degree_for_length(int nc) {
  for (int n = 2; n <= 10; ++n)
    if ((1 << n) - 1 == nc) return n;
  return -1;
}

std::vector<int> rotate(const std::vector<int> &v, int shift) {
  const int n = static_cast<int>(v.size());
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = v[((i + shift) % n + n) % n];
  return out;
}

} // namespace

std::vector<int> m_sequence(int degree, int polynomial_index) {
  const auto &p = poly_for(degree);
  if (polynomial_index < 0 || polynomial_index >= p.count)
    throw std::invalid_argument("degree " + std::to_string(degree) + " has " + std::to_string(p.count) +
                                " primitive polynomial(s)");
  const std::uint32_t taps = p.taps[polynomial_index];
  const int len = (1 << degree) - 1;
  std::uint32_t state = 1;
  std::vector<int> seq(len);
  for (int i = 0; i < len; ++i) {
    const std::uint32_t out = state & 1u;
    seq[i] = out ? -1 : 1;
    // Galois form: shift right, fold the tap mask in when a one falls out.
    state >>= 1;
    if (out) state ^= taps;
  }
  return seq;
}

CodeMatrix generate_pn_codes(int n_bar, int nc, CodeKind kind, std::uint64_t seed) {
  if (n_bar < 1) throw std::invalid_argument("tx count must be >= 1");
  const int degree = degree_for_length(nc);
  if (degree < 0)
    throw std::invalid_argument("code length " + std::to_string(nc) + " is not 2^n - 1 for a supported degree");
  if (n_bar > nc)
    throw std::invalid_argument("cannot draw " + std::to_string(n_bar) + " distinct codes of length " +
                                std::to_string(nc));

  CodeMatrix c;
  c.chips.resize(nc, n_bar);
  const int seed_shift = static_cast<int>(seed % static_cast<std::uint64_t>(nc));

  if (kind == CodeKind::MSequenceShifts) {
    const auto base = rotate(m_sequence(degree), seed_shift);
    const int step = 3 * (n_bar - 1) < nc ? 3 : 1;
    for (int m = 0; m < n_bar; ++m) {
      const auto col = rotate(base, step * m);
      for (int i = 0; i < nc; ++i) c.chips(i, m) = col[i];
    }
  } else {
    if (poly_for(degree).count < 2)
      throw std::invalid_argument("Gold codes need two distinct m-sequences; none for length " +
                                  std::to_string(nc));
    const auto u = m_sequence(degree, 0);
    const auto v = m_sequence(degree, 1);
    // Members u * T^s v. Zero-lag products between two members reduce to the
    // periodic autocorrelation of v, i.e. exactly -1 for distinct shifts.
    for (int m = 0; m < n_bar; ++m) {
      const auto vs = rotate(v, m + seed_shift);
      for (int i = 0; i < nc; ++i) c.chips(i, m) = u[i] * vs[i];
    }
  }
  c.extended = c.chips;
  c.composite = c.extended.rowwise().sum();
  return c;
}

CodeMatrix extend_codes(const CodeMatrix &codes, int fast_time_bins) {
  if (fast_time_bins < codes.code_length())
    throw std::invalid_argument("PRI shorter than the code");
  CodeMatrix out;
  out.chips = codes.chips;
  out.extended = RMatrix::Zero(fast_time_bins, codes.tx_count());
  out.extended.topRows(codes.code_length()) = codes.chips;
  out.composite = out.extended.rowwise().sum();
  return out;
}

CodeMatrix make_codes(const SystemConfig &sys, std::uint64_t seed) {
  return extend_codes(generate_pn_codes(sys.tx_count, sys.code_length, sys.code_kind, seed), sys.fast_time_bins);
}

SymbolSequence generate_symbols(int n_s, std::uint64_t seed) {
  if (n_s < 1) throw std::invalid_argument("symbol count must be >= 1");
  Engine eng(seed);
  std::bernoulli_distribution coin(0.5);
  SymbolSequence a;
  a.values.resize(n_s);
  for (int n = 0; n < n_s; ++n) a.values[n] = coin(eng) ? 1.0 : -1.0;
  return a;
}

RMatrix symbol_matrix(const SymbolSequence &a, const CodeMatrix &codes) {
  const int len = codes.fast_time_bins();
  const RMatrix cext_t = codes.extended.transpose();
  RMatrix m(codes.tx_count(), static_cast<Eigen::Index>(a.size()) * len);
  for (int n = 0; n < a.size(); ++n) m.middleCols(static_cast<Eigen::Index>(n) * len, len) = a.values[n] * cext_t;
  return m;
}

RMatrix normalized_gram(const CodeMatrix &codes) {
  return codes.chips.transpose() * codes.chips / static_cast<double>(codes.code_length());
}

double max_off_diagonal(const RMatrix &m) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j) worst = std::max(worst, std::abs(m(i, j)));
  return worst;
}

} // namespace bimimo
