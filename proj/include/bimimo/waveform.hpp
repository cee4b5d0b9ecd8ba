// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "bimimo/scenario.hpp"
#include "bimimo/types.hpp"

namespace bimimo {

/// PN codes of all Tx antennas.
///   chips     : code_length x tx_count, entries +-1
///   extended  : fast_time_bins x tx_count, chips followed by zero rows
///   composite : extended * 1, the sum of all antennas' codes
struct CodeMatrix {
  RMatrix chips;
  RMatrix extended;
  RVector composite;

  int code_length() const { return static_cast<int>(chips.rows()); }
  int tx_count() const { return static_cast<int>(chips.cols()); }
  int fast_time_bins() const { return static_cast<int>(extended.rows()); }
};

struct SymbolSequence {
  RVector values; // a[n] in {-1, +1}
  int size() const { return static_cast<int>(values.size()); }
};

/// One period of a maximal-length sequence of the given LFSR degree, as +-1
/// chips (bit 0 -> +1, bit 1 -> -1). Throws std::invalid_argument for degrees
/// outside the built-in primitive polynomial table (2..10).
std::vector<int> m_sequence(int degree, int polynomial_index = 0);

/// Codes for n_bar Tx antennas, nc chips each. nc must be 2^n - 1.
///   MSequenceShifts: column m is one base m-sequence cyclically shifted by
///                    step*m chips (step 3 when the shifts stay distinct, else 1);
///                    the seed rotates the base sequence.
///   Gold:            column m is u XOR (v shifted by m + seed) for a pair of
///                    distinct m-sequences u, v of the same degree.
/// The result is not yet zero-padded: extended == chips.
CodeMatrix generate_pn_codes(int n_bar, int nc, CodeKind kind, std::uint64_t seed = 0);

/// Zero-pads the codes to a PRI of fast_time_bins chips (= N_p * code_length
/// when N_p is an integer) and recomputes the composite code.
CodeMatrix extend_codes(const CodeMatrix &codes, int fast_time_bins);

/// Convenience: generate and extend for a scenario's system configuration.
CodeMatrix make_codes(const SystemConfig &sys, std::uint64_t seed);

SymbolSequence generate_symbols(int n_s, std::uint64_t seed);

/// M = a^T (x) C_ex^T, tx_count x (N_s * fast_time_bins).
RMatrix symbol_matrix(const SymbolSequence &a, const CodeMatrix &codes);

/// (1/code_length) C^T C.
RMatrix normalized_gram(const CodeMatrix &codes);

double max_off_diagonal(const RMatrix &m);

} // namespace bimimo
