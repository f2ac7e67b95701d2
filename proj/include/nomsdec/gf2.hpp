#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nomsdec {

/// Dense binary matrix over GF(2), rows stored as 64-bit words.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool get(int r, int c) const {
    return (words_[static_cast<size_t>(r) * wpr_ + (c >> 6)] >> (c & 63)) & 1u;
  }
  void set(int r, int c, bool v);

  void xor_row_into(int src, int dst);  // row[dst] ^= row[src]
  void swap_rows(int r1, int r2);

  std::span<const uint64_t> row_words(int r) const {
    return {words_.data() + static_cast<size_t>(r) * wpr_, wpr_};
  }

  /// Number of ones in the whole matrix.
  uint64_t ones_count() const;
  /// Number of ones in row r.
  int row_weight(int r) const;
  /// Number of ones in column c.
  int col_weight(int c) const;

  int rank() const;

  bool operator==(const BitMatrix& o) const = default;

  /// FNV-1a over dimensions and row words; identifies the matrix in manifests.
  uint64_t checksum() const;

 private:
  int rows_ = 0, cols_ = 0;
  size_t wpr_ = 0;  // words per row
  std::vector<uint64_t> words_;
};

/// Pack a 0/1 byte vector into 64-bit words (little-endian bit order).
std::vector<uint64_t> pack_bits(std::span<const uint8_t> bits);

/// Parity of AND between a packed word row and a packed vector.
bool dot_parity(std::span<const uint64_t> a, std::span<const uint64_t> b);

struct GeneratorResult {
  BitMatrix g;                 // k x n, G·Hᵀ = 0
  int rank = 0;                // rank of H over GF(2)
  bool rank_deficient = false; // true when rank < rows (k was recomputed)
  std::vector<int> col_perm;   // column permutation used during elimination
};

/// Derive a generator matrix from a parity-check matrix by GF(2) Gaussian
/// elimination with column pivoting. The permutation is folded back into G,
/// so G lives in the original column order.
GeneratorResult derive_generator(const BitMatrix& h);

}  // namespace nomsdec
