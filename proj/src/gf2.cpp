#include "nomsdec/gf2.hpp"

#include <bit>
#include <numeric>
#include <stdexcept>

namespace nomsdec {

BitMatrix::BitMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), wpr_((static_cast<size_t>(cols) + 63) / 64),
      words_(static_cast<size_t>(rows) * wpr_, 0) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("BitMatrix: negative dimensions");
}

void BitMatrix::set(int r, int c, bool v) {
  uint64_t& w = words_[static_cast<size_t>(r) * wpr_ + (c >> 6)];
  uint64_t mask = uint64_t{1} << (c & 63);
  if (v)
    w |= mask;
  else
    w &= ~mask;
}

void BitMatrix::xor_row_into(int src, int dst) {
  uint64_t* s = words_.data() + static_cast<size_t>(src) * wpr_;
  uint64_t* d = words_.data() + static_cast<size_t>(dst) * wpr_;
  for (size_t i = 0; i < wpr_; ++i) d[i] ^= s[i];
}

void BitMatrix::swap_rows(int r1, int r2) {
  if (r1 == r2) return;
  uint64_t* a = words_.data() + static_cast<size_t>(r1) * wpr_;
  uint64_t* b = words_.data() + static_cast<size_t>(r2) * wpr_;
  for (size_t i = 0; i < wpr_; ++i) std::swap(a[i], b[i]);
}

uint64_t BitMatrix::ones_count() const {
  uint64_t total = 0;
  for (uint64_t w : words_) total += std::popcount(w);
  return total;
}

int BitMatrix::row_weight(int r) const {
  int total = 0;
  for (uint64_t w : row_words(r)) total += std::popcount(w);
  return total;
}

int BitMatrix::col_weight(int c) const {
  int total = 0;
  for (int r = 0; r < rows_; ++r) total += get(r, c);
  return total;
}

int BitMatrix::rank() const {
  BitMatrix m = *this;
  int rank = 0;
  for (int c = 0; c < m.cols() && rank < m.rows(); ++c) {
    int pivot = -1;
    for (int r = rank; r < m.rows(); ++r) {
      if (m.get(r, c)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    m.swap_rows(pivot, rank);
    for (int r = 0; r < m.rows(); ++r) {
      if (r != rank && m.get(r, c)) m.xor_row_into(rank, r);
    }
    ++rank;
  }
  return rank;
}

uint64_t BitMatrix::checksum() const {
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xff;
      h *= 0x100000001b3ull;
    }
  };
  mix(static_cast<uint64_t>(rows_));
  mix(static_cast<uint64_t>(cols_));
  for (uint64_t w : words_) mix(w);
  return h;
}

std::vector<uint64_t> pack_bits(std::span<const uint8_t> bits) {
  std::vector<uint64_t> out((bits.size() + 63) / 64, 0);
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i >> 6] |= uint64_t{1} << (i & 63);
  }
  return out;
}

bool dot_parity(std::span<const uint64_t> a, std::span<const uint64_t> b) {
  uint64_t acc = 0;
  size_t nw = std::min(a.size(), b.size());
  for (size_t i = 0; i < nw; ++i) acc ^= a[i] & b[i];
  return std::popcount(acc) & 1;
}

GeneratorResult derive_generator(const BitMatrix& h) {
  const int m = h.rows(), n = h.cols();
  GeneratorResult res;
  res.col_perm.resize(n);
  std::iota(res.col_perm.begin(), res.col_perm.end(), 0);

  // Row-reduce a working copy, permuting columns so pivots land on the
  // diagonal: Hp = [I_r | A] up to discarded zero rows.
  BitMatrix w = h;
  auto swap_cols = [&](int c1, int c2) {
    if (c1 == c2) return;
    for (int r = 0; r < m; ++r) {
      bool a = w.get(r, c1), b = w.get(r, c2);
      w.set(r, c1, b);
      w.set(r, c2, a);
    }
    std::swap(res.col_perm[c1], res.col_perm[c2]);
  };

  int rank = 0;
  for (int c = rank; c < n && rank < m; ++c) {
    int pivot = -1;
    for (int r = rank; r < m; ++r) {
      if (w.get(r, c)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    w.swap_rows(pivot, rank);
    swap_cols(c, rank);
    for (int r = 0; r < m; ++r) {
      if (r != rank && w.get(r, rank)) w.xor_row_into(rank, r);
    }
    ++rank;
  }

  res.rank = rank;
  res.rank_deficient = rank < m;
  const int k = n - rank;

  // In permuted coordinates Gp = [Aᵀ | I_k]; map columns back.
  BitMatrix g(k, n);
  for (int i = 0; i < k; ++i) {
    for (int r = 0; r < rank; ++r) {
      if (w.get(r, rank + i)) g.set(i, res.col_perm[r], true);
    }
    g.set(i, res.col_perm[rank + i], true);
  }
  res.g = std::move(g);
  return res;
}

}  // namespace nomsdec
