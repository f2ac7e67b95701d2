#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nomsdec/gf2.hpp"

namespace nomsdec {

/// Bipartite adjacency of a parity-check matrix with a canonical global edge
/// order: row-major scan of H (check ascending, then variable ascending).
/// Learned-parameter files index edges in this order.
struct TannerGraph {
  int n_vars = 0;
  int n_checks = 0;
  int edge_count = 0;

  std::vector<uint32_t> edge_check;  // E: check index of edge e
  std::vector<uint32_t> edge_var;    // E: variable index of edge e

  // CSR adjacency; edge ids ascend within each list.
  std::vector<uint32_t> vn_offset;  // n+1
  std::vector<uint32_t> vn_edges;   // E
  std::vector<uint32_t> cn_offset;  // m+1
  std::vector<uint32_t> cn_edges;   // E

  std::vector<int> vn_degree;  // n
  std::vector<int> cn_degree;  // m

  // Per-edge fan-in bookkeeping for the weighted decoder: edge e = (c,v)
  // receives vn_degree[v]-1 messages. fanin_base[e] is the prefix offset into
  // a flat [fanin_total] array, laid out in canonical edge order.
  std::vector<uint32_t> fanin_base;  // E+1
  uint32_t fanin_total = 0;

  std::span<const uint32_t> edges_of_var(int v) const {
    return {vn_edges.data() + vn_offset[v], vn_offset[v + 1] - vn_offset[v]};
  }
  std::span<const uint32_t> edges_of_check(int c) const {
    return {cn_edges.data() + cn_offset[c], cn_offset[c + 1] - cn_offset[c]};
  }
};

TannerGraph build_tanner_graph(const BitMatrix& h);

struct BchMeta {
  int m = 0;              // field extension degree
  int t = 0;              // designed error-correcting capability
  uint32_t prim_poly = 0; // primitive polynomial of GF(2^m), bit i = coeff of x^i
  std::vector<uint8_t> gen_poly;  // g(x) coefficients, low degree first
};

/// A binary linear code: parity-check matrix, derived generator, and the
/// Tanner graph used by the decoders. Immutable after construction.
class LinearCode {
 public:
  LinearCode(BitMatrix h, std::string name);

  /// n = k pseudo-code with no parity checks (uncoded BPSK baseline).
  static LinearCode uncoded(int n);

  const BitMatrix& h() const { return h_; }
  const BitMatrix& g() const { return g_; }
  const TannerGraph& graph() const { return graph_; }
  const std::string& name() const { return name_; }

  int n() const { return h_.cols(); }
  int k() const { return k_; }
  double rate() const { return static_cast<double>(k_) / n(); }
  int edge_count() const { return graph_.edge_count; }
  bool rank_deficient() const { return rank_deficient_; }
  const std::vector<int>& col_perm() const { return col_perm_; }

  std::optional<BchMeta> bch_meta;

  std::vector<uint8_t> encode(std::span<const uint8_t> message) const;
  bool syndrome_ok(std::span<const uint8_t> word) const;

  uint64_t h_checksum() const { return h_.checksum(); }

 private:
  LinearCode() = default;
  std::string name_;
  BitMatrix h_;
  BitMatrix g_;
  TannerGraph graph_;
  int k_ = 0;
  bool rank_deficient_ = false;
  std::vector<int> col_perm_;
  std::vector<std::vector<uint64_t>> g_rows_;  // packed rows for fast encode
  size_t words_per_codeword_ = 0;
};

}  // namespace nomsdec
