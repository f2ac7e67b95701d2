#include "nomsdec/linear_code.hpp"

#include <stdexcept>

namespace nomsdec {

TannerGraph build_tanner_graph(const BitMatrix& h) {
  TannerGraph g;
  g.n_vars = h.cols();
  g.n_checks = h.rows();

  // Canonical edge order: row-major scan of H.
  for (int c = 0; c < h.rows(); ++c) {
    for (int v = 0; v < h.cols(); ++v) {
      if (h.get(c, v)) {
        g.edge_check.push_back(static_cast<uint32_t>(c));
        g.edge_var.push_back(static_cast<uint32_t>(v));
      }
    }
  }
  g.edge_count = static_cast<int>(g.edge_check.size());

  g.vn_degree.assign(g.n_vars, 0);
  g.cn_degree.assign(g.n_checks, 0);
  for (int e = 0; e < g.edge_count; ++e) {
    ++g.vn_degree[g.edge_var[e]];
    ++g.cn_degree[g.edge_check[e]];
  }

  g.vn_offset.assign(g.n_vars + 1, 0);
  for (int v = 0; v < g.n_vars; ++v) g.vn_offset[v + 1] = g.vn_offset[v] + g.vn_degree[v];
  g.cn_offset.assign(g.n_checks + 1, 0);
  for (int c = 0; c < g.n_checks; ++c) g.cn_offset[c + 1] = g.cn_offset[c] + g.cn_degree[c];

  g.vn_edges.resize(g.edge_count);
  g.cn_edges.resize(g.edge_count);
  std::vector<uint32_t> vfill(g.vn_offset.begin(), g.vn_offset.end() - 1);
  std::vector<uint32_t> cfill(g.cn_offset.begin(), g.cn_offset.end() - 1);
  for (uint32_t e = 0; e < static_cast<uint32_t>(g.edge_count); ++e) {
    g.vn_edges[vfill[g.edge_var[e]]++] = e;
    g.cn_edges[cfill[g.edge_check[e]]++] = e;
  }

  g.fanin_base.assign(g.edge_count + 1, 0);
  for (int e = 0; e < g.edge_count; ++e) {
    g.fanin_base[e + 1] = g.fanin_base[e] + static_cast<uint32_t>(g.vn_degree[g.edge_var[e]] - 1);
  }
  g.fanin_total = g.fanin_base[g.edge_count];
  return g;
}

LinearCode::LinearCode(BitMatrix h, std::string name) : name_(std::move(name)), h_(std::move(h)) {
  if (h_.rows() == 0 || h_.cols() == 0)
    throw std::invalid_argument("LinearCode: empty parity-check matrix");
  for (int r = 0; r < h_.rows(); ++r) {
    if (h_.row_weight(r) < 2)
      throw std::invalid_argument("LinearCode: check row " + std::to_string(r) +
                                  " has fewer than 2 ones");
  }
  for (int c = 0; c < h_.cols(); ++c) {
    if (h_.col_weight(c) < 1)
      throw std::invalid_argument("LinearCode: column " + std::to_string(c) + " has no ones");
  }
  auto gen = derive_generator(h_);
  g_ = std::move(gen.g);
  k_ = h_.cols() - gen.rank;
  rank_deficient_ = gen.rank_deficient;
  col_perm_ = std::move(gen.col_perm);
  graph_ = build_tanner_graph(h_);

  words_per_codeword_ = (static_cast<size_t>(n()) + 63) / 64;
  g_rows_.reserve(k_);
  for (int i = 0; i < k_; ++i) {
    std::vector<uint8_t> row(n());
    for (int j = 0; j < n(); ++j) row[j] = g_.get(i, j);
    g_rows_.push_back(pack_bits(row));
  }
}

LinearCode LinearCode::uncoded(int n) {
  LinearCode code;
  code.name_ = "uncoded(" + std::to_string(n) + ")";
  code.h_ = BitMatrix(0, n);
  code.k_ = n;
  code.graph_.n_vars = n;
  code.graph_.vn_offset.assign(n + 1, 0);
  code.graph_.vn_degree.assign(n, 0);
  code.graph_.cn_offset.assign(1, 0);
  code.graph_.fanin_base.assign(1, 0);
  code.g_ = BitMatrix(n, n);
  code.col_perm_.resize(n);
  for (int i = 0; i < n; ++i) {
    code.g_.set(i, i, true);
    code.col_perm_[i] = i;
  }
  code.words_per_codeword_ = (static_cast<size_t>(n) + 63) / 64;
  for (int i = 0; i < n; ++i) {
    std::vector<uint8_t> row(n, 0);
    row[i] = 1;
    code.g_rows_.push_back(pack_bits(row));
  }
  return code;
}

std::vector<uint8_t> LinearCode::encode(std::span<const uint8_t> message) const {
  if (static_cast<int>(message.size()) != k_)
    throw std::invalid_argument("encode: message length " + std::to_string(message.size()) +
                                ", expected k=" + std::to_string(k_));
  std::vector<uint64_t> acc(words_per_codeword_, 0);
  for (int i = 0; i < k_; ++i) {
    if (message[i]) {
      for (size_t w = 0; w < words_per_codeword_; ++w) acc[w] ^= g_rows_[i][w];
    }
  }
  std::vector<uint8_t> out(n());
  for (int j = 0; j < n(); ++j) out[j] = (acc[j >> 6] >> (j & 63)) & 1u;
  return out;
}

bool LinearCode::syndrome_ok(std::span<const uint8_t> word) const {
  if (static_cast<int>(word.size()) != n())
    throw std::invalid_argument("syndrome: word length mismatch");
  auto packed = pack_bits(word);
  for (int r = 0; r < h_.rows(); ++r) {
    if (dot_parity(h_.row_words(r), packed)) return false;
  }
  return true;
}

}  // namespace nomsdec
