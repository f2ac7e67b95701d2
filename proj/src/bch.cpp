#include "nomsdec/bch.hpp"

#include <map>
#include <set>

namespace nomsdec {

namespace {

// Conventional primitive polynomials, bit i = coefficient of x^i.
constexpr uint32_t kPrimPoly[9] = {
    0, 0,
    0x7,    // x^2 + x + 1
    0xB,    // x^3 + x + 1
    0x13,   // x^4 + x + 1
    0x25,   // x^5 + x^2 + 1
    0x43,   // x^6 + x + 1
    0x89,   // x^7 + x^3 + 1
    0x11D,  // x^8 + x^4 + x^3 + x^2 + 1
};

}  // namespace

Gf2m::Gf2m(int m) : m_(m) {
  if (m < 2 || m > 8) throw BchError("GF(2^m): m must be in [2,8], got " + std::to_string(m));
  prim_poly_ = kPrimPoly[m];
  n_ = (1 << m) - 1;
  alpha_to_.resize(n_ + 1);
  index_of_.assign(1 << m, -1);
  uint32_t x = 1;
  for (int i = 0; i < n_; ++i) {
    alpha_to_[i] = x;
    index_of_[x] = i;
    x <<= 1;
    if (x & (1u << m)) x ^= prim_poly_;
  }
  alpha_to_[n_] = alpha_to_[0];
}

uint32_t Gf2m::mul(uint32_t a, uint32_t b) const {
  if (a == 0 || b == 0) return 0;
  return alpha_to_[(index_of_[a] + index_of_[b]) % n_];
}

std::vector<uint8_t> bch_generator_poly(const Gf2m& field, int t) {
  const int n = field.order();
  std::set<std::set<int>> used_cosets;
  std::vector<uint8_t> g = {1};

  for (int i = 1; i <= 2 * t - 1; i += 2) {
    std::set<int> coset;
    int j = i % n;
    while (!coset.count(j)) {
      coset.insert(j);
      j = (2 * j) % n;
    }
    if (used_cosets.count(coset)) continue;
    used_cosets.insert(coset);

    // Minimal polynomial of α^i: ∏_{j in coset} (x + α^j) over GF(2^m);
    // coefficients are forced into GF(2).
    std::vector<uint32_t> mp = {1};
    for (int expo : coset) {
      uint32_t root = field.alpha_pow(expo);
      std::vector<uint32_t> next(mp.size() + 1, 0);
      for (size_t d = 0; d < mp.size(); ++d) {
        next[d + 1] ^= mp[d];
        next[d] ^= field.mul(mp[d], root);
      }
      mp = std::move(next);
    }
    for (uint32_t c : mp) {
      if (c > 1) throw BchError("minimal polynomial coefficient outside GF(2)");
    }

    std::vector<uint8_t> prod(g.size() + mp.size() - 1, 0);
    for (size_t a = 0; a < g.size(); ++a) {
      if (!g[a]) continue;
      for (size_t b = 0; b < mp.size(); ++b) prod[a + b] ^= static_cast<uint8_t>(mp[b]);
    }
    g = std::move(prod);
  }
  return g;
}

LinearCode construct_bch(int m, int n, int designed_t) {
  Gf2m field(m);
  if (n != field.order())
    throw BchError("BCH: n=" + std::to_string(n) + " must equal 2^m-1=" + std::to_string(field.order()));
  if (designed_t < 1) throw BchError("BCH: t must be >= 1");

  auto g = bch_generator_poly(field, designed_t);
  const int r = static_cast<int>(g.size()) - 1;  // deg g(x)
  const int k = n - r;
  if (k <= 0)
    throw BchError("BCH(m=" + std::to_string(m) + ", t=" + std::to_string(designed_t) +
                   "): deg g(x)=" + std::to_string(r) + " leaves k<=0");

  // Systematic form with coordinate j ↔ coefficient of x^j, parity first:
  // c(x) = x^r·msg(x) + (x^r·msg(x) mod g(x)) is a multiple of g(x), so the
  // code stays cyclic. H = [I_r | Pᵀ] with P[i] = coeffs of x^(r+i) mod g(x);
  // deriving the generator from this H yields G = [P | I_k].
  BitMatrix h(r, n);
  std::vector<uint8_t> rem(g.begin(), g.begin() + r);  // x^r mod g (g is monic)
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < r; ++j) {
      if (rem[j]) h.set(j, r + i, true);
    }
    // rem <- (x * rem) mod g
    uint8_t carry = rem[r - 1];
    for (int j = r - 1; j > 0; --j) rem[j] = rem[j - 1];
    rem[0] = 0;
    if (carry) {
      for (int j = 0; j < r; ++j) rem[j] ^= g[j];
    }
  }
  for (int j = 0; j < r; ++j) h.set(j, j, true);

  LinearCode code(std::move(h), "BCH(" + std::to_string(n) + "," + std::to_string(k) + ")");
  code.bch_meta = BchMeta{m, designed_t, field.prim_poly(), std::move(g)};
  if (code.k() != k) throw BchError("BCH: systematic H rank mismatch");
  return code;
}

int bch_t_for_dimension(int n, int k) {
  int m = 0;
  while ((1 << m) - 1 < n) ++m;
  if ((1 << m) - 1 != n) throw BchError("BCH: n must be 2^m-1");
  Gf2m field(m);
  for (int t = 1; 2 * t - 1 <= n; ++t) {
    auto g = bch_generator_poly(field, t);
    int kk = n - (static_cast<int>(g.size()) - 1);
    if (kk == k) return t;
    if (kk < k) break;  // degrees only grow with t
  }
  throw BchError("no BCH code with n=" + std::to_string(n) + ", k=" + std::to_string(k));
}

}  // namespace nomsdec
