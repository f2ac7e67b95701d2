#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nomsdec/linear_code.hpp"

namespace nomsdec {

class BchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// GF(2^m) log/antilog arithmetic over a conventional primitive polynomial.
class Gf2m {
 public:
  explicit Gf2m(int m);

  int m() const { return m_; }
  int order() const { return n_; }  // 2^m - 1
  uint32_t prim_poly() const { return prim_poly_; }

  uint32_t alpha_pow(int i) const { return alpha_to_[((i % n_) + n_) % n_]; }
  int log(uint32_t x) const { return index_of_[x]; }
  uint32_t mul(uint32_t a, uint32_t b) const;

 private:
  int m_, n_;
  uint32_t prim_poly_;
  std::vector<uint32_t> alpha_to_;
  std::vector<int> index_of_;
};

/// Generator polynomial g(x) = lcm of minimal polynomials of α, α³, …, α^(2t−1);
/// coefficients low degree first.
std::vector<uint8_t> bch_generator_poly(const Gf2m& field, int t);

/// Narrow-sense BCH code of length n = 2^m − 1 in systematic form:
/// G = [P | I_k], H = [I_{n−k} | Pᵀ], codeword coordinate j ↔ coefficient x^j.
/// Throws BchError when m is out of [2,8], n ≠ 2^m − 1, or k would be ≤ 0.
LinearCode construct_bch(int m, int n, int designed_t);

/// Resolve (n, k) to the designed t, scanning t upward. Throws if no t fits.
int bch_t_for_dimension(int n, int k);

}  // namespace nomsdec
