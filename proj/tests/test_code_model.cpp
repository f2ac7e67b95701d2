#include <doctest.h>

#include <sstream>

#include "nomsdec/alist.hpp"
#include "nomsdec/bch.hpp"
#include "nomsdec/linear_code.hpp"
#include "test_helpers.hpp"

using namespace nomsdec;
using namespace nomsdec::testing;

TEST_SUITE("code-model") {

TEST_CASE("bitmatrix basics and rank") {
  BitMatrix m(3, 7);
  m.set(0, 0, true);
  m.set(0, 3, true);
  m.set(1, 3, true);
  CHECK(m.get(0, 3));
  CHECK(m.ones_count() == 3);
  CHECK(m.row_weight(0) == 2);
  CHECK(m.col_weight(3) == 2);

  // duplicate rows are rank-deficient
  BitMatrix d(2, 3);
  for (int c : {0, 1}) {
    d.set(0, c, true);
    d.set(1, c, true);
  }
  CHECK(d.rank() == 1);
}

TEST_CASE("derive_generator on SPC(3,2)") {
  BitMatrix h(1, 3);
  for (int c = 0; c < 3; ++c) h.set(0, c, true);
  auto res = derive_generator(h);
  CHECK(res.rank == 1);
  CHECK(!res.rank_deficient);
  CHECK(res.g.rows() == 2);
  // G·Hᵀ = 0: every generator row has even weight
  for (int i = 0; i < 2; ++i) CHECK(res.g.row_weight(i) % 2 == 0);
}

TEST_CASE("hamming(7,4): exhaustive syndrome check of all 16 codewords") {
  auto code = hamming74();
  CHECK(code.n() == 7);
  CHECK(code.k() == 4);
  CHECK(code.edge_count() == 12);  // ones in the standard H
  for (int msg = 0; msg < 16; ++msg) {
    std::vector<uint8_t> m(4);
    for (int i = 0; i < 4; ++i) m[i] = (msg >> i) & 1;
    CHECK(code.syndrome_ok(code.encode(m)));
  }
}

TEST_CASE("duplicate rows: warning surface is reduced redundancy") {
  BitMatrix h(2, 3);
  for (int c : {0, 1, 2}) {
    h.set(0, c, true);
    h.set(1, c, true);
  }
  LinearCode code(std::move(h), "dup");
  CHECK(code.rank_deficient());
  CHECK(code.k() == 2);  // n − rank = 3 − 1
}

TEST_CASE("encode: all-zeros message, parity completion, length check") {
  BitMatrix h(1, 3);
  for (int c = 0; c < 3; ++c) h.set(0, c, true);
  LinearCode spc(std::move(h), "SPC(3,2)");

  CHECK(spc.encode(std::vector<uint8_t>{0, 0}) == std::vector<uint8_t>{0, 0, 0});
  auto cw = spc.encode(std::vector<uint8_t>{1, 0});
  CHECK(spc.syndrome_ok(cw));
  int weight = cw[0] + cw[1] + cw[2];
  CHECK(weight % 2 == 0);  // parity completion
  CHECK_THROWS_AS((void)spc.encode(std::vector<uint8_t>{1, 0, 1}), std::invalid_argument);
}

TEST_CASE("random messages encode to zero-syndrome words on every code") {
  Rng rng(7);
  std::vector<LinearCode> codes;
  codes.push_back(hamming74());
  codes.push_back(construct_bch(6, 63, 3));
  for (const auto& code : codes) {
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<uint8_t> m(code.k());
      for (int i = 0; i < code.k(); ++i) m[i] = rng.bit();
      CHECK(code.syndrome_ok(code.encode(m)));
    }
  }
}

TEST_CASE("tanner graph: edge indexing is a bijection") {
  auto code = construct_bch(6, 63, 3);
  const auto& g = code.graph();
  long vn_sum = 0, cn_sum = 0;
  for (int d : g.vn_degree) vn_sum += d;
  for (int d : g.cn_degree) cn_sum += d;
  CHECK(vn_sum == g.edge_count);
  CHECK(cn_sum == g.edge_count);
  CHECK(static_cast<uint64_t>(g.edge_count) == code.h().ones_count());

  // canonical order: row-major, strictly increasing (c, v)
  for (int e = 1; e < g.edge_count; ++e) {
    bool ordered = g.edge_check[e] > g.edge_check[e - 1] ||
                   (g.edge_check[e] == g.edge_check[e - 1] && g.edge_var[e] > g.edge_var[e - 1]);
    CHECK(ordered);
  }
}

TEST_CASE("alist: hamming(7,4) round trip and invariants") {
  auto code = hamming74();
  auto text = to_alist(code.h());
  auto h2 = parse_alist_text(text);
  CHECK(h2 == code.h());

  std::istringstream ss(text);
  auto loaded = load_alist(ss, "hamming");
  CHECK(loaded.n() == 7);
  CHECK(loaded.k() == 4);
  CHECK(loaded.edge_count() == 12);
}

TEST_CASE("alist: single-row [1 1 1] is SPC(3,2)") {
  std::istringstream ss("3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 3\n");
  auto code = load_alist(ss, "spc3");
  CHECK(code.n() == 3);
  CHECK(code.k() == 2);
  CHECK(code.edge_count() == 3);
  CHECK(code.graph().cn_degree[0] == 3);
}

TEST_CASE("alist: contradictory row view is a parse error naming the line") {
  // column view says H = [1 1 0; row view claims row 1 = {1,3}]
  std::string bad =
      "3 1\n"
      "1 2\n"
      "1 1 0\n"
      "2\n"
      "1\n"
      "1\n"
      "0\n"
      "1 3\n";
  CHECK_THROWS_AS((void)parse_alist_text(bad), AlistError);
  try {
    (void)parse_alist_text(bad);
  } catch (const AlistError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("alist: malformed header") {
  CHECK_THROWS_AS((void)parse_alist_text("7\n"), AlistError);
  CHECK_THROWS_AS((void)parse_alist_text("abc 3\n"), AlistError);
}

TEST_CASE("alist: out-of-range index") {
  std::string bad =
      "3 1\n"
      "1 3\n"
      "1 1 1\n"
      "3\n"
      "2\n"  // row index 2 > m=1
      "1\n"
      "1\n"
      "1 2 3\n";
  CHECK_THROWS_AS((void)parse_alist_text(bad), AlistError);
}

TEST_CASE("bch: generator degrees for the three codes") {
  // deg g(x) verified against an independent GF(2^m) computation
  Gf2m f6(6);
  CHECK(bch_generator_poly(f6, 3).size() == 19);  // deg 18 → k = 45
  CHECK(bch_generator_poly(f6, 5).size() == 28);  // deg 27 → k = 36
  Gf2m f7(7);
  CHECK(bch_generator_poly(f7, 3).size() == 22);  // deg 21 → k = 106

  auto c45 = construct_bch(6, 63, 3);
  CHECK(c45.n() == 63);
  CHECK(c45.k() == 45);
  auto c36 = construct_bch(6, 63, 5);
  CHECK(c36.n() == 63);
  CHECK(c36.k() == 36);
  auto c106 = construct_bch(7, 127, 3);
  CHECK(c106.n() == 127);
  CHECK(c106.k() == 106);
}

TEST_CASE("bch: t resolution from (n, k)") {
  CHECK(bch_t_for_dimension(63, 45) == 3);
  CHECK(bch_t_for_dimension(63, 36) == 5);
  CHECK(bch_t_for_dimension(127, 106) == 3);
  CHECK_THROWS_AS(bch_t_for_dimension(63, 44), BchError);
}

TEST_CASE("bch: construction errors") {
  CHECK_THROWS_AS(construct_bch(1, 1, 1), BchError);
  CHECK_THROWS_AS(construct_bch(9, 511, 1), BchError);
  CHECK_THROWS_AS(construct_bch(6, 64, 1), BchError);
  CHECK_THROWS_AS(construct_bch(2, 3, 2), BchError);  // deg g = 3 leaves k = 0
}

TEST_CASE("bch: codewords are cyclic") {
  auto code = construct_bch(6, 63, 3);
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<uint8_t> m(code.k());
    for (int i = 0; i < code.k(); ++i) m[i] = rng.bit();
    auto cw = code.encode(m);
    std::vector<uint8_t> shifted(cw.size());
    for (size_t j = 0; j < cw.size(); ++j) shifted[(j + 1) % cw.size()] = cw[j];
    CHECK(code.syndrome_ok(shifted));
  }
}

TEST_CASE("bch: alist round trip preserves H exactly") {
  for (auto [m, t] : {std::pair{6, 3}, std::pair{6, 5}, std::pair{7, 3}}) {
    auto code = construct_bch(m, (1 << m) - 1, t);
    auto reloaded = parse_alist_text(to_alist(code.h()));
    CHECK(reloaded == code.h());
  }
}

TEST_CASE("bch: metadata records the primitive polynomial") {
  auto code = construct_bch(6, 63, 3);
  REQUIRE(code.bch_meta.has_value());
  CHECK(code.bch_meta->prim_poly == 0x43);  // x^6 + x + 1
  CHECK(code.bch_meta->t == 3);
}

}  // TEST_SUITE
