#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "nomsdec/channel.hpp"

using namespace nomsdec;

TEST_SUITE("channel") {

TEST_CASE("ebn0_to_sigma2") {
  CHECK(ebn0_to_sigma2(0.0, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ebn0_to_sigma2(1.0, 0.5) == doctest::Approx(0.7943282347242815).epsilon(1e-12));
  CHECK(ebn0_to_sigma2(8.0, 45.0 / 63.0) == doctest::Approx(0.11094252347227791).epsilon(1e-12));
  CHECK_THROWS_AS(ebn0_to_sigma2(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ebn0_to_sigma2(1.0, -0.3), std::invalid_argument);
}

TEST_CASE("modulate_bpsk mapping") {
  CHECK(modulate_bpsk(std::vector<uint8_t>{0, 0, 0}) == std::vector<double>{1, 1, 1});
  CHECK(modulate_bpsk(std::vector<uint8_t>{1, 0}) == std::vector<double>{-1, 1});
  CHECK(modulate_bpsk(std::vector<uint8_t>{1, 1, 1, 1}) == std::vector<double>{-1, -1, -1, -1});
}

TEST_CASE("llr is exactly 2y/sigma2") {
  ChannelConfig cfg(0.0, 0.5, 1);
  cfg.sigma2 = 0.37;  // not a power of two: exactness must come from the formula
  Rng rng(1);
  auto frame = transmit(cfg, std::vector<double>(16, 0.5), rng);
  for (int i = 0; i < 16; ++i) CHECK(frame.llr[i] == 2.0 * frame.y[i] / 0.37);

  // the map sends y = 0.5 at sigma2 = 0.25 to exactly 4.0
  ChannelConfig quarter(0.0, 0.5, 1);
  quarter.sigma2 = 0.25;
  Rng quiet_rng(2);
  auto quiet = transmit(quarter, std::vector<double>{0.5}, quiet_rng);
  CHECK(quiet.llr[0] == 2.0 * quiet.y[0] / 0.25);
  CHECK(quiet.llr[0] == doctest::Approx(4.0).epsilon(2.0));  // y ~ N(0.5, 0.25)
}

TEST_CASE("noiseless limit: llr sign matches symbol sign, magnitude large") {
  ChannelConfig cfg(0.0, 0.5, 1);
  cfg.sigma2 = 1e-6;
  Rng rng(42);
  auto frame = transmit(cfg, std::vector<double>{1.0, -1.0, 1.0}, rng);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(std::signbit(frame.llr[i]) == std::signbit(frame.y[i]));
    CHECK(std::fabs(frame.llr[i]) > 1e5);
  }
  CHECK(frame.truth_bits == std::vector<uint8_t>{0, 1, 0});
}

TEST_CASE("empirical noise variance within 1% over 1e6 samples") {
  ChannelConfig cfg(2.0, 0.5, 9);
  Rng rng = Rng::stream(9, {0});
  const int total = 1000000;
  const int n = 100;
  std::vector<double> symbols(n, 1.0);
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < total / n; ++i) {
    auto frame = transmit(cfg, symbols, rng);
    for (double y : frame.y) {
      const double z = y - 1.0;
      acc += z;
      acc2 += z * z;
    }
  }
  const double mean = acc / total;
  const double var = acc2 / total - mean * mean;
  CHECK(var == doctest::Approx(cfg.sigma2).epsilon(0.01));
  CHECK(std::fabs(mean) < 0.01);
}

TEST_CASE("rng determinism and stream independence") {
  Rng a = Rng::stream(5, {1, 2});
  Rng b = Rng::stream(5, {1, 2});
  Rng c = Rng::stream(5, {1, 3});
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    double ga = a.gaussian(), gb = b.gaussian(), gc = c.gaussian();
    all_equal &= (ga == gb);
    any_diff |= (ga != gc);
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("rng state round trip") {
  Rng a(123);
  (void)a.gaussian();
  (void)a.gaussian();
  (void)a.gaussian();  // leaves a cached spare with odd call counts
  auto state = a.state_string();
  Rng b(0);
  b.set_state(state);
  for (int i = 0; i < 16; ++i) CHECK(a.gaussian() == b.gaussian());
}

TEST_CASE("all_zeros_llr matches transmit of the all-(+1) vector") {
  ChannelConfig cfg(3.0, 0.5, 77);
  Rng r1 = Rng::stream(77, {4});
  Rng r2 = Rng::stream(77, {4});
  auto llr = all_zeros_llr(cfg, 32, r1);
  auto frame = transmit(cfg, std::vector<double>(32, 1.0), r2);
  for (int i = 0; i < 32; ++i) CHECK(llr[i] == doctest::Approx(frame.llr[i]).epsilon(1e-15));
}

}  // TEST_SUITE
