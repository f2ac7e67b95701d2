#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace nomsdec {

/// Deterministic random stream: mt19937_64 with an explicit polar-method
/// Gaussian so the generator is identical across standard libraries.
/// Generator name recorded in result metadata: "mt19937_64/polar".
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  /// Independent substream derived by hashing (seed, ids...) with splitmix64.
  static Rng stream(uint64_t seed, std::initializer_list<uint64_t> ids);

  static constexpr const char* kGeneratorName = "mt19937_64/polar";

  uint64_t next_u64() { return engine_(); }
  bool bit() { return engine_() >> 63; }
  double uniform01();                 // [0,1)
  double gaussian();                  // N(0,1), polar method
  double normal(double mean, double stddev) { return mean + stddev * gaussian(); }

  std::string state_string() const;   // engine state + cached spare
  void set_state(const std::string& s);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Eb/N0 in dB to per-dimension noise variance for unit-energy BPSK:
/// σ² = 1 / (2·rate·10^(ebn0_db/10)). Throws std::invalid_argument for
/// rate outside (0, 1].
double ebn0_to_sigma2(double ebn0_db, double rate);

struct ChannelConfig {
  double ebn0_db = 0.0;
  double rate = 0.5;
  double sigma2 = 1.0;  // derived
  uint64_t seed = 0;

  ChannelConfig() = default;
  ChannelConfig(double ebn0_db_, double rate_, uint64_t seed_ = 0)
      : ebn0_db(ebn0_db_), rate(rate_), sigma2(ebn0_to_sigma2(ebn0_db_, rate_)), seed(seed_) {}
};

struct ReceivedFrame {
  std::vector<double> y;            // received values
  std::vector<double> llr;          // 2·y/σ², positive favors bit 0
  std::vector<uint8_t> truth_bits;  // transmitted codeword
};

/// bit 0 → +1.0, bit 1 → −1.0
std::vector<double> modulate_bpsk(std::span<const uint8_t> bits);

/// y = symbols + z, z i.i.d. N(0, σ²); LLRs per llr = 2y/σ².
ReceivedFrame transmit(const ChannelConfig& cfg, std::span<const double> symbols, Rng& rng);

/// LLRs of the all-zeros codeword (all-(+1) symbols) without encode/modulate.
std::vector<double> all_zeros_llr(const ChannelConfig& cfg, int n, Rng& rng);

}  // namespace nomsdec
