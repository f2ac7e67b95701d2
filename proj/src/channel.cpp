#include "nomsdec/channel.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nomsdec {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

Rng Rng::stream(uint64_t seed, std::initializer_list<uint64_t> ids) {
  uint64_t h = splitmix64(seed);
  for (uint64_t id : ids) h = splitmix64(h ^ (id + 0x9e3779b97f4a7c15ull));
  return Rng(h);
}

double Rng::uniform01() {
  // 53-bit mantissa in [0,1)
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::string Rng::state_string() const {
  std::ostringstream ss;
  ss << engine_ << " " << has_spare_ << " ";
  ss.precision(17);
  ss << spare_;
  return ss.str();
}

void Rng::set_state(const std::string& s) {
  std::istringstream ss(s);
  ss >> engine_ >> has_spare_ >> spare_;
  if (ss.fail()) throw std::invalid_argument("Rng: malformed state string");
}

double ebn0_to_sigma2(double ebn0_db, double rate) {
  if (!(rate > 0.0) || rate > 1.0)
    throw std::invalid_argument("ebn0_to_sigma2: rate must be in (0,1], got " + std::to_string(rate));
  return 1.0 / (2.0 * rate * std::pow(10.0, ebn0_db / 10.0));
}

std::vector<double> modulate_bpsk(std::span<const uint8_t> bits) {
  std::vector<double> out(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? -1.0 : 1.0;
  return out;
}

ReceivedFrame transmit(const ChannelConfig& cfg, std::span<const double> symbols, Rng& rng) {
  if (!(cfg.sigma2 > 0.0)) throw std::invalid_argument("transmit: sigma2 must be positive");
  ReceivedFrame f;
  const size_t n = symbols.size();
  f.y.resize(n);
  f.llr.resize(n);
  f.truth_bits.resize(n);
  const double sigma = std::sqrt(cfg.sigma2);
  for (size_t i = 0; i < n; ++i) {
    f.y[i] = symbols[i] + sigma * rng.gaussian();
    f.llr[i] = 2.0 * f.y[i] / cfg.sigma2;
    f.truth_bits[i] = symbols[i] < 0.0 ? 1 : 0;
  }
  return f;
}

std::vector<double> all_zeros_llr(const ChannelConfig& cfg, int n, Rng& rng) {
  std::vector<double> llr(n);
  const double sigma = std::sqrt(cfg.sigma2);
  for (int i = 0; i < n; ++i) llr[i] = 2.0 * (1.0 + sigma * rng.gaussian()) / cfg.sigma2;
  return llr;
}

}  // namespace nomsdec
