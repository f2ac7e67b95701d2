#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nomsdec/linear_code.hpp"

namespace nomsdec {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Variant { Spa, MinSum, Oms, Noms, Nspa };

enum class Tying { PerEdge, PerIteration, PerCheckNode, Global };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& s);
std::string tying_name(Tying t);
Tying tying_from_name(const std::string& s);

/// LLR-domain messages are clamped to ±kLlrClamp before tanh/atanh;
/// atanh arguments are clamped to ±(1 − kAtanhEps).
inline constexpr double kLlrClamp = 30.0;
inline constexpr double kAtanhEps = 1e-12;

/// Multiplicative weights of the weighted sum-product decoder, stored flat:
/// [input weights T×n | edge weights T×fanin_total | output channel weights n
///  | output edge weights E]. Edge weights for iteration t and target edge
/// e = (c,v) occupy fanin_base[e]..fanin_base[e+1] within that iteration's
/// block, one weight per incoming edge (c',v), c' ≠ c, in canonical order.
struct NspaWeights {
  std::vector<double> flat;
  int iterations = 0, n = 0, edge_count = 0;
  uint32_t fanin_total = 0;

  size_t in_index(int t, int v) const { return static_cast<size_t>(t) * n + v; }
  size_t edge_index(int t, uint32_t fanin_slot) const {
    return static_cast<size_t>(iterations) * n + static_cast<size_t>(t) * fanin_total + fanin_slot;
  }
  size_t out_ch_index(int v) const {
    return static_cast<size_t>(iterations) * n + static_cast<size_t>(iterations) * fanin_total + v;
  }
  size_t out_edge_index(uint32_t e) const { return out_ch_index(n) + e; }
  size_t size() const {
    return static_cast<size_t>(iterations) * n + static_cast<size_t>(iterations) * fanin_total +
           n + edge_count;
  }
};

/// Decoder configuration: variant, iteration count, and trainable values.
/// Offsets live in "slots"; slot_of maps (iteration, edge) to a slot per the
/// tying scheme (per-edge tying has E·T slots, global tying has 1).
struct DecoderParams {
  Variant variant = Variant::Spa;
  int iterations = 5;
  Tying tying = Tying::PerEdge;

  std::vector<double> offsets;    // slot values (empty for SPA/MS/NSPA)
  std::vector<uint32_t> slot_of;  // T*E -> slot id (empty for SPA/MS/NSPA)
  NspaWeights weights;            // NSPA only

  int edge_count = 0;   // E of the graph the params were built for (0: any)
  int n_vars = 0;       // n for NSPA weight shapes
  int64_t trained_minibatches = 0;  // provenance for histogram file naming

  static DecoderParams spa(int iterations);
  static DecoderParams min_sum(int iterations);
  static DecoderParams oms(int iterations, double beta);
  /// Offsets initialized to init_value on every slot.
  static DecoderParams noms(const LinearCode& code, int iterations, Tying tying,
                            double init_value = 0.0);
  /// All weights initialized to 1 (decodes identically to SPA until trained).
  static DecoderParams nspa(const LinearCode& code, int iterations);

  double offset_at(int t, uint32_t e) const {
    if (offsets.empty()) return 0.0;
    if (offsets.size() == 1) return offsets[0];
    return offsets[slot_of[static_cast<size_t>(t) * edge_count + e]];
  }
  size_t slot_count() const { return offsets.size(); }
  bool is_min_sum_family() const {
    return variant == Variant::MinSum || variant == Variant::Oms || variant == Variant::Noms;
  }
};

/// Build the (iteration, edge) → slot table for a tying scheme.
std::vector<uint32_t> build_slot_table(const TannerGraph& graph, int iterations, Tying tying);
size_t tying_slot_count(const TannerGraph& graph, int iterations, Tying tying);

/// Forward state recorded for the backward pass. v2c holds μ_{v,c}^t
/// (tanh-domain for NSPA), c2v holds μ_{c,v}^t, soft holds s^t, all flat
/// [T×E] / [T×n]. argmin_edge[t,e] is the in-edge attaining the excluded
/// minimum feeding edge e's output; relu_active[t,e] records min − β > 0.
struct DecodeTape {
  Variant variant = Variant::Spa;
  int iterations = 0;
  int edge_count = 0;
  int n = 0;
  std::vector<double> llr;
  std::vector<double> v2c;
  std::vector<double> c2v;
  std::vector<double> soft;
  std::vector<uint32_t> argmin_edge;
  std::vector<uint8_t> relu_active;
  // NSPA clamp states (boundary counts as clamped; such points pass zero
  // gradient, mirroring ReLU'(0) = 0).
  std::vector<uint8_t> a_clamped;  // pre-tanh LLR clamp per (t, e)
  std::vector<uint8_t> p_clamped;  // atanh product clamp per (t, e)

  size_t te(int t, uint32_t e) const { return static_cast<size_t>(t) * edge_count + e; }
  size_t tv(int t, int v) const { return static_cast<size_t>(t) * n + v; }
};

struct SoftOutput {
  std::vector<double> s;        // posterior LLR estimates, positive favors bit 0
  std::vector<uint8_t> hard;    // 1 iff s[v] < 0
};

struct DecodeOptions {
  bool record_tape = false;
  bool early_exit = false;        // stop once the hard decision is a codeword
  bool single_precision = false;  // run message passing in float (no tape)
};

struct DecodeStats {
  uint64_t cn_multiplications = 0;  // multiplications inside check-node updates
  int iterations_run = 0;
};

struct DecodeResult {
  SoftOutput output;
  std::optional<DecodeTape> tape;
  DecodeStats stats;
};

/// Run `iterations` flooding iterations of vn_update → cn_update → marginalize.
/// Pure function of (code, params, llr); concurrent calls are safe.
DecodeResult decode(const LinearCode& code, const DecoderParams& params,
                    std::span<const double> llr, const DecodeOptions& options = {});

/// true iff H·hardᵀ = 0 over GF(2).
bool syndrome_check(const LinearCode& code, std::span<const uint8_t> hard);

// Per-message kernels. The engine fuses these; they are kept callable for
// tests and as the documented reference semantics.

/// Eq: μ_{v,c} = l_v + Σ incoming (incoming excludes the target edge).
double vn_update(double llr, std::span<const double> incoming_excl);
/// 2·atanh(∏ tanh(μ/2)) with LLR and atanh-argument clamps.
double cn_update_spa(std::span<const double> incoming_excl);
/// min |μ| · ∏ sign(μ), sign(0) = +1.
double cn_update_ms(std::span<const double> incoming_excl);
/// ReLU(min |μ| − β) · ∏ sign(μ).
double cn_update_oms(std::span<const double> incoming_excl, double beta);
/// ReLU(min |μ| − β_edge) · ∏ sign(μ); β may be negative.
double cn_update_noms(std::span<const double> incoming_excl, double beta_edge);
/// 2·atanh(∏ μ) on tanh-domain inputs, product clamped to ±(1 − kAtanhEps).
double cn_update_nspa(std::span<const double> incoming_tanh_excl);
/// s_v = l_v + Σ incoming (all incident edges).
double marginalize(double llr, std::span<const double> incoming_all);

}  // namespace nomsdec
