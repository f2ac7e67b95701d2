#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nomsdec/channel.hpp"
#include "nomsdec/decoder.hpp"
#include "nomsdec/linear_code.hpp"

namespace nomsdec {

struct TrainConfig {
  int minibatches = 20000;
  int batch_size = 120;                 // must be divisible by snr_set_db.size()
  std::vector<double> snr_set_db = {1, 2, 3, 4, 5, 6, 7, 8};
  double learning_rate = 0.1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int iterations = 5;
  Tying tying = Tying::PerEdge;
  double init_sigma = 1.0;              // offsets ~ N(0, init_sigma²)
  uint64_t seed = 1;
  int eval_every = 0;                   // checkpoint cadence, 0 = off
  int heldout_frames = 1024;            // held-out set size for loss reporting
  // Mean cross-entropy over all T iteration outputs (default) or the final
  // iteration only. Final-only training on the systematic BCH parity checks
  // collapses to a channel passthrough (the last layer's offsets grow until
  // every message dies), so the per-iteration loss is the default.
  bool multiloss = true;
  int workers = 1;                      // per-frame parallelism inside a minibatch
};

/// Per-minibatch gradient. For min-sum-family params d_offsets is congruent
/// to DecoderParams.offsets (tied slots accumulate the sum of their edges);
/// for NSPA d_weights is congruent to NspaWeights.flat.
struct GradientBuffer {
  std::vector<double> d_offsets;
  std::vector<double> d_weights;
  double loss_value = 0.0;
};

struct AdamState {
  std::vector<double> m, v;
  int64_t step = 0;

  explicit AdamState(size_t size = 0) : m(size, 0.0), v(size, 0.0) {}
};

/// H(x, u) = −(1/n)·Σ_v [x_v·log σ(u_v) + (1−x_v)·log(1−σ(u_v))], computed in
/// log1p form (no overflow for any finite u). u is the bit1-positive soft
/// value; decoder outputs enter as u = −s.
double loss_cross_entropy(std::span<const double> u, std::span<const uint8_t> x);

/// Cross-entropy of a decoder soft output against the transmitted bits.
double decoder_loss(std::span<const double> s, std::span<const uint8_t> x);

/// Reverse-mode gradients of the (final-iteration, or multiloss) decoder
/// cross-entropy w.r.t. the offsets, through the recorded tape. Subgradient
/// conventions: ReLU'(0) = 0, min routes to the recorded argmin edge only,
/// sign() is constant.
GradientBuffer backward(const LinearCode& code, const DecoderParams& params,
                        const DecodeTape& tape, std::span<const uint8_t> truth,
                        bool multiloss = false);

/// Same for the weighted sum-product decoder; clamped regions pass zero
/// gradient.
GradientBuffer backward_nspa(const LinearCode& code, const DecoderParams& params,
                             const DecodeTape& tape, std::span<const uint8_t> truth,
                             bool multiloss = false);

struct Minibatch {
  std::vector<std::vector<double>> llr;  // batch_size frames
  std::vector<uint8_t> truth;            // all-zeros codeword, shared by every frame
  std::vector<double> snr_db_of_frame;
};

/// Stratified all-zeros minibatch: batch_size/|snr_set| frames per SNR, in
/// snr_set order.
Minibatch make_minibatch(const TrainConfig& cfg, const LinearCode& code, Rng& rng);

/// One bias-corrected Adam update, in place.
void adam_step(AdamState& state, std::vector<double>& params,
               const std::vector<double>& grads, const TrainConfig& cfg);

struct TrainLogRow {
  int minibatch = 0;
  double mean_loss = 0.0;
  double grad_norm = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  DecoderParams params;
  AdamState adam;
  std::vector<TrainLogRow> log;
  double heldout_initial = 0.0;  // held-out loss with the initial parameters
  double heldout_final = 0.0;
  std::string data_rng_state;    // training-data stream after the last minibatch
};

/// Called every eval_every minibatches (and once on non-finite-loss abort)
/// with the current state; typically writes a checkpoint.
using CheckpointSink =
    std::function<void(int minibatch, const DecoderParams&, const AdamState&, const Rng&)>;

/// Thrown when a minibatch produces a non-finite loss or gradient; the last
/// finite parameters were handed to the checkpoint sink before the throw.
class TrainDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minibatch SGD (Adam) over the unrolled decoder: make_minibatch →
/// decode(record_tape) → backward → adam_step, cfg.minibatches times.
/// variant must be Noms or Nspa.
TrainResult train(const LinearCode& code, Variant variant, const TrainConfig& cfg,
                  const CheckpointSink& sink = nullptr);

/// Re-tie offsets under a coarser/finer scheme; merged slots take the mean of
/// their constituents.
DecoderParams tie_offsets(const LinearCode& code, const DecoderParams& params, Tying scheme);

/// Trainable-parameter count: NOMS per-edge = E·T (tied schemes: slot count);
/// NSPA = nT + T·Σ_v d_v(d_v−1) + n + E by structural enumeration.
size_t count_parameters(const LinearCode& code, Variant variant, int iterations,
                        Tying tying = Tying::PerEdge);

}  // namespace nomsdec
