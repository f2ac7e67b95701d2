#include "nomsdec/training.hpp"

#include <chrono>
#include <cmath>
#include <thread>

namespace nomsdec {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow.
double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

inline bool is_negative(double x) { return x < 0.0; }

uint32_t slot_for(const DecoderParams& p, int t, uint32_t e) {
  if (!p.slot_of.empty()) return p.slot_of[static_cast<size_t>(t) * p.edge_count + e];
  return 0;  // single tied offset (OMS)
}

// d(loss)/d(s^t_v) for the iteration outputs that carry loss. The decoder
// soft value s is bit0-positive; the cross-entropy pairs x with σ(-s).
std::vector<double> soft_grad(std::span<const double> s, std::span<const uint8_t> x,
                              double scale) {
  std::vector<double> g(s.size());
  const double inv_n = scale / static_cast<double>(s.size());
  for (size_t v = 0; v < s.size(); ++v) {
    g[v] = (static_cast<double>(x[v]) - stable_sigmoid(-s[v])) * inv_n;
  }
  return g;
}

void check_tape(const DecoderParams& params, const DecodeTape& tape,
                std::span<const uint8_t> truth) {
  if (tape.variant != params.variant || tape.iterations != params.iterations)
    throw ConfigError("backward: tape does not match params (variant/iterations)");
  if (static_cast<int>(truth.size()) != tape.n)
    throw ConfigError("backward: truth length does not match tape");
}

}  // namespace

double loss_cross_entropy(std::span<const double> u, std::span<const uint8_t> x) {
  if (u.size() != x.size()) throw ConfigError("loss_cross_entropy: length mismatch");
  double acc = 0.0;
  for (size_t v = 0; v < u.size(); ++v) {
    // x·log σ(u) + (1−x)·log σ(−u)
    acc += x[v] ? log_sigmoid(u[v]) : log_sigmoid(-u[v]);
  }
  return -acc / static_cast<double>(u.size());
}

double decoder_loss(std::span<const double> s, std::span<const uint8_t> x) {
  double acc = 0.0;
  for (size_t v = 0; v < s.size(); ++v) {
    acc += x[v] ? log_sigmoid(-s[v]) : log_sigmoid(s[v]);
  }
  return -acc / static_cast<double>(s.size());
}

GradientBuffer backward(const LinearCode& code, const DecoderParams& params,
                        const DecodeTape& tape, std::span<const uint8_t> truth, bool multiloss) {
  if (!params.is_min_sum_family())
    throw ConfigError("backward: params variant is not in the min-sum family");
  check_tape(params, tape, truth);

  const TannerGraph& g = code.graph();
  const int T = tape.iterations;
  const int E = tape.edge_count;
  const int n = tape.n;

  GradientBuffer out;
  out.d_offsets.assign(params.slot_count(), 0.0);

  // Loss on the final iteration's soft output; with multiloss, the mean of
  // the per-iteration losses.
  const double scale = multiloss ? 1.0 / T : 1.0;
  {
    std::span<const double> s_final(tape.soft.data() + tape.tv(T - 1, 0), n);
    out.loss_value = decoder_loss(s_final, truth);
    if (multiloss) {
      double acc = out.loss_value;
      for (int t = 0; t < T - 1; ++t) {
        acc += decoder_loss({tape.soft.data() + tape.tv(t, 0), static_cast<size_t>(n)}, truth);
      }
      out.loss_value = acc / T;
    }
  }

  std::vector<double> d_dense(static_cast<size_t>(T) * E, 0.0);  // per (t, edge) offset grads
  std::vector<double> g_c2v(E, 0.0), g_v2c(E, 0.0);

  for (int t = T - 1; t >= 0; --t) {
    // Marginalization backward: s^t_v = l_v + Σ_{e∈N(v)} μ^t_{c,v}.
    if (t == T - 1 || multiloss) {
      auto gs = soft_grad({tape.soft.data() + tape.tv(t, 0), static_cast<size_t>(n)}, truth, scale);
      for (int v = 0; v < n; ++v) {
        for (uint32_t e : g.edges_of_var(v)) g_c2v[e] += gs[v];
      }
    }

    // Check-node backward. Gradients flow only through the ReLU branch:
    // d out / d β = −S when active, and d out / d μ_in is nonzero only at the
    // recorded excluded-min edge; sign factors are constants.
    std::fill(g_v2c.begin(), g_v2c.end(), 0.0);
    for (int c = 0; c < g.n_checks; ++c) {
      auto edges = g.edges_of_check(c);
      bool parity = false;
      for (uint32_t e : edges) parity ^= is_negative(tape.v2c[tape.te(t, e)]);
      for (uint32_t e : edges) {
        const size_t te = tape.te(t, e);
        if (!tape.relu_active[te]) continue;
        const double u = g_c2v[e];
        if (u == 0.0) continue;
        const bool neg = parity ^ is_negative(tape.v2c[te]);
        const double signed_u = neg ? -u : u;
        d_dense[te] -= signed_u;
        const uint32_t j = tape.argmin_edge[te];
        const size_t tj = tape.te(t, j);
        g_v2c[j] += is_negative(tape.v2c[tj]) ? -signed_u : signed_u;
      }
    }

    // Variable-node backward: μ^t_{v,c} = l_v + Σ_{c'≠c} μ^{t−1}_{c',v}.
    if (t > 0) {
      std::fill(g_c2v.begin(), g_c2v.end(), 0.0);
      for (int v = 0; v < n; ++v) {
        auto edges = g.edges_of_var(v);
        double total = 0.0;
        for (uint32_t e : edges) total += g_v2c[e];
        for (uint32_t e : edges) g_c2v[e] = total - g_v2c[e];
      }
    }
  }

  // Reduce per-edge contributions onto tied slots in canonical (t, e) order.
  if (!out.d_offsets.empty()) {
    for (int t = 0; t < T; ++t) {
      for (uint32_t e = 0; e < static_cast<uint32_t>(E); ++e) {
        out.d_offsets[slot_for(params, t, e)] += d_dense[static_cast<size_t>(t) * E + e];
      }
    }
  }
  return out;
}

GradientBuffer backward_nspa(const LinearCode& code, const DecoderParams& params,
                             const DecodeTape& tape, std::span<const uint8_t> truth,
                             bool multiloss) {
  if (params.variant != Variant::Nspa) throw ConfigError("backward_nspa: params variant is not nspa");
  check_tape(params, tape, truth);

  const TannerGraph& g = code.graph();
  const NspaWeights& W = params.weights;
  const int T = tape.iterations;
  const int E = tape.edge_count;
  const int n = tape.n;

  GradientBuffer out;
  out.d_weights.assign(W.flat.size(), 0.0);

  const double scale = multiloss ? 1.0 / T : 1.0;
  {
    std::span<const double> s_final(tape.soft.data() + tape.tv(T - 1, 0), n);
    out.loss_value = decoder_loss(s_final, truth);
    if (multiloss) {
      double acc = out.loss_value;
      for (int t = 0; t < T - 1; ++t) {
        acc += decoder_loss({tape.soft.data() + tape.tv(t, 0), static_cast<size_t>(n)}, truth);
      }
      out.loss_value = acc / T;
    }
  }

  std::vector<double> g_c2v(E, 0.0), g_tau(E, 0.0);
  int max_cn = 0;
  for (int d : g.cn_degree) max_cn = std::max(max_cn, d);
  std::vector<double> th(max_cn), pre(max_cn + 1), suf(max_cn + 1);
  std::vector<double> g_pre(max_cn + 1), g_suf(max_cn + 1);

  for (int t = T - 1; t >= 0; --t) {
    // Marginalization backward: s^t_v = w_out,v·l_v + Σ w_out,e·μ^t_{c,v}.
    if (t == T - 1 || multiloss) {
      auto gs = soft_grad({tape.soft.data() + tape.tv(t, 0), static_cast<size_t>(n)}, truth, scale);
      for (int v = 0; v < n; ++v) {
        out.d_weights[W.out_ch_index(v)] += gs[v] * tape.llr[v];
        for (uint32_t e : g.edges_of_var(v)) {
          out.d_weights[W.out_edge_index(e)] += gs[v] * tape.c2v[tape.te(t, e)];
          g_c2v[e] += gs[v] * W.flat[W.out_edge_index(e)];
        }
      }
    }

    // Check-node backward through μ = 2·atanh(clamp(∏ τ)), reverse of the
    // prefix/suffix forward; clamped products pass zero gradient.
    std::fill(g_tau.begin(), g_tau.end(), 0.0);
    for (int c = 0; c < g.n_checks; ++c) {
      auto edges = g.edges_of_check(c);
      const int d = static_cast<int>(edges.size());
      for (int i = 0; i < d; ++i) th[i] = tape.v2c[tape.te(t, edges[i])];
      pre[0] = 1.0;
      for (int i = 0; i < d; ++i) pre[i + 1] = pre[i] * th[i];
      suf[d] = 1.0;
      for (int i = d - 1; i >= 0; --i) suf[i] = suf[i + 1] * th[i];

      std::fill(g_pre.begin(), g_pre.begin() + d + 1, 0.0);
      std::fill(g_suf.begin(), g_suf.begin() + d + 1, 0.0);
      const double lim = 1.0 - kAtanhEps;
      for (int i = 0; i < d; ++i) {
        const double u = g_c2v[edges[i]];
        if (u == 0.0) continue;
        if (tape.p_clamped[tape.te(t, edges[i])]) continue;  // clamped: zero gradient
        double p = std::clamp(pre[i] * suf[i + 1], -lim, lim);
        const double gp = u * 2.0 / (1.0 - p * p);
        g_pre[i] += gp * suf[i + 1];
        g_suf[i + 1] += gp * pre[i];
      }
      for (int i = d; i >= 1; --i) {  // pre[i] = pre[i−1]·th[i−1]
        g_pre[i - 1] += g_pre[i] * th[i - 1];
        g_tau[edges[i - 1]] += g_pre[i] * pre[i - 1];
      }
      for (int i = 0; i < d; ++i) {  // suf[i] = suf[i+1]·th[i]
        g_suf[i + 1] += g_suf[i] * th[i];
        g_tau[edges[i]] += g_suf[i] * suf[i + 1];
      }
    }

    // Variable-node backward through τ = tanh(clamp(a)/2) and the weighted
    // affine pre-activation; the clamp state comes off the tape.
    std::fill(g_c2v.begin(), g_c2v.end(), 0.0);
    for (int v = 0; v < n; ++v) {
      auto edges = g.edges_of_var(v);
      for (uint32_t e : edges) {
        const double gt = g_tau[e];
        if (gt == 0.0) continue;
        if (tape.a_clamped[tape.te(t, e)]) continue;  // clamped: zero gradient
        const double tau = tape.v2c[tape.te(t, e)];
        const double ga = gt * (1.0 - tau * tau) / 2.0;
        out.d_weights[W.in_index(t, v)] += ga * tape.llr[v];
        if (t > 0) {
          uint32_t slot = g.fanin_base[e];
          for (uint32_t ein : edges) {
            if (ein == e) continue;
            const double prev = tape.c2v[tape.te(t - 1, ein)];
            out.d_weights[W.edge_index(t, slot)] += ga * prev;
            g_c2v[ein] += ga * W.flat[W.edge_index(t, slot)];
            ++slot;
          }
        }
      }
    }
  }
  return out;
}

Minibatch make_minibatch(const TrainConfig& cfg, const LinearCode& code, Rng& rng) {
  if (cfg.snr_set_db.empty()) throw ConfigError("make_minibatch: empty SNR set");
  if (cfg.batch_size % static_cast<int>(cfg.snr_set_db.size()) != 0)
    throw ConfigError("make_minibatch: batch_size " + std::to_string(cfg.batch_size) +
                      " not divisible by |snr_set| = " + std::to_string(cfg.snr_set_db.size()));
  const int per_snr = cfg.batch_size / static_cast<int>(cfg.snr_set_db.size());

  Minibatch mb;
  mb.truth.assign(code.n(), 0);
  mb.llr.reserve(cfg.batch_size);
  mb.snr_db_of_frame.reserve(cfg.batch_size);
  for (double snr : cfg.snr_set_db) {
    ChannelConfig ch(snr, code.rate());
    for (int i = 0; i < per_snr; ++i) {
      mb.llr.push_back(all_zeros_llr(ch, code.n(), rng));
      mb.snr_db_of_frame.push_back(snr);
    }
  }
  return mb;
}

void adam_step(AdamState& state, std::vector<double>& params, const std::vector<double>& grads,
               const TrainConfig& cfg) {
  if (state.m.size() != params.size() || grads.size() != params.size())
    throw ConfigError("adam_step: shape mismatch");
  ++state.step;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    const double gi = grads[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * gi;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * gi * gi;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
  }
}

namespace {

std::vector<double>& trainable(DecoderParams& p) {
  return p.variant == Variant::Nspa ? p.weights.flat : p.offsets;
}

const std::vector<double>& grad_of(const GradientBuffer& g, Variant v) {
  return v == Variant::Nspa ? g.d_weights : g.d_offsets;
}

// Gradient of one frame; shared by the serial and threaded paths.
GradientBuffer frame_gradient(const LinearCode& code, const DecoderParams& params,
                              const std::vector<double>& llr, std::span<const uint8_t> truth,
                              bool multiloss) {
  DecodeOptions opt;
  opt.record_tape = true;
  auto res = decode(code, params, llr, opt);
  if (params.variant == Variant::Nspa) {
    return backward_nspa(code, params, *res.tape, truth, multiloss);
  }
  return backward(code, params, *res.tape, truth, multiloss);
}

}  // namespace

TrainResult train(const LinearCode& code, Variant variant, const TrainConfig& cfg,
                  const CheckpointSink& sink) {
  if (variant != Variant::Noms && variant != Variant::Nspa)
    throw ConfigError("train: variant must be noms or nspa");
  if (cfg.minibatches < 0 || cfg.batch_size < 1) throw ConfigError("train: bad minibatch config");

  TrainResult result;
  Rng init_rng = Rng::stream(cfg.seed, {0});
  Rng data_rng = Rng::stream(cfg.seed, {1});
  Rng heldout_rng = Rng::stream(cfg.seed, {2});

  if (variant == Variant::Noms) {
    result.params = DecoderParams::noms(code, cfg.iterations, cfg.tying, 0.0);
    for (double& b : result.params.offsets) b = cfg.init_sigma * init_rng.gaussian();
  } else {
    result.params = DecoderParams::nspa(code, cfg.iterations);
  }

  // Held-out frames for loss reporting, drawn from an independent stream.
  TrainConfig held_cfg = cfg;
  held_cfg.batch_size = std::max<int>(cfg.snr_set_db.size(),
                                      cfg.heldout_frames / cfg.snr_set_db.size() *
                                          cfg.snr_set_db.size());
  Minibatch heldout = make_minibatch(held_cfg, code, heldout_rng);

  auto heldout_loss = [&](const DecoderParams& p) {
    double acc = 0.0;
    for (const auto& llr : heldout.llr) {
      auto res = decode(code, p, llr);
      acc += decoder_loss(res.output.s, heldout.truth);
    }
    return acc / static_cast<double>(heldout.llr.size());
  };

  result.adam = AdamState(trainable(result.params).size());
  result.heldout_initial = heldout_loss(result.params);

  const auto t_start = std::chrono::steady_clock::now();
  std::vector<GradientBuffer> frame_grads(cfg.batch_size);

  for (int mb = 1; mb <= cfg.minibatches; ++mb) {
    Minibatch batch = make_minibatch(cfg, code, data_rng);

    if (cfg.workers > 1) {
      const int workers = std::min<int>(cfg.workers, cfg.batch_size);
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
          for (int f = w; f < cfg.batch_size; f += workers) {
            frame_grads[f] = frame_gradient(code, result.params, batch.llr[f], batch.truth,
                                            cfg.multiloss);
          }
        });
      }
      for (auto& th : pool) th.join();
    } else {
      for (int f = 0; f < cfg.batch_size; ++f) {
        frame_grads[f] = frame_gradient(code, result.params, batch.llr[f], batch.truth,
                                        cfg.multiloss);
      }
    }

    // Reduce in frame order so results do not depend on the worker count.
    std::vector<double> grad(trainable(result.params).size(), 0.0);
    double loss_sum = 0.0;
    for (int f = 0; f < cfg.batch_size; ++f) {
      const auto& fg = grad_of(frame_grads[f], variant);
      for (size_t i = 0; i < grad.size(); ++i) grad[i] += fg[i];
      loss_sum += frame_grads[f].loss_value;
    }
    const double inv_b = 1.0 / cfg.batch_size;
    double norm2 = 0.0;
    for (double& gi : grad) {
      gi *= inv_b;
      norm2 += gi * gi;
    }
    const double mean_loss = loss_sum * inv_b;

    if (!std::isfinite(mean_loss) || !std::isfinite(norm2)) {
      if (sink) sink(mb, result.params, result.adam, data_rng);
      throw TrainDivergence("train: non-finite loss/gradient at minibatch " + std::to_string(mb));
    }

    adam_step(result.adam, trainable(result.params), grad, cfg);
    result.params.trained_minibatches = mb;

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    result.log.push_back({mb, mean_loss, std::sqrt(norm2), wall});

    if (cfg.eval_every > 0 && mb % cfg.eval_every == 0 && sink) {
      sink(mb, result.params, result.adam, data_rng);
    }
  }

  result.heldout_final = heldout_loss(result.params);
  result.data_rng_state = data_rng.state_string();
  return result;
}

DecoderParams tie_offsets(const LinearCode& code, const DecoderParams& params, Tying scheme) {
  if (!params.is_min_sum_family() || params.offsets.empty())
    throw ConfigError("tie_offsets: params carry no offsets");
  const TannerGraph& g = code.graph();
  const int T = params.iterations;

  DecoderParams tied;
  tied.variant = Variant::Noms;
  tied.iterations = T;
  tied.tying = scheme;
  tied.edge_count = g.edge_count;
  tied.n_vars = g.n_vars;
  tied.slot_of = build_slot_table(g, T, scheme);
  tied.offsets.assign(tying_slot_count(g, T, scheme), 0.0);
  tied.trained_minibatches = params.trained_minibatches;

  std::vector<uint64_t> counts(tied.offsets.size(), 0);
  for (int t = 0; t < T; ++t) {
    for (uint32_t e = 0; e < static_cast<uint32_t>(g.edge_count); ++e) {
      uint32_t dst = tied.slot_of[static_cast<size_t>(t) * g.edge_count + e];
      tied.offsets[dst] += params.offset_at(t, e);
      ++counts[dst];
    }
  }
  for (size_t i = 0; i < tied.offsets.size(); ++i) {
    if (counts[i]) tied.offsets[i] /= static_cast<double>(counts[i]);
  }
  return tied;
}

size_t count_parameters(const LinearCode& code, Variant variant, int iterations, Tying tying) {
  const TannerGraph& g = code.graph();
  switch (variant) {
    case Variant::Spa:
    case Variant::MinSum:
      return 0;
    case Variant::Oms:
      return 1;
    case Variant::Noms:
      return tying_slot_count(g, iterations, tying);
    case Variant::Nspa:
      // nT input + T·Σ_v d_v(d_v−1) edge + n output-channel + E output-edge.
      return static_cast<size_t>(g.n_vars) * iterations +
             static_cast<size_t>(iterations) * g.fanin_total + g.n_vars + g.edge_count;
  }
  return 0;
}

}  // namespace nomsdec
