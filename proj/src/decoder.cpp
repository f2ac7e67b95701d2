#include "nomsdec/decoder.hpp"

#include <algorithm>
#include <cmath>

namespace nomsdec {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Spa: return "spa";
    case Variant::MinSum: return "ms";
    case Variant::Oms: return "oms";
    case Variant::Noms: return "noms";
    case Variant::Nspa: return "nspa";
  }
  return "?";
}

Variant variant_from_name(const std::string& s) {
  if (s == "spa") return Variant::Spa;
  if (s == "ms" || s == "min-sum" || s == "minsum") return Variant::MinSum;
  if (s == "oms") return Variant::Oms;
  if (s == "noms") return Variant::Noms;
  if (s == "nspa") return Variant::Nspa;
  throw ConfigError("unknown decoder variant: " + s);
}

std::string tying_name(Tying t) {
  switch (t) {
    case Tying::PerEdge: return "per-edge";
    case Tying::PerIteration: return "per-iteration";
    case Tying::PerCheckNode: return "per-check-node";
    case Tying::Global: return "global";
  }
  return "?";
}

Tying tying_from_name(const std::string& s) {
  if (s == "per-edge") return Tying::PerEdge;
  if (s == "per-iteration") return Tying::PerIteration;
  if (s == "per-check-node") return Tying::PerCheckNode;
  if (s == "global") return Tying::Global;
  throw ConfigError("unknown tying scheme: " + s);
}

size_t tying_slot_count(const TannerGraph& graph, int iterations, Tying tying) {
  switch (tying) {
    case Tying::PerEdge: return static_cast<size_t>(iterations) * graph.edge_count;
    case Tying::PerIteration: return static_cast<size_t>(iterations);
    case Tying::PerCheckNode: return static_cast<size_t>(iterations) * graph.n_checks;
    case Tying::Global: return 1;
  }
  return 0;
}

std::vector<uint32_t> build_slot_table(const TannerGraph& graph, int iterations, Tying tying) {
  std::vector<uint32_t> table(static_cast<size_t>(iterations) * graph.edge_count);
  for (int t = 0; t < iterations; ++t) {
    for (int e = 0; e < graph.edge_count; ++e) {
      uint32_t slot = 0;
      switch (tying) {
        case Tying::PerEdge: slot = static_cast<uint32_t>(t) * graph.edge_count + e; break;
        case Tying::PerIteration: slot = static_cast<uint32_t>(t); break;
        case Tying::PerCheckNode:
          slot = static_cast<uint32_t>(t) * graph.n_checks + graph.edge_check[e];
          break;
        case Tying::Global: slot = 0; break;
      }
      table[static_cast<size_t>(t) * graph.edge_count + e] = slot;
    }
  }
  return table;
}

DecoderParams DecoderParams::spa(int iterations) {
  DecoderParams p;
  p.variant = Variant::Spa;
  p.iterations = iterations;
  return p;
}

DecoderParams DecoderParams::min_sum(int iterations) {
  DecoderParams p;
  p.variant = Variant::MinSum;
  p.iterations = iterations;
  return p;
}

DecoderParams DecoderParams::oms(int iterations, double beta) {
  DecoderParams p;
  p.variant = Variant::Oms;
  p.iterations = iterations;
  p.tying = Tying::Global;
  p.offsets = {beta};
  return p;
}

DecoderParams DecoderParams::noms(const LinearCode& code, int iterations, Tying tying,
                                  double init_value) {
  DecoderParams p;
  p.variant = Variant::Noms;
  p.iterations = iterations;
  p.tying = tying;
  p.edge_count = code.edge_count();
  p.n_vars = code.n();
  p.offsets.assign(tying_slot_count(code.graph(), iterations, tying), init_value);
  p.slot_of = build_slot_table(code.graph(), iterations, tying);
  return p;
}

DecoderParams DecoderParams::nspa(const LinearCode& code, int iterations) {
  DecoderParams p;
  p.variant = Variant::Nspa;
  p.iterations = iterations;
  p.edge_count = code.edge_count();
  p.n_vars = code.n();
  p.weights.iterations = iterations;
  p.weights.n = code.n();
  p.weights.edge_count = code.edge_count();
  p.weights.fanin_total = code.graph().fanin_total;
  p.weights.flat.assign(p.weights.size(), 1.0);
  return p;
}

// ---------------------------------------------------------------------------
// Per-message kernels

namespace {

inline double clamp_llr(double x) { return std::clamp(x, -kLlrClamp, kLlrClamp); }

inline double clamp_tanh_product(double p) {
  return std::clamp(p, -(1.0 - kAtanhEps), 1.0 - kAtanhEps);
}

inline bool is_negative(double x) { return x < 0.0; }  // sign(0) = +1

}  // namespace

double vn_update(double llr, std::span<const double> incoming_excl) {
  double s = llr;
  for (double m : incoming_excl) s += m;
  return s;
}

double cn_update_spa(std::span<const double> incoming_excl) {
  double p = 1.0;
  for (double m : incoming_excl) p *= std::tanh(clamp_llr(m) / 2.0);
  return 2.0 * std::atanh(clamp_tanh_product(p));
}

double cn_update_ms(std::span<const double> incoming_excl) {
  return cn_update_noms(incoming_excl, 0.0);
}

double cn_update_oms(std::span<const double> incoming_excl, double beta) {
  return cn_update_noms(incoming_excl, beta);
}

double cn_update_noms(std::span<const double> incoming_excl, double beta_edge) {
  double min_mag = std::numeric_limits<double>::infinity();
  bool neg = false;
  for (double m : incoming_excl) {
    min_mag = std::min(min_mag, std::fabs(m));
    neg ^= is_negative(m);
  }
  double mag = min_mag - beta_edge;
  if (mag < 0.0) mag = 0.0;
  return neg ? -mag : mag;
}

double cn_update_nspa(std::span<const double> incoming_tanh_excl) {
  double p = 1.0;
  for (double m : incoming_tanh_excl) p *= m;
  return 2.0 * std::atanh(clamp_tanh_product(p));
}

double marginalize(double llr, std::span<const double> incoming_all) {
  double s = llr;
  for (double m : incoming_all) s += m;
  return s;
}

// ---------------------------------------------------------------------------
// Engine

namespace {

// The double-precision atanh guard 1 − 1e−12 rounds to 1.0f in float, which
// would let atanh return inf; the float path gets a clamp sized to its own
// epsilon.
template <typename F>
inline constexpr F atanh_limit = F(1.0 - kAtanhEps);
template <>
inline constexpr float atanh_limit<float> = 1.0f - 1e-6f;

template <typename F>
struct Scratch {
  std::vector<F> v2c, c2v_prev, c2v, soft, vn_total;
  std::vector<F> th, pre, suf;  // per-check products (SPA/NSPA)

  void resize(const TannerGraph& g) {
    v2c.assign(g.edge_count, F(0));
    c2v_prev.assign(g.edge_count, F(0));
    c2v.assign(g.edge_count, F(0));
    soft.assign(g.n_vars, F(0));
    vn_total.assign(g.n_vars, F(0));
    int max_cn = 0;
    for (int d : g.cn_degree) max_cn = std::max(max_cn, d);
    th.assign(max_cn, F(0));
    pre.assign(max_cn + 1, F(0));
    suf.assign(max_cn + 1, F(0));
  }
};

template <typename F>
void run_decode(const LinearCode& code, const DecoderParams& params, std::span<const double> llr,
                const DecodeOptions& options, DecodeTape* tape, SoftOutput& out,
                DecodeStats& stats) {
  const TannerGraph& g = code.graph();
  const int T = params.iterations;
  const int E = g.edge_count;
  const int n = g.n_vars;
  const bool ms_family = params.is_min_sum_family();
  const bool nspa = params.variant == Variant::Nspa;

  Scratch<F> ws;
  ws.resize(g);

  if (tape) {
    tape->variant = params.variant;
    tape->iterations = T;
    tape->edge_count = E;
    tape->n = n;
    tape->llr.assign(llr.begin(), llr.end());
    tape->v2c.assign(static_cast<size_t>(T) * E, 0.0);
    tape->c2v.assign(static_cast<size_t>(T) * E, 0.0);
    tape->soft.assign(static_cast<size_t>(T) * n, 0.0);
    if (ms_family) {
      tape->argmin_edge.assign(static_cast<size_t>(T) * E, 0);
      tape->relu_active.assign(static_cast<size_t>(T) * E, 0);
    }
    if (nspa) {
      tape->a_clamped.assign(static_cast<size_t>(T) * E, 0);
      tape->p_clamped.assign(static_cast<size_t>(T) * E, 0);
    }
  }

  std::vector<F> fl(llr.begin(), llr.end());
  stats.iterations_run = T;

  for (int t = 0; t < T; ++t) {
    // VN update. μ_{v,c}^t = l_v + Σ_{c'≠c} μ_{c',v}^{t-1}; at t=0 all-prior
    // messages are zero. NSPA applies per-edge weights and emits tanh-domain
    // messages, so its exclusion sums are computed directly.
    if (!nspa) {
      for (int v = 0; v < n; ++v) {
        F total = fl[v];
        for (uint32_t e : g.edges_of_var(v)) total += ws.c2v_prev[e];
        ws.vn_total[v] = total;
      }
      for (int e = 0; e < E; ++e) ws.v2c[e] = ws.vn_total[g.edge_var[e]] - ws.c2v_prev[e];
    } else {
      const NspaWeights& W = params.weights;
      for (int v = 0; v < n; ++v) {
        auto edges = g.edges_of_var(v);
        for (uint32_t e : edges) {
          F a = static_cast<F>(W.flat[W.in_index(t, v)]) * fl[v];
          uint32_t slot = g.fanin_base[e];
          for (uint32_t ein : edges) {
            if (ein == e) continue;
            a += static_cast<F>(W.flat[W.edge_index(t, slot++)]) * ws.c2v_prev[ein];
          }
          if (tape) tape->a_clamped[tape->te(t, e)] = a >= F(kLlrClamp) || a <= F(-kLlrClamp);
          a = std::clamp(a, F(-kLlrClamp), F(kLlrClamp));
          ws.v2c[e] = std::tanh(a / F(2));
        }
      }
    }

    if (tape) {
      for (int e = 0; e < E; ++e) tape->v2c[tape->te(t, e)] = static_cast<double>(ws.v2c[e]);
    }

    // CN update.
    if (ms_family) {
      for (int c = 0; c < g.n_checks; ++c) {
        auto edges = g.edges_of_check(c);
        // Two smallest magnitudes with their edges; ties keep the lowest
        // edge id (canonical order scan) so the backward pass is unique.
        F min1 = std::numeric_limits<F>::infinity(), min2 = min1;
        uint32_t e1 = edges.empty() ? 0 : edges[0], e2 = e1;
        bool parity = false;
        for (uint32_t e : edges) {
          F mag = std::fabs(ws.v2c[e]);
          parity ^= is_negative(ws.v2c[e]);
          if (mag < min1) {
            min2 = min1;
            e2 = e1;
            min1 = mag;
            e1 = e;
          } else if (mag < min2) {
            min2 = mag;
            e2 = e;
          }
        }
        for (uint32_t e : edges) {
          F m = (e == e1) ? min2 : min1;
          F mag = m - static_cast<F>(params.offset_at(t, e));
          bool active = mag > F(0);
          if (!active) mag = F(0);
          bool neg = parity ^ is_negative(ws.v2c[e]);
          ws.c2v[e] = neg ? -mag : mag;
          if (tape) {
            tape->argmin_edge[tape->te(t, e)] = (e == e1) ? e2 : e1;
            tape->relu_active[tape->te(t, e)] = active;
          }
        }
      }
    } else {
      // SPA/NSPA product rule via prefix/suffix partial products: no
      // divisions, exact zero handling, deterministic order.
      for (int c = 0; c < g.n_checks; ++c) {
        auto edges = g.edges_of_check(c);
        const int d = static_cast<int>(edges.size());
        for (int i = 0; i < d; ++i) {
          F m = ws.v2c[edges[i]];
          ws.th[i] = nspa ? m : std::tanh(std::clamp(m, F(-kLlrClamp), F(kLlrClamp)) / F(2));
        }
        ws.pre[0] = F(1);
        for (int i = 0; i < d; ++i) ws.pre[i + 1] = ws.pre[i] * ws.th[i];
        ws.suf[d] = F(1);
        for (int i = d - 1; i >= 0; --i) ws.suf[i] = ws.suf[i + 1] * ws.th[i];
        stats.cn_multiplications += static_cast<uint64_t>(2 * d);
        for (int i = 0; i < d; ++i) {
          F p = ws.pre[i] * ws.suf[i + 1];
          const F lim = atanh_limit<F>;
          if (tape && nspa) tape->p_clamped[tape->te(t, edges[i])] = p >= lim || p <= -lim;
          p = std::clamp(p, -lim, lim);
          ws.c2v[edges[i]] = F(2) * std::atanh(p);
          stats.cn_multiplications += 2;  // the excluded product and the 2x scale
        }
      }
    }

    if (tape) {
      for (int e = 0; e < E; ++e) tape->c2v[tape->te(t, e)] = static_cast<double>(ws.c2v[e]);
    }

    // Marginalization, Σ over all incident edges (weighted for NSPA).
    for (int v = 0; v < n; ++v) {
      F s;
      if (!nspa) {
        s = fl[v];
        for (uint32_t e : g.edges_of_var(v)) s += ws.c2v[e];
      } else {
        const NspaWeights& W = params.weights;
        s = static_cast<F>(W.flat[W.out_ch_index(v)]) * fl[v];
        for (uint32_t e : g.edges_of_var(v)) {
          s += static_cast<F>(W.flat[W.out_edge_index(e)]) * ws.c2v[e];
        }
      }
      ws.soft[v] = s;
      if (tape) tape->soft[tape->tv(t, v)] = static_cast<double>(s);
    }

    std::swap(ws.c2v_prev, ws.c2v);

    if (options.early_exit && t + 1 < T) {
      std::vector<uint8_t> hard(n);
      for (int v = 0; v < n; ++v) hard[v] = ws.soft[v] < F(0) ? 1 : 0;
      if (syndrome_check(code, hard)) {
        stats.iterations_run = t + 1;
        break;
      }
    }
  }

  out.s.resize(n);
  out.hard.resize(n);
  for (int v = 0; v < n; ++v) {
    out.s[v] = static_cast<double>(ws.soft[v]);
    out.hard[v] = ws.soft[v] < F(0) ? 1 : 0;
  }
}

}  // namespace

DecodeResult decode(const LinearCode& code, const DecoderParams& params,
                    std::span<const double> llr, const DecodeOptions& options) {
  if (static_cast<int>(llr.size()) != code.n())
    throw ConfigError("decode: llr length " + std::to_string(llr.size()) + ", expected n=" +
                      std::to_string(code.n()));
  if (params.iterations < 1) throw ConfigError("decode: iterations must be >= 1");
  const int E = code.edge_count();
  if (params.variant == Variant::Noms) {
    if (params.edge_count != E)
      throw ConfigError("decode: NOMS offsets built for E=" + std::to_string(params.edge_count) +
                        ", code has E=" + std::to_string(E));
    if (params.slot_of.size() != static_cast<size_t>(params.iterations) * E)
      throw ConfigError("decode: offset table shape does not match T x E");
  }
  if (params.variant == Variant::Oms && params.offsets.size() != 1)
    throw ConfigError("decode: OMS requires exactly one offset");
  if (params.variant == Variant::Nspa) {
    if (params.weights.edge_count != E || params.weights.n != code.n() ||
        params.weights.iterations != params.iterations ||
        params.weights.fanin_total != code.graph().fanin_total ||
        params.weights.flat.size() != params.weights.size())
      throw ConfigError("decode: NSPA weight shapes do not match the code/iterations");
  }
  if (options.single_precision && options.record_tape)
    throw ConfigError("decode: tape recording requires double precision");
  if (options.early_exit && options.record_tape)
    throw ConfigError("decode: tape recording requires the full fixed-iteration schedule");

  DecodeResult res;
  if (options.record_tape) res.tape.emplace();
  if (options.single_precision) {
    run_decode<float>(code, params, llr, options, nullptr, res.output, res.stats);
  } else {
    run_decode<double>(code, params, llr, options, res.tape ? &*res.tape : nullptr, res.output,
                       res.stats);
  }
  return res;
}

bool syndrome_check(const LinearCode& code, std::span<const uint8_t> hard) {
  return code.syndrome_ok(hard);
}

}  // namespace nomsdec
