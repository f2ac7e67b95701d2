#include "nomsdec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace nomsdec {

namespace {

struct Tally {
  uint64_t frames = 0, bit_errors = 0, frame_errors = 0;

  void merge(const Tally& o) {
    frames += o.frames;
    bit_errors += o.bit_errors;
    frame_errors += o.frame_errors;
  }
};

constexpr uint64_t kFramesPerWorkerRound = 256;

// One worker's share of a round; the rng persists across rounds so the
// simulated stream depends only on (seed, snr index, worker id).
Tally simulate_frames(const LinearCode& code, const DecoderParams& params,
                      const ChannelConfig& ch, const EvalConfig& cfg, Rng& rng, uint64_t frames) {
  Tally t;
  const int n = code.n();
  const int k = code.k();
  DecodeOptions opt;
  opt.single_precision = cfg.single_precision;
  std::vector<uint8_t> msg(k);

  for (uint64_t f = 0; f < frames; ++f) {
    ReceivedFrame frame;
    if (cfg.all_zeros) {
      frame.llr = all_zeros_llr(ch, n, rng);
      frame.truth_bits.assign(n, 0);
    } else {
      for (int i = 0; i < k; ++i) msg[i] = rng.bit();
      auto codeword = code.encode(msg);
      frame = transmit(ch, modulate_bpsk(codeword), rng);
    }
    auto res = decode(code, params, frame.llr, opt);
    uint64_t errs = 0;
    for (int v = 0; v < n; ++v) errs += res.output.hard[v] != frame.truth_bits[v];
    t.frames += 1;
    t.bit_errors += errs;
    t.frame_errors += errs > 0;
  }
  return t;
}

}  // namespace

std::vector<BerPoint> run_ber(const LinearCode& code, const DecoderParams& params,
                              const EvalConfig& cfg) {
  if (cfg.snr_list_db.empty()) throw ConfigError("run_ber: empty SNR list");
  if (cfg.workers < 1) throw ConfigError("run_ber: workers must be >= 1");
  if (cfg.max_frames < cfg.min_frames)
    throw ConfigError("run_ber: max_frames below min_frames");

  const int n = code.n();
  std::vector<BerPoint> points;
  points.reserve(cfg.snr_list_db.size());

  for (size_t si = 0; si < cfg.snr_list_db.size(); ++si) {
    const double snr = cfg.snr_list_db[si];
    ChannelConfig ch(snr, code.rate(), cfg.seed);

    std::vector<Rng> rngs;
    rngs.reserve(cfg.workers);
    for (int w = 0; w < cfg.workers; ++w) {
      rngs.push_back(Rng::stream(cfg.seed, {static_cast<uint64_t>(si), static_cast<uint64_t>(w)}));
    }

    Tally total;
    while (true) {
      const bool met = total.frames >= cfg.min_frames && total.frame_errors >= cfg.min_frame_errors;
      if (met || total.frames >= cfg.max_frames) break;

      // Round sizes: equal chunks, trimmed so the grand total never exceeds
      // max_frames; leftover frames go to the lowest worker ids.
      uint64_t remaining = cfg.max_frames - total.frames;
      uint64_t per_worker = std::min<uint64_t>(kFramesPerWorkerRound,
                                               (remaining + cfg.workers - 1) / cfg.workers);
      std::vector<uint64_t> quota(cfg.workers, 0);
      uint64_t planned = 0;
      for (int w = 0; w < cfg.workers && planned < remaining; ++w) {
        quota[w] = std::min<uint64_t>(per_worker, remaining - planned);
        planned += quota[w];
      }

      std::vector<Tally> partial(cfg.workers);
      if (cfg.spawn_threads && cfg.workers > 1) {
        std::vector<std::thread> pool;
        pool.reserve(cfg.workers);
        for (int w = 0; w < cfg.workers; ++w) {
          pool.emplace_back([&, w]() {
            partial[w] = simulate_frames(code, params, ch, cfg, rngs[w], quota[w]);
          });
        }
        for (auto& th : pool) th.join();
      } else {
        for (int w = 0; w < cfg.workers; ++w) {
          partial[w] = simulate_frames(code, params, ch, cfg, rngs[w], quota[w]);
        }
      }
      for (int w = 0; w < cfg.workers; ++w) total.merge(partial[w]);
    }

    BerPoint p;
    p.ebn0_db = snr;
    p.frames = total.frames;
    p.bit_errors = total.bit_errors;
    p.frame_errors = total.frame_errors;
    const double total_bits = static_cast<double>(p.frames) * n;
    p.ber = total_bits > 0 ? static_cast<double>(p.bit_errors) / total_bits : 0.0;
    p.fer = p.frames > 0 ? static_cast<double>(p.frame_errors) / p.frames : 0.0;
    const double hw = 1.96 * std::sqrt(std::max(0.0, p.ber * (1.0 - p.ber) / total_bits));
    p.ci_lo = std::max(0.0, p.ber - hw);
    p.ci_hi = p.ber + hw;
    p.censored = !(p.frames >= cfg.min_frames && p.frame_errors >= cfg.min_frame_errors);
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<IterationHistogram> export_histograms(const DecoderParams& params, int bins) {
  if (!params.is_min_sum_family() || params.offsets.empty())
    throw ConfigError("export_histograms: params carry no offsets");
  if (bins < 1) throw ConfigError("export_histograms: bins must be >= 1");
  if (params.edge_count == 0)
    throw ConfigError("export_histograms: params lack edge shape (single-offset input)");

  std::vector<IterationHistogram> out;
  for (int t = 0; t < params.iterations; ++t) {
    IterationHistogram h;
    h.iteration = t + 1;
    std::vector<double> vals(params.edge_count);
    for (int e = 0; e < params.edge_count; ++e) vals[e] = params.offset_at(t, e);
    h.lo = *std::min_element(vals.begin(), vals.end());
    h.hi = *std::max_element(vals.begin(), vals.end());
    double width = (h.hi - h.lo) / bins;
    h.freq.assign(bins, 0);
    h.bin_lo.resize(bins);
    h.bin_hi.resize(bins);
    h.bin_center.resize(bins);
    for (int b = 0; b < bins; ++b) {
      h.bin_lo[b] = h.lo + b * width;
      h.bin_hi[b] = (b + 1 == bins) ? h.hi : h.lo + (b + 1) * width;
      h.bin_center[b] = width > 0 ? (h.bin_lo[b] + h.bin_hi[b]) / 2 : h.lo;
    }
    for (double v : vals) {
      int b = width > 0 ? std::min(bins - 1, static_cast<int>((v - h.lo) / width)) : 0;
      ++h.freq[b];
    }
    out.push_back(std::move(h));
  }
  return out;
}

namespace {

// SNR where the curve crosses a BER target, by log-linear interpolation
// between bracketing points; NaN when the curve never crosses it.
double snr_at_target(const std::vector<CurvePoint>& pts, double target) {
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    double y0 = pts[i].ber, y1 = pts[i + 1].ber;
    if (y0 <= 0 || y1 <= 0) continue;
    if ((y0 >= target && target >= y1) || (y0 <= target && target <= y1)) {
      if (y0 == y1) return pts[i].snr_db;
      double l0 = std::log10(y0), l1 = std::log10(y1), lt = std::log10(target);
      return pts[i].snr_db + (l0 - lt) / (l0 - l1) * (pts[i + 1].snr_db - pts[i].snr_db);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

GapReport compare_curves(const std::vector<NamedCurve>& curves,
                         const std::vector<double>& ber_targets) {
  if (curves.size() < 2) throw ConfigError("compare_curves: need at least two curves");
  GapReport rep;
  for (const auto& c : curves) rep.labels.push_back(c.label);

  // Ratio rows on the common SNR grid.
  std::map<double, int> counts;
  for (const auto& c : curves) {
    for (const auto& p : c.points) ++counts[p.snr_db];
  }
  for (const auto& [snr, cnt] : counts) {
    if (cnt != static_cast<int>(curves.size())) continue;
    RatioRow row;
    row.snr_db = snr;
    for (const auto& c : curves) {
      double ber = std::numeric_limits<double>::quiet_NaN();
      for (const auto& p : c.points) {
        if (p.snr_db == snr) ber = p.ber;
      }
      row.ber.push_back(ber);
    }
    for (double b : row.ber) row.ratio.push_back(row.ber[0] > 0 ? b / row.ber[0] : NAN);
    rep.ratios.push_back(std::move(row));
  }

  // dB gaps vs the first curve at each target.
  for (double target : ber_targets) {
    const double snr0 = snr_at_target(curves[0].points, target);
    for (size_t i = 1; i < curves.size(); ++i) {
      GapRow gr;
      gr.ber_target = target;
      gr.label_a = curves[0].label;
      gr.label_b = curves[i].label;
      gr.snr_a = snr0;
      gr.snr_b = snr_at_target(curves[i].points, target);
      gr.defined = std::isfinite(gr.snr_a) && std::isfinite(gr.snr_b);
      gr.gap_db = gr.defined ? gr.snr_a - gr.snr_b : std::numeric_limits<double>::quiet_NaN();
      rep.gaps.push_back(std::move(gr));
    }
  }
  return rep;
}

void write_ber_csv(std::ostream& out, const std::string& label,
                   const std::vector<BerPoint>& points, const std::string& manifest_ref) {
  if (!manifest_ref.empty()) out << "# manifest: " << manifest_ref << "\n";
  out << "label,ebn0_db,frames,bit_errors,frame_errors,ber,fer,ci_lo,ci_hi,censored\n";
  out.precision(12);
  std::string safe_label = label;
  for (char& c : safe_label) {
    if (c == ',') c = ';';  // labels must not split CSV fields
  }
  for (const auto& p : points) {
    out << safe_label << ',' << p.ebn0_db << ',' << p.frames << ',' << p.bit_errors << ','
        << p.frame_errors << ',' << p.ber << ',' << p.fer << ',' << p.ci_lo << ',' << p.ci_hi
        << ',' << (p.censored ? 1 : 0) << "\n";
  }
}

std::vector<NamedCurve> read_ber_csv(std::istream& in) {
  std::vector<NamedCurve> curves;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen && line.rfind("label,", 0) == 0) {
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 6) continue;
    const std::string& label = fields[0];
    CurvePoint pt{std::stod(fields[1]), std::stod(fields[5])};
    auto it = std::find_if(curves.begin(), curves.end(),
                           [&](const NamedCurve& c) { return c.label == label; });
    if (it == curves.end()) {
      curves.push_back({label, {pt}});
    } else {
      it->points.push_back(pt);
    }
  }
  return curves;
}

void write_histogram_csv(std::ostream& out, const IterationHistogram& h,
                         const std::string& manifest_ref) {
  if (!manifest_ref.empty()) out << "# manifest: " << manifest_ref << "\n";
  out << "# iteration " << h.iteration << ", offsets in [" << h.lo << ", " << h.hi << "]\n";
  out << "value,frequency,bin_lo,bin_hi\n";
  out.precision(12);
  for (size_t b = 0; b < h.freq.size(); ++b) {
    out << h.bin_center[b] << ',' << h.freq[b] << ',' << h.bin_lo[b] << ',' << h.bin_hi[b] << "\n";
  }
}

void write_gap_report_csv(std::ostream& out, const GapReport& rep,
                          const std::string& manifest_ref) {
  if (!manifest_ref.empty()) out << "# manifest: " << manifest_ref << "\n";
  out << "ber_target,baseline,curve,snr_baseline,snr_curve,gap_db,defined\n";
  out.precision(12);
  for (const auto& g : rep.gaps) {
    out << g.ber_target << ',' << g.label_a << ',' << g.label_b << ',' << g.snr_a << ','
        << g.snr_b << ',' << g.gap_db << ',' << (g.defined ? 1 : 0) << "\n";
  }
}

std::string format_gap_report(const GapReport& rep) {
  std::ostringstream out;
  out.precision(6);
  out << "BER ratios vs " << rep.labels[0] << " (common SNR grid):\n";
  out << "  snr_db";
  for (const auto& l : rep.labels) out << "  " << l;
  out << "\n";
  for (const auto& row : rep.ratios) {
    out << "  " << row.snr_db;
    for (size_t i = 0; i < row.ber.size(); ++i) {
      out << "  " << row.ber[i] << " (x" << row.ratio[i] << ")";
    }
    out << "\n";
  }
  out << "dB gaps vs " << rep.labels[0] << ":\n";
  for (const auto& g : rep.gaps) {
    out << "  BER " << g.ber_target << ": " << g.label_b;
    if (g.defined) {
      out << " gap " << g.gap_db << " dB (" << g.snr_a << " vs " << g.snr_b << ")\n";
    } else {
      out << " gap undefined (curve does not cross target)\n";
    }
  }
  return out.str();
}

}  // namespace nomsdec
