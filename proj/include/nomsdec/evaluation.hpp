#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nomsdec/channel.hpp"
#include "nomsdec/decoder.hpp"
#include "nomsdec/linear_code.hpp"

namespace nomsdec {

struct BerPoint {
  double ebn0_db = 0.0;
  uint64_t frames = 0;
  uint64_t bit_errors = 0;
  uint64_t frame_errors = 0;
  double ber = 0.0;
  double fer = 0.0;
  double ci_lo = 0.0;   // 95% normal-approximation interval on BER
  double ci_hi = 0.0;
  bool censored = false;  // hit max_frames before the stopping rule was met
};

struct EvalConfig {
  std::vector<double> snr_list_db;
  uint64_t min_frame_errors = 100;
  uint64_t min_frames = 100000;
  uint64_t max_frames = 100000000;
  uint64_t seed = 1;
  int workers = 1;
  bool all_zeros = false;         // transmit the all-zeros codeword instead of random messages
  bool spawn_threads = true;      // false: run the same worker partition sequentially
  bool single_precision = false;
};

/// Monte-Carlo BER/FER per SNR point. Random messages are encoded, modulated,
/// transmitted and decoded until frames ≥ min_frames and frame_errors ≥
/// min_frame_errors, or frames = max_frames (point flagged censored).
/// Deterministic for fixed (seed, workers).
std::vector<BerPoint> run_ber(const LinearCode& code, const DecoderParams& params,
                              const EvalConfig& cfg);

struct IterationHistogram {
  int iteration = 0;        // 1-based
  double lo = 0.0, hi = 0.0;
  std::vector<double> bin_lo, bin_hi, bin_center;
  std::vector<uint64_t> freq;
};

/// Per-iteration histograms of the (tying-expanded) offsets; bin edges span
/// that iteration's min..max. Requires an offset-carrying variant.
std::vector<IterationHistogram> export_histograms(const DecoderParams& params, int bins = 20);

struct CurvePoint {
  double snr_db = 0.0;
  double ber = 0.0;
};

struct NamedCurve {
  std::string label;
  std::vector<CurvePoint> points;
};

struct RatioRow {
  double snr_db = 0.0;
  std::vector<double> ber;    // per curve, NaN when absent
  std::vector<double> ratio;  // ber[i] / ber[0]
};

struct GapRow {
  double ber_target = 0.0;
  std::string label_a, label_b;
  double snr_a = 0.0, snr_b = 0.0;  // SNR at which each curve crosses the target
  double gap_db = 0.0;              // snr_a − snr_b
  bool defined = false;             // false when a curve never crosses the target
};

struct GapReport {
  std::vector<std::string> labels;
  std::vector<RatioRow> ratios;  // on the common SNR grid
  std::vector<GapRow> gaps;      // curve[0] vs each other curve, per target
};

/// Per-SNR BER ratios plus log-linear-interpolated dB gaps at the given BER
/// targets, measured against the first curve.
GapReport compare_curves(const std::vector<NamedCurve>& curves,
                         const std::vector<double>& ber_targets);

// CSV interchange (comment lines start with '#').
void write_ber_csv(std::ostream& out, const std::string& label,
                   const std::vector<BerPoint>& points, const std::string& manifest_ref = "");
std::vector<NamedCurve> read_ber_csv(std::istream& in);
void write_histogram_csv(std::ostream& out, const IterationHistogram& h,
                         const std::string& manifest_ref = "");
void write_gap_report_csv(std::ostream& out, const GapReport& report,
                          const std::string& manifest_ref = "");
std::string format_gap_report(const GapReport& report);

}  // namespace nomsdec
