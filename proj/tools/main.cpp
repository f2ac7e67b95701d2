// nomsdec: belief-propagation decoders for binary linear codes with trainable
// check-node offsets, plus the training and Monte-Carlo evaluation pipeline.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nomsdec/alist.hpp"
#include "nomsdec/bch.hpp"
#include "nomsdec/evaluation.hpp"
#include "nomsdec/params_io.hpp"
#include "nomsdec/training.hpp"
#include "nomsdec/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nomsdec;

namespace {

std::string iso_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return buf;
}

std::string hex64(uint64_t x) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(x));
  return buf;
}

struct CodeOpts {
  std::string code_spec;  // "bch:63,36" or path to an alist file
  std::vector<int> bch_nk;
  std::string alist_path;

  void attach(CLI::App* cmd) {
    auto* spec = cmd->add_option("--code", code_spec,
                                 "code spec: bch:<n>,<k> or path to an alist file");
    auto* bch = cmd->add_option("--bch", bch_nk, "BCH code as: n k")->expected(2);
    auto* alist = cmd->add_option("--alist", alist_path, "alist file path")
                      ->check(CLI::ExistingFile);
    spec->excludes(bch)->excludes(alist);
    bch->excludes(alist);
  }

  LinearCode resolve() const {
    if (!bch_nk.empty()) return make_bch(bch_nk[0], bch_nk[1]);
    if (!alist_path.empty()) return load_alist_file(alist_path);
    if (code_spec.empty()) throw ConfigError("no code given: use --code, --bch or --alist");
    if (code_spec.rfind("bch:", 0) == 0) {
      std::string rest = code_spec.substr(4);
      for (char& c : rest) {
        if (c == ',' || c == ':') c = ' ';
      }
      std::istringstream ss(rest);
      int n = 0, k = 0;
      if (!(ss >> n >> k)) throw ConfigError("bad --code bch spec: " + code_spec);
      return make_bch(n, k);
    }
    return load_alist_file(code_spec);
  }

  static LinearCode make_bch(int n, int k) {
    int m = 0;
    while ((1 << m) - 1 < n) ++m;
    return construct_bch(m, n, bch_t_for_dimension(n, k));
  }
};

json code_identity(const LinearCode& code) {
  return {{"name", code.name()},
          {"n", code.n()},
          {"k", code.k()},
          {"edge_count", code.edge_count()},
          {"h_checksum", hex64(code.h_checksum())}};
}

std::string command_line_of(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

// Every output file references the manifest that produced it; the manifest
// carries everything needed to regenerate the file.
void write_manifest(const std::string& path, const std::string& command_line,
                    const std::string& subcommand, const json& config, const json& code,
                    uint64_t seed, const std::string& started_at) {
  json j;
  j["command_line"] = command_line;
  j["subcommand"] = subcommand;
  j["config"] = config;
  j["code"] = code;
  j["seed"] = seed;
  j["version"] = kVersion;
  j["rng_generator"] = Rng::kGeneratorName;
  j["started_at"] = started_at;
  j["finished_at"] = iso_now();
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

std::vector<double> parse_snr_range(const std::string& s) {
  // "1:8" or "1:8:0.5" (inclusive) or a single value
  std::vector<double> parts;
  std::string tok;
  std::istringstream ss(s);
  while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
  if (parts.size() == 1) return {parts[0]};
  if (parts.size() < 2 || parts.size() > 3) throw ConfigError("bad --snr range: " + s);
  const double start = parts[0], stop = parts[1];
  const double step = parts.size() == 3 ? parts[2] : 1.0;
  if (step <= 0 || stop < start) throw ConfigError("bad --snr range: " + s);
  std::vector<double> out;
  for (double x = start; x <= stop + 1e-9; x += step) out.push_back(x);
  return out;
}

int run_code_info(const CodeOpts& copts, bool machine) {
  auto code = copts.resolve();
  const auto& g = code.graph();

  int min_cn = g.cn_degree.empty() ? 0 : *std::min_element(g.cn_degree.begin(), g.cn_degree.end());
  int max_cn = g.cn_degree.empty() ? 0 : *std::max_element(g.cn_degree.begin(), g.cn_degree.end());
  int min_vn = *std::min_element(g.vn_degree.begin(), g.vn_degree.end());
  int max_vn = *std::max_element(g.vn_degree.begin(), g.vn_degree.end());

  if (machine) {
    std::cout << "name=" << code.name() << "\n"
              << "n=" << code.n() << "\n"
              << "k=" << code.k() << "\n"
              << "rate=" << code.rate() << "\n"
              << "checks=" << g.n_checks << "\n"
              << "edges=" << code.edge_count() << "\n"
              << "cn_degree_min=" << min_cn << "\n"
              << "cn_degree_max=" << max_cn << "\n"
              << "vn_degree_min=" << min_vn << "\n"
              << "vn_degree_max=" << max_vn << "\n"
              << "h_checksum=" << hex64(code.h_checksum()) << "\n";
    if (code.bch_meta) {
      std::cout << "bch_t=" << code.bch_meta->t << "\n"
                << "bch_prim_poly=" << hex64(code.bch_meta->prim_poly) << "\n";
    }
    return 0;
  }

  std::cout << "code        " << code.name() << "\n"
            << "n, k, rate  " << code.n() << ", " << code.k() << ", " << code.rate() << "\n"
            << "checks      " << g.n_checks << "\n"
            << "edges       " << code.edge_count() << "\n"
            << "cn degrees  " << min_cn << ".." << max_cn << "\n"
            << "vn degrees  " << min_vn << ".." << max_vn << "\n"
            << "H checksum  " << hex64(code.h_checksum()) << "\n";
  if (code.rank_deficient()) {
    std::cout << "warning     H is rank-deficient; k recomputed from rank\n";
  }
  if (code.bch_meta) {
    std::cout << "bch         t=" << code.bch_meta->t
              << ", primitive poly " << hex64(code.bch_meta->prim_poly) << "\n";
  }
  return 0;
}

DecoderParams params_for_eval(const ParamsFile* loaded, const std::string& variant_str,
                              double beta, int iterations, const LinearCode& code) {
  if (loaded) {
    if (loaded->code_checksum && loaded->code_checksum != code.h_checksum()) {
      throw ConfigError("checkpoint was trained on a different H (checksum mismatch); "
                        "pass the matching --code");
    }
    return loaded->params;
  }
  Variant v = variant_from_name(variant_str);
  switch (v) {
    case Variant::Spa: return DecoderParams::spa(iterations);
    case Variant::MinSum: return DecoderParams::min_sum(iterations);
    case Variant::Oms: return DecoderParams::oms(iterations, beta);
    case Variant::Nspa: return DecoderParams::nspa(code, iterations);
    case Variant::Noms:
      throw ConfigError("evaluate: noms requires --params (a trained checkpoint)");
  }
  throw ConfigError("unreachable");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"belief-propagation decoding with trainable offsets"};
  app.set_config("--config", "", "read options from a config file");
  app.require_subcommand(1);

  std::string started_at = iso_now();
  std::string cmdline = command_line_of(argc, argv);

  // ---- code-info ----
  auto* info_cmd = app.add_subcommand("code-info", "print code parameters and degree profile");
  CodeOpts info_code;
  info_code.attach(info_cmd);
  bool info_machine = false;
  info_cmd->add_flag("--machine", info_machine, "machine-readable key=value output");

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "optimize decoder parameters by SGD");
  CodeOpts train_code;
  train_code.attach(train_cmd);
  std::string train_variant = "noms";
  TrainConfig tcfg;
  std::string train_out = "ckpt.json";
  std::string train_tying = "per-edge";
  train_cmd->add_option("--variant", train_variant, "noms|nspa")->capture_default_str();
  train_cmd->add_option("--iterations", tcfg.iterations, "unrolled iterations T")
      ->capture_default_str();
  train_cmd->add_option("--minibatches", tcfg.minibatches, "number of minibatches")
      ->capture_default_str();
  train_cmd->add_option("--batch-size", tcfg.batch_size, "frames per minibatch")
      ->capture_default_str();
  train_cmd->add_option("--lr", tcfg.learning_rate, "Adam learning rate")->capture_default_str();
  train_cmd->add_option("--tying", train_tying, "per-edge|per-iteration|per-check-node|global")
      ->capture_default_str();
  train_cmd->add_option("--seed", tcfg.seed, "top-level RNG seed")->capture_default_str();
  train_cmd->add_option("--snr-set", tcfg.snr_set_db, "training Eb/N0 values (dB)");
  train_cmd->add_option("--eval-every", tcfg.eval_every, "checkpoint cadence (0 = off)")
      ->capture_default_str();
  train_cmd->add_option("--heldout-frames", tcfg.heldout_frames, "held-out set size")
      ->capture_default_str();
  train_cmd->add_option("--init-sigma", tcfg.init_sigma, "offset init stddev")
      ->capture_default_str();
  train_cmd->add_option("--workers", tcfg.workers, "per-frame threads inside a minibatch")
      ->capture_default_str();
  train_cmd->add_flag("--multiloss,!--final-loss-only", tcfg.multiloss,
                      "mean cross-entropy over all iterations (default) vs final only");
  train_cmd->add_option("--out", train_out, "checkpoint output path")->capture_default_str();

  // ---- evaluate ----
  auto* eval_cmd = app.add_subcommand("evaluate", "Monte-Carlo BER/FER estimation");
  CodeOpts eval_code;
  eval_code.attach(eval_cmd);
  std::string eval_params_path, eval_variant = "spa", eval_snr = "1:8:1", eval_out = "results.csv";
  std::string eval_label, eval_dump;
  std::vector<double> eval_list;
  double eval_beta = 0.0;
  int eval_iterations = 5;
  uint64_t eval_dump_count = 8;
  EvalConfig ecfg;
  eval_cmd->add_option("--params", eval_params_path, "trained checkpoint (noms/nspa)")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--variant", eval_variant, "spa|ms|oms|nspa when no --params")
      ->capture_default_str();
  eval_cmd->add_option("--beta", eval_beta, "offset for --variant oms")->capture_default_str();
  eval_cmd->add_option("--iterations", eval_iterations, "iterations when no --params")
      ->capture_default_str();
  eval_cmd->add_option("--snr", eval_snr, "Eb/N0 range start:stop[:step] dB")
      ->capture_default_str();
  eval_cmd->add_option("--ebn0-list", eval_list, "explicit Eb/N0 list (dB), overrides --snr");
  eval_cmd->add_option("--min-frame-errors", ecfg.min_frame_errors, "stop rule: frame errors")
      ->capture_default_str();
  eval_cmd->add_option("--min-frames", ecfg.min_frames, "stop rule: frames")
      ->capture_default_str();
  eval_cmd->add_option("--max-frames", ecfg.max_frames, "hard cap (censored if hit)")
      ->capture_default_str();
  eval_cmd->add_option("--seed", ecfg.seed, "top-level RNG seed")->capture_default_str();
  eval_cmd->add_option("--workers", ecfg.workers, "parallel workers")->capture_default_str();
  eval_cmd->add_flag("--all-zeros", ecfg.all_zeros, "transmit the all-zeros codeword");
  eval_cmd->add_flag("--f32", ecfg.single_precision, "single-precision message passing");
  eval_cmd->add_option("--label", eval_label, "curve label in the CSV");
  eval_cmd->add_option("--dump-frames", eval_dump, "debug CSV of (y, llr) for a few frames");
  eval_cmd->add_option("--dump-count", eval_dump_count, "frames to dump")->capture_default_str();
  eval_cmd->add_option("--out", eval_out, "results CSV path")->capture_default_str();

  // ---- histogram ----
  auto* hist_cmd = app.add_subcommand("histogram", "per-iteration offset histograms");
  std::string hist_params_path, hist_out = ".";
  int hist_bins = 20;
  hist_cmd->add_option("--params", hist_params_path, "trained checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  hist_cmd->add_option("--bins", hist_bins, "histogram bins")->capture_default_str();
  hist_cmd->add_option("--out", hist_out, "output directory")->capture_default_str();

  // ---- compare ----
  auto* cmp_cmd = app.add_subcommand("compare", "BER ratios and dB gaps between result CSVs");
  std::vector<std::string> cmp_files;
  std::vector<double> cmp_targets = {1e-3, 1e-4};
  std::string cmp_out;
  cmp_cmd->add_option("csvs", cmp_files, "two or more results CSV files")
      ->required()
      ->check(CLI::ExistingFile);
  cmp_cmd->add_option("--ber-targets", cmp_targets, "BER levels for gap interpolation")
      ->capture_default_str();
  cmp_cmd->add_option("--out", cmp_out, "gap report CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*info_cmd) {
      return run_code_info(info_code, info_machine);
    }

    if (*train_cmd) {
      auto code = train_code.resolve();
      tcfg.tying = tying_from_name(train_tying);
      Variant variant = variant_from_name(train_variant);
      const std::string manifest_path = train_out + ".manifest.json";

      auto save_ckpt = [&](const std::string& path, const DecoderParams& p, const AdamState& a,
                           const std::string& rng_state) {
        ParamsFile f;
        f.params = p;
        f.adam = a;
        f.rng_state = rng_state;
        f.code_checksum = code.h_checksum();
        f.code_name = code.name();
        f.manifest_ref = manifest_path;
        save_params_file(path, f);
      };
      auto sink = [&](int mb, const DecoderParams& p, const AdamState& a, const Rng& rng) {
        save_ckpt(train_out + ".mb" + std::to_string(mb) + ".json", p, a, rng.state_string());
      };

      TrainResult result;
      try {
        result = train(code, variant, tcfg, sink);
      } catch (const TrainDivergence& e) {
        std::cerr << "error: " << e.what() << " (last checkpoint saved)\n";
        return 1;
      }
      save_ckpt(train_out, result.params, result.adam, result.data_rng_state);

      std::ofstream log(train_out + ".log.csv");
      log << "# manifest: " << manifest_path << "\n";
      log << "minibatch,mean_loss,grad_norm,wall_time\n";
      log.precision(10);
      for (const auto& row : result.log) {
        log << row.minibatch << ',' << row.mean_loss << ',' << row.grad_norm << ','
            << row.wall_seconds << "\n";
      }

      json cfg_json = {{"variant", train_variant},
                       {"iterations", tcfg.iterations},
                       {"minibatches", tcfg.minibatches},
                       {"batch_size", tcfg.batch_size},
                       {"learning_rate", tcfg.learning_rate},
                       {"tying", train_tying},
                       {"snr_set_db", tcfg.snr_set_db},
                       {"init_sigma", tcfg.init_sigma},
                       {"heldout_frames", tcfg.heldout_frames},
                       {"multiloss", tcfg.multiloss},
                       {"eval_every", tcfg.eval_every},
                       {"workers", tcfg.workers},
                       {"out", train_out}};
      write_manifest(manifest_path, cmdline, "train", cfg_json, code_identity(code), tcfg.seed,
                     started_at);

      std::cout << "trained " << variant_name(variant) << " for " << tcfg.minibatches
                << " minibatches on " << code.name() << "\n"
                << "held-out loss " << result.heldout_initial << " -> " << result.heldout_final
                << "\n"
                << "checkpoint: " << train_out << "\n";
      return 0;
    }

    if (*eval_cmd) {
      auto code = eval_code.resolve();
      std::optional<ParamsFile> loaded;
      if (!eval_params_path.empty()) loaded = load_params_file(eval_params_path);
      auto params = params_for_eval(loaded ? &*loaded : nullptr, eval_variant, eval_beta,
                                    eval_iterations, code);
      ecfg.snr_list_db = eval_list.empty() ? parse_snr_range(eval_snr) : eval_list;

      if (!eval_dump.empty()) {
        std::ofstream dump(eval_dump);
        dump << "frame,position,y,llr\n";
        dump.precision(12);
        ChannelConfig ch(ecfg.snr_list_db.front(), code.rate(), ecfg.seed);
        Rng rng = Rng::stream(ecfg.seed, {0xdeb});
        std::vector<uint8_t> msg(code.k(), 0);
        for (uint64_t f = 0; f < eval_dump_count; ++f) {
          auto frame = transmit(ch, modulate_bpsk(code.encode(msg)), rng);
          for (int v = 0; v < code.n(); ++v) {
            dump << f << ',' << v << ',' << frame.y[v] << ',' << frame.llr[v] << "\n";
          }
        }
      }

      auto points = run_ber(code, params, ecfg);

      const std::string manifest_path = eval_out + ".manifest.json";
      std::string label = eval_label;
      if (label.empty()) {
        label = (loaded ? variant_name(params.variant) + "-trained" : eval_variant) + "/" +
                code.name();
      }
      std::ofstream out(eval_out);
      if (!out) throw ConfigError("cannot write " + eval_out);
      write_ber_csv(out, label, points, manifest_path);

      json cfg_json = {{"params", eval_params_path},
                       {"variant", variant_name(params.variant)},
                       {"iterations", params.iterations},
                       {"snr_list_db", ecfg.snr_list_db},
                       {"min_frame_errors", ecfg.min_frame_errors},
                       {"min_frames", ecfg.min_frames},
                       {"max_frames", ecfg.max_frames},
                       {"workers", ecfg.workers},
                       {"all_zeros", ecfg.all_zeros},
                       {"single_precision", ecfg.single_precision},
                       {"label", label},
                       {"out", eval_out}};
      write_manifest(manifest_path, cmdline, "evaluate", cfg_json, code_identity(code), ecfg.seed,
                     started_at);

      for (const auto& p : points) {
        std::cout << label << " @ " << p.ebn0_db << " dB: BER " << p.ber << " FER " << p.fer
                  << " (" << p.frames << " frames, " << p.frame_errors << " frame errors"
                  << (p.censored ? ", censored" : "") << ")\n";
      }
      std::cout << "results: " << eval_out << "\n";
      return 0;
    }

    if (*hist_cmd) {
      auto loaded = load_params_file(hist_params_path);
      auto hists = export_histograms(loaded.params, hist_bins);
      fs::create_directories(hist_out);
      const std::string manifest_path = (fs::path(hist_out) / "manifest.json").string();
      for (const auto& h : hists) {
        auto name = "iteration_" + std::to_string(h.iteration) + "_" +
                    std::to_string(loaded.params.trained_minibatches) + ".csv";
        std::ofstream out(fs::path(hist_out) / name);
        write_histogram_csv(out, h, manifest_path);
        std::cout << "wrote " << (fs::path(hist_out) / name).string() << "\n";
      }
      json cfg_json = {{"params", hist_params_path}, {"bins", hist_bins}, {"out", hist_out}};
      json code_json = {{"name", loaded.code_name}, {"h_checksum", hex64(loaded.code_checksum)}};
      write_manifest(manifest_path, cmdline, "histogram", cfg_json, code_json, 0, started_at);
      return 0;
    }

    if (*cmp_cmd) {
      std::vector<NamedCurve> curves;
      for (const auto& f : cmp_files) {
        std::ifstream in(f);
        if (!in) throw ConfigError("cannot open " + f);
        for (auto& c : read_ber_csv(in)) curves.push_back(std::move(c));
      }
      if (curves.size() < 2) throw ConfigError("compare needs at least two labelled curves");
      auto rep = compare_curves(curves, cmp_targets);
      std::cout << format_gap_report(rep);
      if (!cmp_out.empty()) {
        const std::string manifest_path = cmp_out + ".manifest.json";
        std::ofstream out(cmp_out);
        write_gap_report_csv(out, rep, manifest_path);
        json cfg_json = {{"csvs", cmp_files}, {"ber_targets", cmp_targets}, {"out", cmp_out}};
        write_manifest(manifest_path, cmdline, "compare", cfg_json, json::object(), 0, started_at);
        std::cout << "gap report: " << cmp_out << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
