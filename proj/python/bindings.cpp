#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nomsdec/alist.hpp"
#include "nomsdec/bch.hpp"
#include "nomsdec/evaluation.hpp"
#include "nomsdec/params_io.hpp"
#include "nomsdec/training.hpp"
#include "nomsdec/version.hpp"

namespace py = pybind11;
using namespace nomsdec;

namespace {

LinearCode make_bch_nk(int n, int k) {
  int m = 0;
  while ((1 << m) - 1 < n) ++m;
  return construct_bch(m, n, bch_t_for_dimension(n, k));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "belief-propagation decoding with trainable check-node offsets";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<AlistError>(m, "AlistError");
  py::register_exception<BchError>(m, "BchError");

  // ---- codes ----
  py::class_<LinearCode>(m, "LinearCode")
      .def_property_readonly("n", &LinearCode::n)
      .def_property_readonly("k", &LinearCode::k)
      .def_property_readonly("rate", &LinearCode::rate)
      .def_property_readonly("edge_count", &LinearCode::edge_count)
      .def_property_readonly("name", &LinearCode::name)
      .def_property_readonly("h_checksum", &LinearCode::h_checksum)
      .def_property_readonly("cn_degrees",
                             [](const LinearCode& c) { return c.graph().cn_degree; })
      .def_property_readonly("vn_degrees",
                             [](const LinearCode& c) { return c.graph().vn_degree; })
      .def("encode",
           [](const LinearCode& c, const std::vector<uint8_t>& msg) { return c.encode(msg); })
      .def("syndrome_ok",
           [](const LinearCode& c, const std::vector<uint8_t>& w) { return c.syndrome_ok(w); })
      .def("to_alist", [](const LinearCode& c) { return to_alist(c.h()); })
      .def("__repr__", [](const LinearCode& c) {
        return "<LinearCode " + c.name() + " n=" + std::to_string(c.n()) +
               " k=" + std::to_string(c.k()) + ">";
      });

  m.def("make_bch", &make_bch_nk, py::arg("n"), py::arg("k"),
        "systematic BCH code of length n = 2^m - 1 and dimension k");
  m.def("construct_bch", &construct_bch, py::arg("m"), py::arg("n"), py::arg("designed_t"));
  m.def(
      "load_alist_text",
      [](const std::string& text, const std::string& name) {
        std::istringstream ss(text);
        return load_alist(ss, name);
      },
      py::arg("text"), py::arg("name") = "alist");
  m.def("load_alist_file", &load_alist_file, py::arg("path"));
  m.def("uncoded", &LinearCode::uncoded, py::arg("n"));

  // ---- channel ----
  m.def("ebn0_to_sigma2", &ebn0_to_sigma2, py::arg("ebn0_db"), py::arg("rate"));
  m.def("modulate_bpsk",
        [](const std::vector<uint8_t>& bits) { return modulate_bpsk(bits); });
  m.def(
      "simulate_frame",
      [](const LinearCode& code, double ebn0_db, uint64_t seed, bool all_zeros) {
        ChannelConfig ch(ebn0_db, code.rate(), seed);
        Rng rng = Rng::stream(seed, {0});
        std::vector<double> llr;
        std::vector<uint8_t> truth;
        if (all_zeros) {
          llr = all_zeros_llr(ch, code.n(), rng);
          truth.assign(code.n(), 0);
        } else {
          std::vector<uint8_t> msg(code.k());
          for (int i = 0; i < code.k(); ++i) msg[i] = rng.bit();
          auto frame = transmit(ch, modulate_bpsk(code.encode(msg)), rng);
          llr = std::move(frame.llr);
          truth = std::move(frame.truth_bits);
        }
        return py::make_tuple(std::move(llr), std::move(truth));
      },
      py::arg("code"), py::arg("ebn0_db"), py::arg("seed") = 1, py::arg("all_zeros") = false,
      "one received frame as (llr, truth_bits)");

  // ---- decoder ----
  py::enum_<Variant>(m, "Variant")
      .value("spa", Variant::Spa)
      .value("ms", Variant::MinSum)
      .value("oms", Variant::Oms)
      .value("noms", Variant::Noms)
      .value("nspa", Variant::Nspa);

  py::enum_<Tying>(m, "Tying")
      .value("per_edge", Tying::PerEdge)
      .value("per_iteration", Tying::PerIteration)
      .value("per_check_node", Tying::PerCheckNode)
      .value("global_tie", Tying::Global);

  py::class_<DecoderParams>(m, "DecoderParams")
      .def_readonly("variant", &DecoderParams::variant)
      .def_readonly("iterations", &DecoderParams::iterations)
      .def_readonly("tying", &DecoderParams::tying)
      .def_readwrite("offsets", &DecoderParams::offsets)
      .def_property(
          "weights", [](const DecoderParams& p) { return p.weights.flat; },
          [](DecoderParams& p, const std::vector<double>& w) {
            if (w.size() != p.weights.flat.size())
              throw ConfigError("weights size mismatch");
            p.weights.flat = w;
          })
      .def_readonly("trained_minibatches", &DecoderParams::trained_minibatches)
      .def_static("spa", &DecoderParams::spa, py::arg("iterations") = 5)
      .def_static("min_sum", &DecoderParams::min_sum, py::arg("iterations") = 5)
      .def_static("oms", &DecoderParams::oms, py::arg("iterations"), py::arg("beta"))
      .def_static("noms", &DecoderParams::noms, py::arg("code"), py::arg("iterations") = 5,
                  py::arg("tying") = Tying::PerEdge, py::arg("init_value") = 0.0)
      .def_static("nspa", &DecoderParams::nspa, py::arg("code"), py::arg("iterations") = 5);

  m.def(
      "decode",
      [](const LinearCode& code, const DecoderParams& params, const std::vector<double>& llr,
         bool early_exit, bool single_precision) {
        DecodeOptions opt;
        opt.early_exit = early_exit;
        opt.single_precision = single_precision;
        auto res = decode(code, params, llr, opt);
        return py::make_tuple(res.output.s, res.output.hard);
      },
      py::arg("code"), py::arg("params"), py::arg("llr"), py::arg("early_exit") = false,
      py::arg("single_precision") = false, "returns (soft, hard)");
  m.def("syndrome_check", [](const LinearCode& code, const std::vector<uint8_t>& hard) {
    return syndrome_check(code, hard);
  });
  m.def("count_parameters", &count_parameters, py::arg("code"), py::arg("variant"),
        py::arg("iterations"), py::arg("tying") = Tying::PerEdge);

  // ---- training ----
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("minibatches", &TrainConfig::minibatches)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("snr_set_db", &TrainConfig::snr_set_db)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("iterations", &TrainConfig::iterations)
      .def_readwrite("tying", &TrainConfig::tying)
      .def_readwrite("init_sigma", &TrainConfig::init_sigma)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("heldout_frames", &TrainConfig::heldout_frames)
      .def_readwrite("multiloss", &TrainConfig::multiloss)
      .def_readwrite("workers", &TrainConfig::workers);

  py::class_<TrainLogRow>(m, "TrainLogRow")
      .def_readonly("minibatch", &TrainLogRow::minibatch)
      .def_readonly("mean_loss", &TrainLogRow::mean_loss)
      .def_readonly("grad_norm", &TrainLogRow::grad_norm)
      .def_readonly("wall_seconds", &TrainLogRow::wall_seconds);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("params", &TrainResult::params)
      .def_readonly("log", &TrainResult::log)
      .def_readonly("heldout_initial", &TrainResult::heldout_initial)
      .def_readonly("heldout_final", &TrainResult::heldout_final);

  m.def(
      "train",
      [](const LinearCode& code, Variant variant, const TrainConfig& cfg) {
        return train(code, variant, cfg);
      },
      py::arg("code"), py::arg("variant"), py::arg("cfg"),
      py::call_guard<py::gil_scoped_release>());
  m.def("tie_offsets", &tie_offsets, py::arg("code"), py::arg("params"), py::arg("scheme"));

  // ---- evaluation ----
  py::class_<BerPoint>(m, "BerPoint")
      .def_readonly("ebn0_db", &BerPoint::ebn0_db)
      .def_readonly("frames", &BerPoint::frames)
      .def_readonly("bit_errors", &BerPoint::bit_errors)
      .def_readonly("frame_errors", &BerPoint::frame_errors)
      .def_readonly("ber", &BerPoint::ber)
      .def_readonly("fer", &BerPoint::fer)
      .def_readonly("ci_lo", &BerPoint::ci_lo)
      .def_readonly("ci_hi", &BerPoint::ci_hi)
      .def_readonly("censored", &BerPoint::censored)
      .def("__repr__", [](const BerPoint& p) {
        return "<BerPoint " + std::to_string(p.ebn0_db) + " dB ber=" + std::to_string(p.ber) +
               ">";
      });

  py::class_<EvalConfig>(m, "EvalConfig")
      .def(py::init<>())
      .def_readwrite("snr_list_db", &EvalConfig::snr_list_db)
      .def_readwrite("min_frame_errors", &EvalConfig::min_frame_errors)
      .def_readwrite("min_frames", &EvalConfig::min_frames)
      .def_readwrite("max_frames", &EvalConfig::max_frames)
      .def_readwrite("seed", &EvalConfig::seed)
      .def_readwrite("workers", &EvalConfig::workers)
      .def_readwrite("all_zeros", &EvalConfig::all_zeros)
      .def_readwrite("single_precision", &EvalConfig::single_precision);

  m.def(
      "run_ber",
      [](const LinearCode& code, const DecoderParams& params, const EvalConfig& cfg) {
        return run_ber(code, params, cfg);
      },
      py::arg("code"), py::arg("params"), py::arg("cfg"),
      py::call_guard<py::gil_scoped_release>());

  py::class_<IterationHistogram>(m, "IterationHistogram")
      .def_readonly("iteration", &IterationHistogram::iteration)
      .def_readonly("lo", &IterationHistogram::lo)
      .def_readonly("hi", &IterationHistogram::hi)
      .def_readonly("bin_center", &IterationHistogram::bin_center)
      .def_readonly("freq", &IterationHistogram::freq);
  m.def("export_histograms", &export_histograms, py::arg("params"), py::arg("bins") = 20);

  // ---- params files ----
  m.def(
      "save_params",
      [](const std::string& path, const DecoderParams& params, const LinearCode& code) {
        ParamsFile f;
        f.params = params;
        f.code_checksum = code.h_checksum();
        f.code_name = code.name();
        save_params_file(path, f);
      },
      py::arg("path"), py::arg("params"), py::arg("code"));
  m.def(
      "load_params", [](const std::string& path) { return load_params_file(path).params; },
      py::arg("path"));
}
