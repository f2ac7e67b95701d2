#include "nomsdec/params_io.hpp"

#include <fstream>
#include <json.hpp>

namespace nomsdec {

using nlohmann::json;

std::string params_to_json(const ParamsFile& f) {
  const DecoderParams& p = f.params;
  json j;
  j["format"] = kParamsFormatName;
  j["version"] = kParamsFormatVersion;
  j["variant"] = variant_name(p.variant);
  j["iterations"] = p.iterations;
  j["edge_count"] = p.edge_count;
  j["n"] = p.n_vars;
  j["trained_minibatches"] = p.trained_minibatches;
  j["code"] = {{"name", f.code_name}, {"h_checksum", f.code_checksum}};
  if (!f.manifest_ref.empty()) j["manifest"] = f.manifest_ref;

  if (p.is_min_sum_family()) {
    j["tying"] = tying_name(p.tying);
    j["offsets"] = p.offsets;  // slot values; per-edge slots follow canonical edge order
    // Only the per-check-node map cannot be rebuilt without the graph.
    if (p.tying == Tying::PerCheckNode) j["slot_of"] = p.slot_of;
  }
  if (p.variant == Variant::Nspa) {
    j["weights"] = {{"fanin_total", p.weights.fanin_total}, {"flat", p.weights.flat}};
  }
  if (f.adam) {
    j["adam"] = {{"step", f.adam->step}, {"m", f.adam->m}, {"v", f.adam->v}};
  }
  if (f.rng_state) {
    j["rng"] = {{"generator", Rng::kGeneratorName}, {"state", *f.rng_state}};
  }
  return j.dump(2);
}

ParamsFile params_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != kParamsFormatName)
    throw ConfigError("params file: unexpected format tag");
  if (j.value("version", 0) != kParamsFormatVersion)
    throw ConfigError("params file: unsupported version " + std::to_string(j.value("version", 0)));

  ParamsFile f;
  DecoderParams& p = f.params;
  p.variant = variant_from_name(j.at("variant").get<std::string>());
  p.iterations = j.at("iterations").get<int>();
  p.edge_count = j.value("edge_count", 0);
  p.n_vars = j.value("n", 0);
  p.trained_minibatches = j.value("trained_minibatches", int64_t{0});
  if (j.contains("code")) {
    f.code_name = j["code"].value("name", "");
    f.code_checksum = j["code"].value("h_checksum", uint64_t{0});
  }
  f.manifest_ref = j.value("manifest", "");

  if (p.is_min_sum_family() && j.contains("offsets")) {
    p.tying = tying_from_name(j.value("tying", "per-edge"));
    p.offsets = j["offsets"].get<std::vector<double>>();
    if (p.edge_count > 0) {
      const size_t te = static_cast<size_t>(p.iterations) * p.edge_count;
      if (p.tying == Tying::PerCheckNode) {
        p.slot_of = j.at("slot_of").get<std::vector<uint32_t>>();
        if (p.slot_of.size() != te)
          throw ConfigError("params file: slot_of shape does not match T x E");
      } else {
        p.slot_of.resize(te);
        for (int t = 0; t < p.iterations; ++t) {
          for (int e = 0; e < p.edge_count; ++e) {
            uint32_t slot = 0;
            switch (p.tying) {
              case Tying::PerEdge: slot = static_cast<uint32_t>(t) * p.edge_count + e; break;
              case Tying::PerIteration: slot = static_cast<uint32_t>(t); break;
              case Tying::Global: slot = 0; break;
              case Tying::PerCheckNode: break;  // handled above
            }
            p.slot_of[static_cast<size_t>(t) * p.edge_count + e] = slot;
          }
        }
      }
      for (uint32_t slot : p.slot_of) {
        if (slot >= p.offsets.size())
          throw ConfigError("params file: slot id exceeds the offsets array");
      }
    }
  }
  if (p.variant == Variant::Nspa) {
    const auto& w = j.at("weights");
    p.weights.iterations = p.iterations;
    p.weights.n = p.n_vars;
    p.weights.edge_count = p.edge_count;
    p.weights.fanin_total = w.at("fanin_total").get<uint32_t>();
    p.weights.flat = w.at("flat").get<std::vector<double>>();
    if (p.weights.flat.size() != p.weights.size())
      throw ConfigError("params file: weight array size does not match declared shape");
  }
  if (j.contains("adam")) {
    AdamState a;
    a.step = j["adam"].at("step").get<int64_t>();
    a.m = j["adam"].at("m").get<std::vector<double>>();
    a.v = j["adam"].at("v").get<std::vector<double>>();
    f.adam = std::move(a);
  }
  if (j.contains("rng")) f.rng_state = j["rng"].value("state", "");
  return f;
}

void save_params_file(const std::string& path, const ParamsFile& f) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write params file: " + path);
  out << params_to_json(f) << "\n";
}

ParamsFile load_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open params file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ParamsFile f = params_from_json(text);

  return f;
}

}  // namespace nomsdec
