#pragma once

#include <optional>
#include <string>

#include "nomsdec/channel.hpp"
#include "nomsdec/decoder.hpp"
#include "nomsdec/training.hpp"

namespace nomsdec {

/// Versioned JSON container for learned parameters. Checkpoints additionally
/// carry the optimizer and RNG state so training can resume exactly.
/// Layout: see the "Parameter files" section of the README.
struct ParamsFile {
  DecoderParams params;
  std::optional<AdamState> adam;
  std::optional<std::string> rng_state;
  uint64_t code_checksum = 0;
  std::string code_name;
  std::string manifest_ref;
};

inline constexpr int kParamsFormatVersion = 1;
inline constexpr const char* kParamsFormatName = "noms-params";

std::string params_to_json(const ParamsFile& f);
ParamsFile params_from_json(const std::string& text);

void save_params_file(const std::string& path, const ParamsFile& f);
ParamsFile load_params_file(const std::string& path);

}  // namespace nomsdec
