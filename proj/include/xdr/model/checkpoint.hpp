#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "xdr/model/cascade.hpp"

namespace xdr {

// CKPT1 container: 5-byte magic "CKPT1", a newline-terminated JSON header
// {"format_version", "config", "training_meta", "param_count"}, then the
// parameter blob as raw little-endian float32 in layer order (weights
// then bias per convolution, cascades outermost). save -> load -> save is
// byte-stable.
struct CascadeCheckpoint {
  CascadeConfig config;
  std::vector<float> parameters;
  int format_version = 1;
  nlohmann::ordered_json training_meta = nlohmann::ordered_json::object();

  CascadeModel to_model() const;
  static CascadeCheckpoint from_model(const CascadeModel& model,
                                      nlohmann::ordered_json meta = {});
};

void save_checkpoint(const std::filesystem::path& path, const CascadeCheckpoint& ckpt);
CascadeCheckpoint load_checkpoint(const std::filesystem::path& path);

} // namespace xdr
