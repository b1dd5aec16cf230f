#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xdr/data.hpp"
#include "xdr/eval.hpp"
#include "xdr/model/cascade.hpp"
#include "xdr/patches.hpp"
#include "xdr/train.hpp"

namespace xdr::cli {

struct PatchCompare {
  std::string target;
  std::string source_a;
  std::string source_b;
};

// The JSON run configuration shared by the workflow subcommands. Parsing
// is strict: unknown keys anywhere in the document are rejected before any
// work happens.
struct RunConfig {
  std::uint64_t global_seed = 0;
  std::filesystem::path output_dir; // may be overridden by flag/env

  std::vector<DatasetSpec> datasets;

  MaskArgs mask;
  MaskPolicy mask_policy = MaskPolicy::PerSample;

  CascadeConfig cascade;

  // train section
  std::string train_dataset;
  std::string val_dataset; // optional
  int epochs = 10;
  int batch_size = 4;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::AdaptiveMoment;
  std::optional<std::uint64_t> train_seed; // defaults to global_seed

  // eval section
  std::vector<std::string> train_domains;
  std::vector<std::string> test_domains;
  Split test_split = Split::Test;
  int test_count = 0; // phantom test-set size override, 0 = keep spec count
  int error_images = 0;
  double error_gain = 5.0;

  // patch_stats section
  std::vector<std::string> patch_targets;
  std::vector<std::string> patch_sources;
  std::int64_t n_target = 2000;
  std::int64_t n_source = 2000;
  std::map<std::string, std::int64_t> n_per_source;
  int patch_size = 7;
  PatchNorm patch_norm = PatchNorm::None;
  int block_size = 1024;
  CompareMethod compare_method = CompareMethod::WilcoxonSignedRank;
  std::vector<PatchCompare> compares;
  std::optional<std::uint64_t> patch_seed;
  Split patch_split = Split::Train;

  nlohmann::json effective; // post-override document, hashed into manifests

  const DatasetSpec& dataset(const std::string& id) const;
};

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

// Merges this run's artifact list into <output_dir>/manifest.json under
// the command's key, keeping entries from other commands. Paths are
// recorded relative to output_dir. Deterministic content, no timestamps.
void update_manifest(const std::filesystem::path& output_dir, const std::string& command,
                     const std::string& config_hash,
                     const std::vector<std::filesystem::path>& artifacts);

} // namespace xdr::cli
