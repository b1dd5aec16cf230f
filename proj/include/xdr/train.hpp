#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "xdr/data.hpp"
#include "xdr/kspace.hpp"
#include "xdr/model/checkpoint.hpp"
#include "xdr/model/optimizer.hpp"

namespace xdr {

enum class MaskPolicy { Fixed, PerSample };

std::string to_string(MaskPolicy p);
MaskPolicy mask_policy_from_string(const std::string& s);

// Mask generation arguments minus the shape, which comes from the data.
struct MaskArgs {
  double acceleration = 4.0;
  double center_fraction = 0.08;
  double sigma = 0.25;
  MaskMode mode = MaskMode::Lines1D;
  std::uint64_t seed = 0;

  SamplingMask make(int height, int width, std::uint64_t seed_override) const;
  nlohmann::ordered_json to_json() const;
  static MaskArgs from_json(const nlohmann::json& j);
};

struct TrainConfig {
  DatasetSpec dataset;                      // the train split
  std::optional<DatasetSpec> val_dataset;   // defaults to dataset with split=val
  MaskArgs mask;
  MaskPolicy mask_policy = MaskPolicy::PerSample; // per-sample: seed from (mask.seed, index)
  CascadeConfig cascade;
  int epochs = 10;
  int batch_size = 4;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::AdaptiveMoment;
  std::uint64_t seed = 0;
  std::filesystem::path checkpoint_dir;
  int threads = 0; // 0 = one thread per batch member, capped by hardware

  void validate() const;
};

struct EpochLog {
  int epoch;
  std::string split;
  double loss;
  double psnr; // mean PSNR; validation only (NaN for train rows)
};

struct TrainResult {
  CascadeCheckpoint best;  // by validation PSNR
  CascadeCheckpoint final_state;
  std::vector<EpochLog> log;
  std::filesystem::path best_path;
  std::filesystem::path final_path;
  std::filesystem::path log_path;
};

// Epoch loop: per sample normalise, undersample (mask per policy),
// forward, MSE loss, optimiser step over minibatches. Epoch 0 logs the
// untouched model's loss. Gradients of a batch are reduced in sample
// order, so results are deterministic for a fixed seed regardless of the
// thread count. Checkpoints and an ndjson log land in checkpoint_dir.
TrainResult train(const TrainConfig& config);

// normalise -> undersample -> forward -> denormalise. Rejects slices
// whose shape differs from the checkpoint's training shape.
ComplexImage reconstruct(const CascadeModel& model,
                         const nlohmann::ordered_json& training_meta,
                         const ComplexImage& slice, const SamplingMask& mask);
ComplexImage reconstruct(const CascadeCheckpoint& ckpt, const ComplexImage& slice,
                         const SamplingMask& mask);

} // namespace xdr
