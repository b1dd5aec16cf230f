#pragma once

#include <string>
#include <vector>

#include "xdr/data.hpp"
#include "xdr/model/checkpoint.hpp"
#include "xdr/train.hpp"

namespace xdr {

struct EvalRecord {
  std::string train_domain;
  std::string test_domain;
  std::string slice_id;
  double psnr; // +inf for identical images; printed as "inf"
  double ssim;
};

// Per-slice reconstruction metrics of a checkpoint on a test dataset.
// Masks follow the policy (per-sample seeds derived from mask.seed and the
// slice index), so records are deterministic.
std::vector<EvalRecord> evaluate_model(const CascadeCheckpoint& ckpt,
                                       const DatasetSpec& test_spec,
                                       const MaskArgs& mask,
                                       MaskPolicy policy = MaskPolicy::PerSample,
                                       const std::string& train_domain = "");

struct CrossCell {
  double psnr_mean, psnr_std;
  double ssim_mean, ssim_std;
  size_t count;
  bool diagonal; // train domain == test domain
};

// Mean +/- population std per (train, test) pair.
struct CrossDomainTable {
  std::vector<std::string> train_domains; // rows
  std::vector<std::string> test_domains;  // cols
  std::vector<CrossCell> cells;           // row-major

  const CrossCell& cell(size_t r, size_t c) const {
    return cells[r * test_domains.size() + c];
  }
};

// Aggregates records into the full train x test grid; a missing pair is an
// error naming every absent combination.
CrossDomainTable cross_domain_table(const std::vector<EvalRecord>& records);

std::string records_csv(const std::vector<EvalRecord>& records);
std::vector<EvalRecord> parse_records_csv(const std::string& csv);
std::string table_csv(const CrossDomainTable& table);
std::string table_json(const CrossDomainTable& table);

// Writes ground truth, reconstruction and gain-amplified |error| magnitude
// per slice as 8-bit grayscale PNGs (values clipped to [0, 1] first).
// Returns the written paths.
std::vector<std::filesystem::path> export_error_images(
    const CascadeCheckpoint& ckpt, const Dataset& data, const MaskArgs& mask,
    MaskPolicy policy, const std::filesystem::path& out_dir, double error_gain);

} // namespace xdr
