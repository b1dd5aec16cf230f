#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xdr/complex_image.hpp"

namespace xdr {

enum class PatchNorm { None, ZeroMean };

std::string to_string(PatchNorm n);
PatchNorm patch_norm_from_string(const std::string& s);

// Flattened square patches sampled from magnitude images, one row per
// patch, row-major within a patch.
struct PatchSet {
  int patch_size = 0;
  std::int64_t n = 0;
  std::vector<float> data; // n x patch_size^2
  std::string domain_id;
  std::uint64_t seed = 0;

  int dim() const { return patch_size * patch_size; }
  const float* row(std::int64_t i) const { return data.data() + i * dim(); }
};

// n patches at uniformly random (image, row, col) positions, taken from
// the per-slice max-normalised magnitude. Deterministic given seed.
PatchSet extract_patches(std::span<const ComplexImage> images, std::int64_t n,
                         int patch_size, std::uint64_t seed,
                         const std::string& domain_id,
                         PatchNorm norm = PatchNorm::None);

struct NNDistanceResult {
  std::string target_domain;
  std::string source_domain;
  std::vector<double> distances; // one per target patch
  std::vector<std::int64_t> argmin;
  double mean = 0.0;
  double std_dev = 0.0; // population
};

// Exact nearest-neighbour Euclidean distances from every target patch to
// the source set, via the blocked expansion |a-b|^2 = |a|^2 + |b|^2 - 2ab
// with negative clamping before the square root. The result does not
// depend on block_size; argmin ties break to the lowest source index.
NNDistanceResult nn_distances(const PatchSet& target, const PatchSet& source,
                              int block_size = 1024);

enum class CompareMethod { WilcoxonSignedRank, MannWhitney };

struct CompareResult {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double p_value = 1.0;
  CompareMethod method = CompareMethod::WilcoxonSignedRank;
};

// Compares two candidate source sets against one target set. The default
// test is the paired two-sided Wilcoxon signed-rank on per-target distance
// differences (both vectors index the same target patches); the unpaired
// Mann-Whitney variant is available behind the flag. Requires >= 10
// targets.
CompareResult compare_sources(const PatchSet& target, const PatchSet& source_a,
                              const PatchSet& source_b,
                              CompareMethod method = CompareMethod::WilcoxonSignedRank);

struct DistanceCell {
  bool present = false; // false on the omitted diagonal
  double mean = 0.0;
  double std_dev = 0.0;
  bool row_min = false;
};

struct DistanceTable {
  std::vector<std::string> target_ids; // rows
  std::vector<std::string> source_ids; // cols
  std::vector<DistanceCell> cells;     // row-major

  const DistanceCell& cell(size_t r, size_t c) const {
    return cells[r * source_ids.size() + c];
  }
};

// mean +/- std of NN distances per (target, source) pair; cells with
// matching ids are omitted, and the smallest mean per row is flagged.
DistanceTable distance_table(std::span<const PatchSet> targets,
                             std::span<const PatchSet> sources, int block_size = 1024);

std::string distance_table_csv(const DistanceTable& table);
std::string distance_table_json(const DistanceTable& table);

} // namespace xdr
