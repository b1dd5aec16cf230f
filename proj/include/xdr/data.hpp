#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "xdr/complex_image.hpp"
#include "xdr/phase_synth.hpp"

namespace xdr {

enum class DatasetKind { ComplexSlices, NaturalImages, Phantom };
enum class Split { Train, Val, Test };
enum class PhantomFamily { Ellipses, Rectangles, Mixed };

std::string to_string(DatasetKind k);
std::string to_string(Split s);
std::string to_string(PhantomFamily f);
DatasetKind dataset_kind_from_string(const std::string& s);
Split split_from_string(const std::string& s);
PhantomFamily phantom_family_from_string(const std::string& s);

struct DatasetSpec {
  std::string id;
  DatasetKind kind = DatasetKind::ComplexSlices;
  std::filesystem::path root; // complex-slices / natural-images: <root>/<split>/*
  int target_height = 0;      // required for natural-images and phantom
  int target_width = 0;
  Split split = Split::Train;
  PhaseParams phase;                                 // natural-images: phase.seed is the base
  PhantomFamily family = PhantomFamily::Ellipses;    // phantom only
  int count = 0;                                     // phantom only, per split
  std::uint64_t seed = 0;                            // phantom only

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static DatasetSpec from_json(const nlohmann::json& j);

  DatasetSpec with_split(Split s, int split_count = -1) const;
};

struct LoadReport {
  int scanned = 0;
  int decoded = 0;
  int skipped = 0;
  std::vector<std::string> skipped_files;

  nlohmann::ordered_json to_json() const;
};

// Slices come out max-magnitude-normalised (peak 1) in a deterministic
// lexicographic order, one id per slice.
struct Dataset {
  std::vector<ComplexImage> slices;
  std::vector<std::string> ids;
  LoadReport report;
};

Dataset load_dataset(const DatasetSpec& spec);

// <root>/<split>/*.cimg in filename order. Malformed containers are hard
// errors naming the file; an empty directory is an error.
Dataset load_complex_dataset(const DatasetSpec& spec);

// <root>/<split>/*.{png,jpg,jpeg,bmp}: decode, grayscale via
// 0.299R + 0.587G + 0.114B scaled to [0,1], center-crop to the largest
// centered square, bilinear resize to target shape, then synthesize phase
// with the per-image seed phase.seed ^ fnv1a64(filename). Undecodable or
// degenerate files are skipped and counted in the report.
Dataset load_natural_dataset(const DatasetSpec& spec);

// Same pipeline over a flat directory of image files.
Dataset load_natural_dir(const std::filesystem::path& dir, int target_height,
                         int target_width, const PhaseParams& base_phase);

// Deterministic synthetic slices: 3-8 ellipses or axis-aligned rectangles
// with intensities in [0.2, 1] painted on a zero background, plus smooth
// synthetic phase. The mixed family draws each slice from either family
// with equal probability.
Dataset generate_phantoms(const DatasetSpec& spec);

// Divides by the max magnitude so the peak is exactly 1; returns the
// scale for the inverse mapping. All-zero slices are rejected.
std::pair<ComplexImage, double> normalize_slice(const ComplexImage& img);

} // namespace xdr
