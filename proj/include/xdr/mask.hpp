#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace xdr {

enum class MaskMode { Lines1D, Points2D };

std::string to_string(MaskMode mode);
MaskMode mask_mode_from_string(const std::string& s);

// Boolean k-space sampling pattern under the centered FFT layout.
// In Lines1D mode whole phase-encode lines (columns) are sampled, so each
// column is constant along the frequency-encode (row) axis.
struct SamplingMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> sampled; // row-major, 0/1
  double acceleration = 1.0;
  double center_fraction = 0.0;
  double sigma = 0.25; // Gaussian width as a fraction of the k-space half-width
  MaskMode mode = MaskMode::Lines1D;
  std::uint64_t seed = 0;

  bool at(int r, int c) const {
    return sampled[static_cast<size_t>(r) * width + c] != 0;
  }
  size_t count() const;
  double fraction() const;
};

// Variable-density Cartesian mask. The fully-sampled center band (the
// round(center_fraction * lines) lines closest to DC, or the analogous
// centered rectangle of points in Points2D mode) is always included; the
// remaining budget round(lines / acceleration) - center is drawn without
// replacement with probability proportional to exp(-d^2 / (2 (sigma *
// halfwidth)^2)), d being the distance from DC. Deterministic given seed.
SamplingMask generate_mask(int height, int width, double acceleration,
                           double center_fraction, double sigma, MaskMode mode,
                           std::uint64_t seed);

} // namespace xdr
