#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "xdr/complex_image.hpp"

namespace xdr {

// Parameters for synthetic phase generation. The phase map is low-pass
// filtered Gaussian noise rescaled into [-phase_range, +phase_range]; MRI
// background phase varies slowly across the field of view and this
// construction is a cheap deterministic stand-in for it.
struct PhaseParams {
  double smoothness_sigma = 16.0; // spatial Gaussian scale, pixels
  double phase_range = M_PI;      // radians, in (0, pi]
  std::uint64_t seed = 0;

  void validate() const;
};

// The phase map alone, in double precision:
//  1. white Gaussian noise field drawn row-major from params.seed
//  2. centered spectrum multiplied by exp(-(f/sigma_f)^2 / 2) per axis,
//     with sigma_f = N / (2*pi*smoothness_sigma) for an axis of length N
//  3. real part, linearly rescaled so min -> -phase_range, max -> +phase_range
// A constant field (degenerate rescale) maps to all-zero phase.
std::vector<double> phase_field(int height, int width, const PhaseParams& params);

// magnitude * exp(i*phi) with phi from phase_field. Magnitude values must
// be finite and within [0, 1]; |output| equals the input magnitude to
// float32 precision.
ComplexImage synthesize_phase(const RealImage& magnitude, const PhaseParams& params);

} // namespace xdr
