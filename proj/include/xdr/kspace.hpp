#pragma once

#include <utility>

#include "xdr/complex_image.hpp"
#include "xdr/mask.hpp"

namespace xdr {

struct Undersampled {
  ComplexImage kspace; // fft2c(gt) with unsampled entries zeroed
  ComplexImage zero_filled;
};

// Retrospective undersampling: kspace = fft2c(gt) .* mask,
// zero_filled = ifft2c(kspace).
Undersampled undersample(const ComplexImage& gt, const SamplingMask& mask);

// Data-consistency projection. Off-mask k-space passes through; on-mask
// k-space is (fft2c(pred) + lambda * kspace_us) / (1 + lambda). lambda may
// be +infinity, meaning hard replacement by the measured data. lambda = 0
// returns pred unchanged.
ComplexImage data_consistency(const ComplexImage& pred, const ComplexImage& kspace_us,
                              const SamplingMask& mask, double lambda);

} // namespace xdr
