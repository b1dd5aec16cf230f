#pragma once

#include <limits>

#include "xdr/complex_image.hpp"

namespace xdr {

// 10*log10(peak^2 / MSE) with peak = max(ref). Identical images return
// +infinity. The reference must not be all-zero.
double psnr(const RealImage& ref, const RealImage& test);

// Mean local SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
// K2 = 0.03, dynamic range = max(ref). Windows are evaluated only where
// they fit entirely inside the image, which requires min(H, W) >= 11.
double ssim(const RealImage& ref, const RealImage& test);

inline bool is_inf_psnr(double v) { return v == std::numeric_limits<double>::infinity(); }

} // namespace xdr
