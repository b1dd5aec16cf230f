#pragma once

#include <complex>
#include <vector>

#include "xdr/complex_image.hpp"

namespace xdr {

// Centered, orthonormal 2D DFT pair:
//   fft2c  = fftshift( FFT( ifftshift(x) ) ) / sqrt(H*W)
//   ifft2c = fftshift( IFFT( ifftshift(k) ) ) * sqrt(H*W) / (H*W)
// DC sits at (H/2, W/2) (floor). Parseval holds exactly under this
// convention. Input planes are float32; the transform itself runs in
// double via FFTW. Non-finite input is rejected.
ComplexImage fft2c(const ComplexImage& img);
ComplexImage ifft2c(const ComplexImage& ksp);

// Double-precision working variants on interleaved row-major buffers,
// for callers that chain transforms and want to defer the float32 cast.
void fft2c_double(std::vector<std::complex<double>>& data, int height, int width,
                  bool inverse);

// Index of the DC bin along an axis of length n under the centered layout.
inline int dc_index(int n) { return n / 2; }

} // namespace xdr
