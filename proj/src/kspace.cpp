#include "xdr/kspace.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "xdr/error.hpp"
#include "xdr/fft.hpp"

namespace xdr {

namespace {
void require_shape(const ComplexImage& img, const SamplingMask& mask, const char* op) {
  if (img.height != mask.height || img.width != mask.width)
    throw ValidationError(std::string(op) + ": image/mask shape mismatch");
}
} // namespace

Undersampled undersample(const ComplexImage& gt, const SamplingMask& mask) {
  require_shape(gt, mask, "undersample");
  Undersampled out;
  out.kspace = fft2c(gt);
  for (size_t i = 0; i < out.kspace.size(); ++i) {
    if (!mask.sampled[i]) {
      out.kspace.real[i] = 0.0f;
      out.kspace.imag[i] = 0.0f;
    }
  }
  out.zero_filled = ifft2c(out.kspace);
  return out;
}

ComplexImage data_consistency(const ComplexImage& pred, const ComplexImage& kspace_us,
                              const SamplingMask& mask, double lambda) {
  require_shape(pred, mask, "data_consistency");
  if (!pred.same_shape(kspace_us))
    throw ValidationError("data_consistency: pred/kspace shape mismatch");
  if (std::isnan(lambda) || lambda < 0.0)
    throw ValidationError("data_consistency: lambda must be non-negative");

  const bool hard = std::isinf(lambda);
  const size_t n = pred.size();
  std::vector<std::complex<double>> k(n);
  for (size_t i = 0; i < n; ++i) k[i] = {pred.real[i], pred.imag[i]};
  fft2c_double(k, pred.height, pred.width, false);

  for (size_t i = 0; i < n; ++i) {
    if (!mask.sampled[i]) continue;
    const std::complex<double> meas(kspace_us.real[i], kspace_us.imag[i]);
    k[i] = hard ? meas : (k[i] + lambda * meas) / (1.0 + lambda);
  }

  fft2c_double(k, pred.height, pred.width, true);
  ComplexImage out(pred.height, pred.width);
  for (size_t i = 0; i < n; ++i) {
    out.real[i] = static_cast<float>(k[i].real());
    out.imag[i] = static_cast<float>(k[i].imag());
  }
  return out;
}

} // namespace xdr
