#include "xdr/complex_image.hpp"

#include <cmath>
#include <string>

#include "xdr/error.hpp"

namespace xdr {

RealImage ComplexImage::magnitude() const {
  RealImage out(height, width);
  for (size_t i = 0; i < real.size(); ++i) {
    out.v[i] = static_cast<float>(
        std::sqrt(static_cast<double>(real[i]) * real[i] +
                  static_cast<double>(imag[i]) * imag[i]));
  }
  return out;
}

void ComplexImage::validate(const char* what_for) const {
  if (height <= 0 || width <= 0)
    throw ValidationError(std::string(what_for) + ": non-positive shape");
  const size_t expected = static_cast<size_t>(height) * width;
  if (real.size() != expected || imag.size() != expected)
    throw ValidationError(std::string(what_for) + ": plane size does not match shape");
  for (size_t i = 0; i < expected; ++i) {
    if (!std::isfinite(real[i]) || !std::isfinite(imag[i]))
      throw ValidationError(std::string(what_for) + ": non-finite value");
  }
}

double max_magnitude(const ComplexImage& img) {
  double best = 0.0;
  for (size_t i = 0; i < img.real.size(); ++i) {
    const double m = static_cast<double>(img.real[i]) * img.real[i] +
                     static_cast<double>(img.imag[i]) * img.imag[i];
    if (m > best) best = m;
  }
  return std::sqrt(best);
}

double norm2(const ComplexImage& img) {
  double acc = 0.0;
  for (size_t i = 0; i < img.real.size(); ++i) {
    acc += static_cast<double>(img.real[i]) * img.real[i] +
           static_cast<double>(img.imag[i]) * img.imag[i];
  }
  return std::sqrt(acc);
}

} // namespace xdr
