#include "xdr/phase_synth.hpp"

#include <algorithm>
#include <complex>

#include "xdr/error.hpp"
#include "xdr/fft.hpp"
#include "xdr/rng.hpp"

namespace xdr {

void PhaseParams::validate() const {
  if (!(smoothness_sigma > 0.0))
    throw ValidationError("phase params: smoothness_sigma must be > 0");
  if (!(phase_range > 0.0) || phase_range > M_PI)
    throw ValidationError("phase params: phase_range must be in (0, pi]");
}

std::vector<double> phase_field(int height, int width, const PhaseParams& params) {
  params.validate();
  if (height <= 0 || width <= 0)
    throw ValidationError("phase_field: non-positive shape");

  const size_t n = static_cast<size_t>(height) * width;
  Rng rng(params.seed);
  std::vector<std::complex<double>> field(n);
  for (size_t i = 0; i < n; ++i) field[i] = {rng.gaussian(), 0.0};

  fft2c_double(field, height, width, false);

  const double sig_fr = height / (2.0 * M_PI * params.smoothness_sigma);
  const double sig_fc = width / (2.0 * M_PI * params.smoothness_sigma);
  const int dr = dc_index(height), dc = dc_index(width);
  for (int r = 0; r < height; ++r) {
    const double fr = (r - dr) / sig_fr;
    for (int c = 0; c < width; ++c) {
      const double fc = (c - dc) / sig_fc;
      field[static_cast<size_t>(r) * width + c] *= std::exp(-(fr * fr + fc * fc) / 2.0);
    }
  }

  fft2c_double(field, height, width, true);

  std::vector<double> phi(n);
  for (size_t i = 0; i < n; ++i) phi[i] = field[i].real();
  const auto [mn_it, mx_it] = std::minmax_element(phi.begin(), phi.end());
  const double mn = *mn_it, mx = *mx_it;
  if (mx - mn <= 0.0) {
    std::fill(phi.begin(), phi.end(), 0.0);
    return phi;
  }
  const double r = params.phase_range;
  for (double& p : phi)
    p = std::clamp(-r + 2.0 * r * (p - mn) / (mx - mn), -r, r);
  return phi;
}

ComplexImage synthesize_phase(const RealImage& magnitude, const PhaseParams& params) {
  params.validate();
  if (magnitude.height <= 0 || magnitude.width <= 0)
    throw ValidationError("synthesize_phase: non-positive shape");
  if (magnitude.v.size() != static_cast<size_t>(magnitude.height) * magnitude.width)
    throw ValidationError("synthesize_phase: plane size does not match shape");
  for (float m : magnitude.v) {
    if (!std::isfinite(m) || m < 0.0f || m > 1.0f)
      throw ValidationError("synthesize_phase: magnitude values must be in [0, 1]");
  }

  const std::vector<double> phi = phase_field(magnitude.height, magnitude.width, params);
  ComplexImage out(magnitude.height, magnitude.width);
  for (size_t i = 0; i < phi.size(); ++i) {
    const double m = magnitude.v[i];
    out.real[i] = static_cast<float>(m * std::cos(phi[i]));
    out.imag[i] = static_cast<float>(m * std::sin(phi[i]));
  }
  return out;
}

} // namespace xdr
