#pragma once

#include <unistd.h>

#include <complex>
#include <filesystem>
#include <string>

#include "xdr/complex_image.hpp"
#include "xdr/rng.hpp"

namespace test {

inline xdr::ComplexImage random_image(int h, int w, std::uint64_t seed,
                                      double scale = 1.0) {
  xdr::Rng rng(seed);
  xdr::ComplexImage img(h, w);
  for (size_t i = 0; i < img.size(); ++i) {
    img.real[i] = static_cast<float>(rng.gaussian() * scale);
    img.imag[i] = static_cast<float>(rng.gaussian() * scale);
  }
  return img;
}

// Plain O(n^2) centered orthonormal DFT, no FFT library involved; the
// independent reference for fft2c/ifft2c and everything built on them.
// Only meant for small sizes.
inline xdr::ComplexImage naive_fft2c(const xdr::ComplexImage& img, bool inverse) {
  const int h = img.height, w = img.width;
  const double sign = inverse ? 1.0 : -1.0;
  const double scale = 1.0 / std::sqrt(static_cast<double>(h) * w);
  auto ishift = [](int i, int n) { return (i + n / 2) % n; };   // ifftshift source
  auto oshift = [](int i, int n) { return (i + n - n / 2) % n; }; // fftshift source

  std::vector<std::complex<double>> shifted(static_cast<size_t>(h) * w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const int sr = ishift(r, h), sc = ishift(c, w);
      shifted[static_cast<size_t>(r) * w + c] = {img.re(sr, sc), img.im(sr, sc)};
    }

  std::vector<std::complex<double>> dft(shifted.size());
  for (int u = 0; u < h; ++u) {
    for (int v = 0; v < w; ++v) {
      std::complex<double> acc{0.0, 0.0};
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
          const double angle = 2.0 * M_PI * (static_cast<double>(u) * r / h +
                                             static_cast<double>(v) * c / w);
          acc += shifted[static_cast<size_t>(r) * w + c] *
                 std::complex<double>(std::cos(angle), sign * std::sin(angle));
        }
      dft[static_cast<size_t>(u) * w + v] = acc * scale;
    }
  }

  xdr::ComplexImage out(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const int sr = oshift(r, h), sc = oshift(c, w);
      const auto& z = dft[static_cast<size_t>(sr) * w + sc];
      out.re(r, c) = static_cast<float>(z.real());
      out.im(r, c) = static_cast<float>(z.imag());
    }
  return out;
}

inline double max_abs_diff(const xdr::ComplexImage& a, const xdr::ComplexImage& b) {
  double best = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    best = std::max(best, static_cast<double>(std::fabs(a.real[i] - b.real[i])));
    best = std::max(best, static_cast<double>(std::fabs(a.imag[i] - b.imag[i])));
  }
  return best;
}

// Unique scratch directory under the system temp root, removed on scope exit.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("xdr-test-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

} // namespace test
