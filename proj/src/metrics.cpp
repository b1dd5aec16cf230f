#include "xdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "xdr/error.hpp"

namespace xdr {

namespace {
void require_same_shape(const RealImage& a, const RealImage& b, const char* op) {
  if (a.height != b.height || a.width != b.width)
    throw ValidationError(std::string(op) + ": shape mismatch");
}

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

std::vector<double> gaussian_kernel_1d() {
  std::vector<double> k(kWindow);
  const int half = kWindow / 2;
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - half;
    k[i] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable valid-mode convolution with the normalised Gaussian window.
std::vector<double> filter_valid(const std::vector<double>& img, int h, int w,
                                 const std::vector<double>& k) {
  const int oh = h - kWindow + 1, ow = w - kWindow + 1;
  std::vector<double> rows(static_cast<size_t>(h) * ow);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * img[static_cast<size_t>(r) * w + c + i];
      rows[static_cast<size_t>(r) * ow + c] = acc;
    }
  }
  std::vector<double> out(static_cast<size_t>(oh) * ow);
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * rows[static_cast<size_t>(r + i) * ow + c];
      out[static_cast<size_t>(r) * ow + c] = acc;
    }
  }
  return out;
}

} // namespace

double psnr(const RealImage& ref, const RealImage& test) {
  require_same_shape(ref, test, "psnr");
  double peak = 0.0;
  bool any_nonzero = false;
  for (float v : ref.v) {
    if (v != 0.0f) any_nonzero = true;
    peak = std::max(peak, static_cast<double>(v));
  }
  if (!any_nonzero) throw ValidationError("psnr: reference image is all-zero");
  double mse = 0.0;
  for (size_t i = 0; i < ref.v.size(); ++i) {
    const double d = static_cast<double>(ref.v[i]) - test.v[i];
    mse += d * d;
  }
  mse /= static_cast<double>(ref.v.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const RealImage& ref, const RealImage& test) {
  require_same_shape(ref, test, "ssim");
  if (std::min(ref.height, ref.width) < kWindow)
    throw ValidationError("ssim: image smaller than the 11x11 window");

  const size_t n = ref.v.size();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  double peak = 0.0;
  for (size_t i = 0; i < n; ++i) {
    x[i] = ref.v[i];
    y[i] = test.v[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
    peak = std::max(peak, x[i]);
  }
  if (peak <= 0.0) throw ValidationError("ssim: reference has no positive values");
  const double c1 = (kK1 * peak) * (kK1 * peak);
  const double c2 = (kK2 * peak) * (kK2 * peak);

  const auto k = gaussian_kernel_1d();
  const int h = ref.height, w = ref.width;
  const auto mu_x = filter_valid(x, h, w, k);
  const auto mu_y = filter_valid(y, h, w, k);
  const auto e_xx = filter_valid(xx, h, w, k);
  const auto e_yy = filter_valid(yy, h, w, k);
  const auto e_xy = filter_valid(xy, h, w, k);

  double acc = 0.0;
  for (size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i], my = mu_y[i];
    const double vx = e_xx[i] - mx * mx;
    const double vy = e_yy[i] - my * my;
    const double cxy = e_xy[i] - mx * my;
    acc += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
           ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return acc / static_cast<double>(mu_x.size());
}

} // namespace xdr
