#include "xdr/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "xdr/error.hpp"

namespace xdr {
namespace {

// FFTW plan creation is not thread-safe; execution via the new-array
// interface is. Plans are cached per (H, W, sign) and created against
// fftw_malloc'd dummy buffers so any fftw_malloc'd argument satisfies the
// plan's alignment. FFTW_ESTIMATE keeps planning deterministic.
class PlanCache {
public:
  fftw_plan get(int h, int w, int sign) {
    std::scoped_lock lock(mu_);
    auto key = std::make_tuple(h, w, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const size_t n = static_cast<size_t>(h) * w;
    fftw_complex* in = fftw_alloc_complex(n);
    fftw_complex* out = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_2d(h, w, in, out, sign, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    if (!p) throw std::runtime_error("fftw planning failed");
    plans_.emplace(key, p);
    return p;
  }

  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

FftwBuffer alloc(size_t n) { return FftwBuffer(fftw_alloc_complex(n)); }

// shift helpers for the centered layout; for odd n the two differ.
inline int ifftshift_src(int i, int n) { return (i + n / 2) % n; }
inline int fftshift_src(int i, int n) { return (i + n - n / 2) % n; }

void run(const double* in_re_im, double* out_re_im, int h, int w, bool inverse) {
  const size_t n = static_cast<size_t>(h) * w;
  FftwBuffer in = alloc(n);
  FftwBuffer out = alloc(n);

  // ifftshift on the way in
  for (int r = 0; r < h; ++r) {
    const int sr = ifftshift_src(r, h);
    for (int c = 0; c < w; ++c) {
      const int sc = ifftshift_src(c, w);
      const size_t src = 2 * (static_cast<size_t>(sr) * w + sc);
      const size_t dst = static_cast<size_t>(r) * w + c;
      in[dst][0] = in_re_im[src];
      in[dst][1] = in_re_im[src + 1];
    }
  }

  fftw_plan plan = PlanCache::instance().get(h, w, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
  fftw_execute_dft(plan, in.get(), out.get());

  // fftshift on the way out, plus orthonormal scaling (FFTW leaves both
  // directions unscaled).
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int r = 0; r < h; ++r) {
    const int sr = fftshift_src(r, h);
    for (int c = 0; c < w; ++c) {
      const int sc = fftshift_src(c, w);
      const size_t src = static_cast<size_t>(sr) * w + sc;
      const size_t dst = 2 * (static_cast<size_t>(r) * w + c);
      out_re_im[dst] = out[src][0] * scale;
      out_re_im[dst + 1] = out[src][1] * scale;
    }
  }
}

ComplexImage transform(const ComplexImage& img, bool inverse, const char* name) {
  img.validate(name);
  const size_t n = img.size();
  std::vector<double> buf(2 * n);
  for (size_t i = 0; i < n; ++i) {
    buf[2 * i] = img.real[i];
    buf[2 * i + 1] = img.imag[i];
  }
  std::vector<double> res(2 * n);
  run(buf.data(), res.data(), img.height, img.width, inverse);
  ComplexImage out(img.height, img.width);
  for (size_t i = 0; i < n; ++i) {
    out.real[i] = static_cast<float>(res[2 * i]);
    out.imag[i] = static_cast<float>(res[2 * i + 1]);
  }
  return out;
}

} // namespace

ComplexImage fft2c(const ComplexImage& img) { return transform(img, false, "fft2c"); }

ComplexImage ifft2c(const ComplexImage& ksp) { return transform(ksp, true, "ifft2c"); }

void fft2c_double(std::vector<std::complex<double>>& data, int height, int width,
                  bool inverse) {
  const size_t n = static_cast<size_t>(height) * width;
  if (data.size() != n) throw ValidationError("fft2c_double: buffer size mismatch");
  std::vector<double> res(2 * n);
  run(reinterpret_cast<const double*>(data.data()), res.data(), height, width, inverse);
  for (size_t i = 0; i < n; ++i) data[i] = {res[2 * i], res[2 * i + 1]};
}

} // namespace xdr
