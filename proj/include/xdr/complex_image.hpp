#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace xdr {

// A real-valued 2D image, row-major float32.
struct RealImage {
  int height = 0;
  int width = 0;
  std::vector<float> v;

  RealImage() = default;
  RealImage(int h, int w) : height(h), width(w), v(static_cast<size_t>(h) * w, 0.0f) {}

  float& at(int r, int c) { return v[static_cast<size_t>(r) * width + c]; }
  float at(int r, int c) const { return v[static_cast<size_t>(r) * width + c]; }
  size_t size() const { return v.size(); }
};

// A 2D complex-valued slice stored as separate real/imag float32 planes.
// The same type carries both image-space and k-space data; which domain a
// value lives in is part of each operation's contract.
struct ComplexImage {
  int height = 0;
  int width = 0;
  std::vector<float> real;
  std::vector<float> imag;

  ComplexImage() = default;
  ComplexImage(int h, int w)
      : height(h),
        width(w),
        real(static_cast<size_t>(h) * w, 0.0f),
        imag(static_cast<size_t>(h) * w, 0.0f) {}

  size_t size() const { return real.size(); }

  float& re(int r, int c) { return real[static_cast<size_t>(r) * width + c]; }
  float re(int r, int c) const { return real[static_cast<size_t>(r) * width + c]; }
  float& im(int r, int c) { return imag[static_cast<size_t>(r) * width + c]; }
  float im(int r, int c) const { return imag[static_cast<size_t>(r) * width + c]; }

  bool same_shape(const ComplexImage& o) const {
    return height == o.height && width == o.width;
  }

  RealImage magnitude() const;

  // Checks shape consistency and that every value is finite. Throws
  // ValidationError with `what_for` in the message on violation.
  void validate(const char* what_for) const;
};

double max_magnitude(const ComplexImage& img);

// L2 norm over both planes, accumulated in double.
double norm2(const ComplexImage& img);

} // namespace xdr
