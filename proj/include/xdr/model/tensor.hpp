#pragma once

#include <cstddef>
#include <vector>

#include "xdr/complex_image.hpp"

namespace xdr {

// CHW float32 tensor. Complex slices map to 2 channels: 0 = real, 1 = imag.
struct Tensor {
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<float> v;

  Tensor() = default;
  Tensor(int c_, int h_, int w_)
      : c(c_), h(h_), w(w_), v(static_cast<size_t>(c_) * h_ * w_, 0.0f) {}

  size_t size() const { return v.size(); }
  size_t plane() const { return static_cast<size_t>(h) * w; }
  float* chan(int ci) { return v.data() + static_cast<size_t>(ci) * plane(); }
  const float* chan(int ci) const { return v.data() + static_cast<size_t>(ci) * plane(); }
};

Tensor to_tensor(const ComplexImage& img);
ComplexImage to_complex(const Tensor& t);

} // namespace xdr
