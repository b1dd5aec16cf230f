#include "xdr/model/cascade.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstring>

#include "xdr/error.hpp"
#include "xdr/fft.hpp"
#include "xdr/rng.hpp"

namespace xdr {

Tensor to_tensor(const ComplexImage& img) {
  Tensor t(2, img.height, img.width);
  std::memcpy(t.chan(0), img.real.data(), img.size() * sizeof(float));
  std::memcpy(t.chan(1), img.imag.data(), img.size() * sizeof(float));
  return t;
}

ComplexImage to_complex(const Tensor& t) {
  if (t.c != 2) throw ValidationError("to_complex: tensor must have 2 channels");
  ComplexImage img(t.h, t.w);
  std::memcpy(img.real.data(), t.chan(0), img.size() * sizeof(float));
  std::memcpy(img.imag.data(), t.chan(1), img.size() * sizeof(float));
  return img;
}

void CascadeConfig::validate() const {
  if (n_cascades < 1) throw ValidationError("cascade config: n_cascades must be >= 1");
  if (n_conv_per_block < 2)
    throw ValidationError("cascade config: n_conv_per_block must be >= 2");
  if (n_filters < 1) throw ValidationError("cascade config: n_filters must be >= 1");
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw ValidationError("cascade config: kernel_size must be odd and positive");
  if (std::isnan(dc_lambda) || dc_lambda < 0.0)
    throw ValidationError("cascade config: dc_lambda must be non-negative");
  if (input_channels != 2)
    throw ValidationError("cascade config: input_channels is fixed at 2");
}

nlohmann::ordered_json CascadeConfig::to_json() const {
  nlohmann::ordered_json j;
  j["n_cascades"] = n_cascades;
  j["n_conv_per_block"] = n_conv_per_block;
  j["n_filters"] = n_filters;
  j["kernel_size"] = kernel_size;
  // JSON has no infinity literal; persist it as the string "inf".
  if (std::isinf(dc_lambda))
    j["dc_lambda"] = "inf";
  else
    j["dc_lambda"] = dc_lambda;
  j["input_channels"] = input_channels;
  return j;
}

CascadeConfig CascadeConfig::from_json(const nlohmann::json& j) {
  CascadeConfig c;
  c.n_cascades = j.at("n_cascades").get<int>();
  c.n_conv_per_block = j.at("n_conv_per_block").get<int>();
  c.n_filters = j.at("n_filters").get<int>();
  c.kernel_size = j.at("kernel_size").get<int>();
  const auto& dl = j.at("dc_lambda");
  if (dl.is_string()) {
    if (dl.get<std::string>() != "inf")
      throw ValidationError("cascade config: dc_lambda string must be 'inf'");
    c.dc_lambda = std::numeric_limits<double>::infinity();
  } else {
    c.dc_lambda = dl.get<double>();
  }
  if (j.contains("input_channels")) c.input_channels = j.at("input_channels").get<int>();
  c.validate();
  return c;
}

CascadeModel::CascadeModel(const CascadeConfig& config) : config_(config) {
  config_.validate();
  size_t offset = 0;
  for (int cas = 0; cas < config_.n_cascades; ++cas) {
    for (int l = 0; l < config_.n_conv_per_block; ++l) {
      ConvShape s;
      s.in_c = (l == 0) ? config_.input_channels : config_.n_filters;
      s.out_c = (l == config_.n_conv_per_block - 1) ? config_.input_channels
                                                    : config_.n_filters;
      s.kernel = config_.kernel_size;
      s.w_offset = offset;
      offset += s.w_count();
      s.b_offset = offset;
      offset += static_cast<size_t>(s.out_c);
      layers_.push_back(s);
    }
  }
  params_.assign(offset, 0.0f);
}

void CascadeModel::init(std::uint64_t seed) {
  Rng rng(seed);
  for (size_t li = 0; li < layers_.size(); ++li) {
    const ConvShape& s = layers_[li];
    const bool last_of_block =
        (li % config_.n_conv_per_block) == static_cast<size_t>(config_.n_conv_per_block - 1);
    const double fan_in = static_cast<double>(s.in_c) * s.kernel * s.kernel;
    const double std_dev = std::sqrt(2.0 / fan_in);
    for (size_t i = 0; i < s.w_count(); ++i) {
      const double g = rng.gaussian(); // always consume, keeps streams aligned
      params_[s.w_offset + i] = last_of_block ? 0.0f : static_cast<float>(g * std_dev);
    }
    for (int i = 0; i < s.out_c; ++i) params_[s.b_offset + i] = 0.0f;
  }
}

namespace {

using MatRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatRM>;
using CMapRM = Eigen::Map<const MatRM>;

// col has one row per (in_c, dr, dc) and one column per output pixel.
void im2col(const Tensor& in, int k, std::vector<float>& col) {
  const int h = in.h, w = in.w, pad = k / 2;
  const size_t plane = in.plane();
  col.assign(static_cast<size_t>(in.c) * k * k * plane, 0.0f);
  size_t row = 0;
  for (int ci = 0; ci < in.c; ++ci) {
    const float* src = in.chan(ci);
    for (int dr = 0; dr < k; ++dr) {
      for (int dc = 0; dc < k; ++dc, ++row) {
        float* dst = col.data() + row * plane;
        const int c_lo = std::max(0, pad - dc);
        const int c_hi = std::min(w, w + pad - dc);
        if (c_hi <= c_lo) continue;
        for (int r = 0; r < h; ++r) {
          const int sr = r + dr - pad;
          if (sr < 0 || sr >= h) continue;
          std::memcpy(dst + static_cast<size_t>(r) * w + c_lo,
                      src + static_cast<size_t>(sr) * w + (c_lo + dc - pad),
                      static_cast<size_t>(c_hi - c_lo) * sizeof(float));
        }
      }
    }
  }
}

void col2im(const std::vector<float>& col, int k, Tensor& grad_in) {
  const int h = grad_in.h, w = grad_in.w, pad = k / 2;
  const size_t plane = grad_in.plane();
  std::fill(grad_in.v.begin(), grad_in.v.end(), 0.0f);
  size_t row = 0;
  for (int ci = 0; ci < grad_in.c; ++ci) {
    float* dst = grad_in.chan(ci);
    for (int dr = 0; dr < k; ++dr) {
      for (int dc = 0; dc < k; ++dc, ++row) {
        const float* src = col.data() + row * plane;
        const int c_lo = std::max(0, pad - dc);
        const int c_hi = std::min(w, w + pad - dc);
        if (c_hi <= c_lo) continue;
        for (int r = 0; r < h; ++r) {
          const int sr = r + dr - pad;
          if (sr < 0 || sr >= h) continue;
          float* d = dst + static_cast<size_t>(sr) * w + (c_lo + dc - pad);
          const float* s = src + static_cast<size_t>(r) * w + c_lo;
          for (int i = 0; i < c_hi - c_lo; ++i) d[i] += s[i];
        }
      }
    }
  }
}

void relu_inplace(Tensor& t) {
  for (float& v : t.v) v = v > 0.0f ? v : 0.0f;
}

// Multiplicative on-mask factor of the DC layer's k-space map; the layer
// is complex-linear with a real diagonal, hence self-adjoint, so backward
// reuses the same routine without the measured-data term.
void dc_filter(Tensor& t, const ComplexImage* kspace_us, const SamplingMask& mask,
               double lambda) {
  const size_t n = t.plane();
  std::vector<std::complex<double>> k(n);
  const float* re = t.chan(0);
  const float* im = t.chan(1);
  for (size_t i = 0; i < n; ++i) k[i] = {re[i], im[i]};
  fft2c_double(k, t.h, t.w, false);

  const bool hard = std::isinf(lambda);
  const double keep = hard ? 0.0 : 1.0 / (1.0 + lambda);
  for (size_t i = 0; i < n; ++i) {
    if (!mask.sampled[i]) continue;
    k[i] *= keep;
    if (kspace_us) {
      const std::complex<double> meas(kspace_us->real[i], kspace_us->imag[i]);
      k[i] += hard ? meas : lambda * meas / (1.0 + lambda);
    }
  }

  fft2c_double(k, t.h, t.w, true);
  float* ore = t.chan(0);
  float* oim = t.chan(1);
  for (size_t i = 0; i < n; ++i) {
    ore[i] = static_cast<float>(k[i].real());
    oim[i] = static_cast<float>(k[i].imag());
  }
}

void check_finite(const Tensor& t, int cascade_index) {
  for (float v : t.v) {
    if (!std::isfinite(v))
      throw std::runtime_error("non-finite activation in cascade " +
                               std::to_string(cascade_index));
  }
}

} // namespace

void CascadeModel::conv_forward(const ConvShape& shape, const Tensor& in, Tensor& out,
                                std::vector<float>& col) const {
  im2col(in, shape.kernel, col);
  const size_t plane = in.plane();
  const size_t k2c = static_cast<size_t>(shape.in_c) * shape.kernel * shape.kernel;
  CMapRM wmat(params_.data() + shape.w_offset, shape.out_c, static_cast<Eigen::Index>(k2c));
  CMapRM colmat(col.data(), static_cast<Eigen::Index>(k2c), static_cast<Eigen::Index>(plane));
  out = Tensor(shape.out_c, in.h, in.w);
  MapRM outmat(out.v.data(), shape.out_c, static_cast<Eigen::Index>(plane));
  outmat.noalias() = wmat * colmat;
  for (int oc = 0; oc < shape.out_c; ++oc)
    outmat.row(oc).array() += params_[shape.b_offset + oc];
}

void CascadeModel::conv_backward(const ConvShape& shape, const Tensor& in,
                                 const Tensor& grad_out, Tensor& grad_in,
                                 std::vector<float>& grad_params,
                                 std::vector<float>& col) const {
  const size_t plane = in.plane();
  const size_t k2c = static_cast<size_t>(shape.in_c) * shape.kernel * shape.kernel;

  CMapRM gout(grad_out.v.data(), shape.out_c, static_cast<Eigen::Index>(plane));

  im2col(in, shape.kernel, col);
  CMapRM colmat(col.data(), static_cast<Eigen::Index>(k2c), static_cast<Eigen::Index>(plane));
  MapRM gw(grad_params.data() + shape.w_offset, shape.out_c, static_cast<Eigen::Index>(k2c));
  gw.noalias() += gout * colmat.transpose();
  for (int oc = 0; oc < shape.out_c; ++oc)
    grad_params[shape.b_offset + oc] += gout.row(oc).sum();

  CMapRM wmat(params_.data() + shape.w_offset, shape.out_c, static_cast<Eigen::Index>(k2c));
  std::vector<float> gcol(k2c * plane);
  MapRM gcolmat(gcol.data(), static_cast<Eigen::Index>(k2c), static_cast<Eigen::Index>(plane));
  gcolmat.noalias() = wmat.transpose() * gout;
  grad_in = Tensor(shape.in_c, in.h, in.w);
  col2im(gcol, shape.kernel, grad_in);
}

Tensor CascadeModel::forward_train(const Tensor& x0, const ComplexImage& kspace_us,
                                   const SamplingMask& mask, Workspace& ws) const {
  if (x0.c != config_.input_channels)
    throw ValidationError("cascade forward: input must have 2 channels");
  if (x0.h != mask.height || x0.w != mask.width ||
      kspace_us.height != mask.height || kspace_us.width != mask.width)
    throw ValidationError("cascade forward: shape mismatch between input, k-space and mask");
  if (x0.h < config_.kernel_size || x0.w < config_.kernel_size)
    throw ValidationError("cascade forward: image smaller than the kernel");

  const int nd = config_.n_conv_per_block;
  ws.cascade_inputs.resize(config_.n_cascades);
  ws.conv_inputs.assign(config_.n_cascades, {});

  Tensor x = x0;
  Tensor t, conv_out;
  for (int cas = 0; cas < config_.n_cascades; ++cas) {
    ws.cascade_inputs[cas] = x;
    ws.conv_inputs[cas].resize(nd);
    t = x;
    for (int l = 0; l < nd; ++l) {
      ws.conv_inputs[cas][l] = t;
      conv_forward(layer(cas, l), t, conv_out, ws.col);
      t = std::move(conv_out);
      if (l < nd - 1) relu_inplace(t);
    }
    for (size_t i = 0; i < x.size(); ++i) t.v[i] += x.v[i]; // residual
    dc_filter(t, &kspace_us, mask, config_.dc_lambda);
    check_finite(t, cas);
    x = std::move(t);
  }
  return x;
}

ComplexImage CascadeModel::forward(const ComplexImage& zero_filled,
                                   const ComplexImage& kspace_us,
                                   const SamplingMask& mask) const {
  Workspace ws;
  return to_complex(forward_train(to_tensor(zero_filled), kspace_us, mask, ws));
}

void CascadeModel::backward(const Tensor& grad_output, const SamplingMask& mask,
                            Workspace& ws, std::vector<float>& grad_params) const {
  if (grad_params.size() != params_.size())
    throw ValidationError("cascade backward: grad buffer size mismatch");
  const int nd = config_.n_conv_per_block;

  Tensor g = grad_output;
  Tensor gb, gin;
  for (int cas = config_.n_cascades - 1; cas >= 0; --cas) {
    dc_filter(g, nullptr, mask, config_.dc_lambda);
    gb = g;
    for (int l = nd - 1; l >= 0; --l) {
      conv_backward(layer(cas, l), ws.conv_inputs[cas][l], gb, gin, grad_params, ws.col);
      gb = std::move(gin);
      if (l > 0) {
        // undo the ReLU that produced this conv's input
        const Tensor& act = ws.conv_inputs[cas][l];
        for (size_t i = 0; i < gb.size(); ++i)
          if (act.v[i] <= 0.0f) gb.v[i] = 0.0f;
      }
    }
    for (size_t i = 0; i < g.size(); ++i) g.v[i] += gb.v[i]; // residual branch
  }
}

double mse_loss(const Tensor& pred, const Tensor& gt) {
  if (pred.c != gt.c || pred.h != gt.h || pred.w != gt.w)
    throw ValidationError("mse_loss: shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred.v[i]) - gt.v[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.plane());
}

double mse_loss(const ComplexImage& pred, const ComplexImage& gt) {
  if (!pred.same_shape(gt)) throw ValidationError("mse_loss: shape mismatch");
  return mse_loss(to_tensor(pred), to_tensor(gt));
}

Tensor mse_loss_grad(const Tensor& pred, const Tensor& gt) {
  if (pred.c != gt.c || pred.h != gt.h || pred.w != gt.w)
    throw ValidationError("mse_loss_grad: shape mismatch");
  Tensor g(pred.c, pred.h, pred.w);
  const double inv = 2.0 / static_cast<double>(pred.plane());
  for (size_t i = 0; i < pred.size(); ++i)
    g.v[i] = static_cast<float>((static_cast<double>(pred.v[i]) - gt.v[i]) * inv);
  return g;
}

} // namespace xdr
