#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "xdr/complex_image.hpp"
#include "xdr/mask.hpp"
#include "xdr/model/tensor.hpp"

namespace xdr {

// Architecture of the unrolled reconstruction network: n_cascades blocks,
// each a residual stack of n_conv_per_block convolutions (ReLU on all but
// the last, which is zero-initialised) followed by a data-consistency
// layer with weight dc_lambda (+infinity = hard replacement).
struct CascadeConfig {
  int n_cascades = 5;
  int n_conv_per_block = 5;
  int n_filters = 48;
  int kernel_size = 3;
  double dc_lambda = std::numeric_limits<double>::infinity();
  int input_channels = 2; // real + imag, fixed

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static CascadeConfig from_json(const nlohmann::json& j);
  bool operator==(const CascadeConfig&) const = default;
};

class CascadeModel {
public:
  explicit CascadeModel(const CascadeConfig& config);

  // Deterministic He-normal initialisation; the final convolution of every
  // block is zeroed so a fresh model is the identity-plus-DC map.
  void init(std::uint64_t seed);

  const CascadeConfig& config() const { return config_; }
  size_t param_count() const { return params_.size(); }
  std::vector<float>& params() { return params_; }
  const std::vector<float>& params() const { return params_; }

  // Layer-wise activation caches for backprop, reusable across samples.
  struct Workspace {
    std::vector<Tensor> cascade_inputs;            // per cascade
    std::vector<std::vector<Tensor>> conv_inputs;  // per cascade, per conv
    std::vector<float> col;                        // im2col scratch
  };

  // x_0 = zero_filled; x_c = DC(x_{c-1} + block_c(x_{c-1})); returns the
  // last x. Pure in (params, inputs); throws with the cascade index if an
  // activation goes non-finite.
  ComplexImage forward(const ComplexImage& zero_filled, const ComplexImage& kspace_us,
                       const SamplingMask& mask) const;

  // Training-path forward that fills `ws` for a later backward().
  Tensor forward_train(const Tensor& x0, const ComplexImage& kspace_us,
                       const SamplingMask& mask, Workspace& ws) const;

  // Accumulates dLoss/dparams into grad_params (size param_count) given
  // dLoss/doutput. Must be called with the workspace of the matching
  // forward_train.
  void backward(const Tensor& grad_output, const SamplingMask& mask, Workspace& ws,
                std::vector<float>& grad_params) const;

private:
  struct ConvShape {
    int in_c, out_c, kernel;
    size_t w_offset, b_offset;
    size_t w_count() const {
      return static_cast<size_t>(out_c) * in_c * kernel * kernel;
    }
  };

  const ConvShape& layer(int cascade, int conv) const {
    return layers_[static_cast<size_t>(cascade) * config_.n_conv_per_block + conv];
  }

  void conv_forward(const ConvShape& shape, const Tensor& in, Tensor& out,
                    std::vector<float>& col) const;
  void conv_backward(const ConvShape& shape, const Tensor& in, const Tensor& grad_out,
                     Tensor& grad_in, std::vector<float>& grad_params,
                     std::vector<float>& col) const;

  CascadeConfig config_;
  std::vector<ConvShape> layers_;
  std::vector<float> params_;
};

// Training objective: mean over pixels of |pred - gt|^2 summed across the
// real and imag channels.
double mse_loss(const Tensor& pred, const Tensor& gt);
double mse_loss(const ComplexImage& pred, const ComplexImage& gt);
Tensor mse_loss_grad(const Tensor& pred, const Tensor& gt);

} // namespace xdr
