#pragma once

#include <string>
#include <vector>

namespace xdr {

enum class OptimizerKind { SgdMomentum, AdaptiveMoment };

std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

// First-order update rules over a flat parameter vector.
//   sgd-momentum:    vel = 0.9*vel + g;  p -= lr*vel
//   adaptive-moment: bias-corrected first/second moment estimates with
//                    beta1 0.9, beta2 0.999, eps 1e-8
class Optimizer {
public:
  Optimizer(OptimizerKind kind, double learning_rate, size_t param_count);

  void step(std::vector<float>& params, const std::vector<float>& grads);

private:
  OptimizerKind kind_;
  double lr_;
  long t_ = 0;
  std::vector<float> m_;
  std::vector<float> v_;
};

} // namespace xdr
