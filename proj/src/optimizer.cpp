#include "xdr/model/optimizer.hpp"

#include <cmath>

#include "xdr/error.hpp"

namespace xdr {

std::string to_string(OptimizerKind k) {
  return k == OptimizerKind::SgdMomentum ? "sgd-momentum" : "adaptive-moment";
}

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "sgd-momentum") return OptimizerKind::SgdMomentum;
  if (s == "adaptive-moment") return OptimizerKind::AdaptiveMoment;
  throw ValidationError("unknown optimizer '" + s +
                        "' (expected sgd-momentum or adaptive-moment)");
}

// lr = 0 is allowed and leaves parameters bit-identical (evaluation-only
// epoch loops rely on this).
Optimizer::Optimizer(OptimizerKind kind, double learning_rate, size_t param_count)
    : kind_(kind), lr_(learning_rate) {
  if (!(learning_rate >= 0.0))
    throw ValidationError("optimizer: learning rate must be >= 0");
  m_.assign(param_count, 0.0f);
  if (kind_ == OptimizerKind::AdaptiveMoment) v_.assign(param_count, 0.0f);
}

void Optimizer::step(std::vector<float>& params, const std::vector<float>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw ValidationError("optimizer: parameter/gradient size mismatch");
  ++t_;
  if (kind_ == OptimizerKind::SgdMomentum) {
    constexpr double momentum = 0.9;
    for (size_t i = 0; i < params.size(); ++i) {
      const double vel = momentum * m_[i] + grads[i];
      m_[i] = static_cast<float>(vel);
      params[i] = static_cast<float>(params[i] - lr_ * vel);
    }
    return;
  }
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    const double m = beta1 * m_[i] + (1.0 - beta1) * g;
    const double v = beta2 * v_[i] + (1.0 - beta2) * g * g;
    m_[i] = static_cast<float>(m);
    v_[i] = static_cast<float>(v);
    params[i] = static_cast<float>(params[i] -
                                   lr_ * (m / bc1) / (std::sqrt(v / bc2) + eps));
  }
}

} // namespace xdr
