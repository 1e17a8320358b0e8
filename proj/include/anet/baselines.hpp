#pragma once

#include <optional>
#include <string>

#include "anet/activation_net.hpp"

namespace anet {

// Lateral inhibition: x = relu(u - iota) with
//   spatial: iota = c * (window sum of u around the pixel - u), per channel,
//            zero-padded, default c = 1 / (window^2 - 1);
//   dense:   iota_i = c * (sum_j u_j - u_i), default c = 1 / (n - 1).
// The dense form is an extension of the box-filter formulation.
template <typename Scalar>
class InhibitionActivation final : public ActivationModule<Scalar> {
 public:
  InhibitionActivation(const std::string& prefix, LayerKind kind, Index nodes, Index window = 3,
                       std::optional<double> strength = std::nullopt, bool learnable = false);

  Var<Scalar> forward(const Var<Scalar>& u) const override;
  void collect(ParameterList<Scalar>& out) const override;
  std::string kind() const override { return "inhibition"; }

  Scalar strength() const { return strength_.value()[0]; }
  Index window() const { return window_; }

 private:
  LayerKind layer_kind_;
  Index window_;
  bool learnable_;
  Parameter<Scalar> strength_;
};

// Attention modulation: x_i = logistic(p_i u_i + q_i) * relu(u_i), one
// (p, q) pair per node or channel. Starts at p = q = 0.
template <typename Scalar>
class AttentionActivation final : public ActivationModule<Scalar> {
 public:
  AttentionActivation(const std::string& prefix, Index nodes);

  Var<Scalar> forward(const Var<Scalar>& u) const override;
  void collect(ParameterList<Scalar>& out) const override;
  std::string kind() const override { return "attention"; }

  Parameter<Scalar>& p() { return p_; }
  Parameter<Scalar>& q() { return q_; }

 private:
  Parameter<Scalar> p_;
  Parameter<Scalar> q_;
};

}  // namespace anet
