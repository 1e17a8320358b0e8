#include "anet/baselines.hpp"

#include <cmath>

namespace anet {

namespace {

double default_strength(LayerKind kind, Index nodes, Index window) {
  if (kind == LayerKind::conv) return 1.0 / static_cast<double>(window * window - 1);
  return nodes > 1 ? 1.0 / static_cast<double>(nodes - 1) : 0.0;
}

}  // namespace

template <typename Scalar>
InhibitionActivation<Scalar>::InhibitionActivation(const std::string& prefix, LayerKind kind, Index nodes,
                                                   Index window, std::optional<double> strength, bool learnable)
    : layer_kind_(kind),
      window_(window),
      learnable_(learnable),
      strength_(make_parameter(prefix + ".inhibition.c",
                               Tensor<Scalar>({1}, Scalar(strength.value_or(default_strength(kind, nodes, window)))))) {
  if (window <= 1 || window % 2 == 0) throw ConfigError("inhibition window must be odd and > 1");
  if (!std::isfinite(static_cast<double>(strength_.value()[0]))) throw ConfigError("inhibition strength not finite");
  if (!learnable_) strength_.var->requires_grad = false;
}

template <typename Scalar>
Var<Scalar> InhibitionActivation<Scalar>::forward(const Var<Scalar>& u) const {
  Var<Scalar> neighbours;
  if (layer_kind_ == LayerKind::conv) {
    if (u->value.rank() != 4) throw DimensionError("spatial inhibition needs [N, C, H, W], got " + to_string(u->shape()));
    neighbours = ops::sub(ops::box_sum(u, window_), u);
  } else {
    if (u->value.rank() != 2) throw DimensionError("dense inhibition needs [N, n], got " + to_string(u->shape()));
    neighbours = ops::others_sum(u);
  }
  Var<Scalar> iota = ops::scale_by(neighbours, strength_.var);
  return ops::relu(ops::sub(u, iota));
}

template <typename Scalar>
void InhibitionActivation<Scalar>::collect(ParameterList<Scalar>& out) const {
  if (learnable_) out.push_back(strength_);
}

template <typename Scalar>
AttentionActivation<Scalar>::AttentionActivation(const std::string& prefix, Index nodes)
    : p_(make_parameter(prefix + ".attention.p", Tensor<Scalar>({nodes}))),
      q_(make_parameter(prefix + ".attention.q", Tensor<Scalar>({nodes}))) {
  if (nodes <= 0) throw ConfigError("attention needs at least one node");
}

template <typename Scalar>
Var<Scalar> AttentionActivation<Scalar>::forward(const Var<Scalar>& u) const {
  Var<Scalar> gate = ops::sigmoid(ops::channel_affine(u, p_.var, q_.var));
  return ops::mul(gate, ops::relu(u));
}

template <typename Scalar>
void AttentionActivation<Scalar>::collect(ParameterList<Scalar>& out) const {
  out.push_back(p_);
  out.push_back(q_);
}

template class InhibitionActivation<float>;
template class InhibitionActivation<double>;
template class AttentionActivation<float>;
template class AttentionActivation<double>;

}  // namespace anet
