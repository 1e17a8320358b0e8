#include "anet/layers.hpp"

#include <cmath>

namespace anet {

template <typename Scalar>
Tensor<Scalar> glorot_uniform(Shape shape, Index fan_in, Index fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor<Scalar> t(std::move(shape));
  for (auto& v : t.values()) v = static_cast<Scalar>(dist(rng));
  return t;
}

template <typename Scalar>
DenseLayer<Scalar>::DenseLayer(const std::string& name, Index in, Index out, bool bias, std::mt19937_64& rng)
    : weight_(make_parameter(name + ".weight", glorot_uniform<Scalar>({out, in}, in, out, rng))) {
  if (in <= 0 || out <= 0) throw ConfigError("dense layer '" + name + "' needs positive widths");
  if (bias) bias_ = make_parameter(name + ".bias", Tensor<Scalar>({out}));
}

template <typename Scalar>
DenseLayer<Scalar>::DenseLayer(Parameter<Scalar> weight, std::optional<Parameter<Scalar>> bias)
    : weight_(std::move(weight)), bias_(std::move(bias)) {
  if (weight_.value().rank() != 2) throw DimensionError("dense weight must be [out x in]");
}

template <typename Scalar>
Var<Scalar> DenseLayer<Scalar>::forward(const Var<Scalar>& x) const {
  Var<Scalar> input = x->value.rank() == 1 ? ops::reshape(x, {1, x->value.dim(0)}) : x;
  if (input->value.rank() != 2 || input->value.dim(1) != in_features())
    throw DimensionError("dense input " + to_string(x->shape()) + " does not match weight " +
                         to_string(weight_.value().shape()));
  Var<Scalar> u = ops::linear(input, weight_.var);
  if (bias_) u = ops::add_bias(u, bias_->var);
  return u;
}

template <typename Scalar>
void DenseLayer<Scalar>::collect(ParameterList<Scalar>& out) const {
  out.push_back(weight_);
  if (bias_) out.push_back(*bias_);
}

template <typename Scalar>
ConvLayer<Scalar>::ConvLayer(const std::string& name, Index in_channels, Index out_channels,
                             const ConvGeometry& geom, bool bias, std::mt19937_64& rng)
    : kernels_(make_parameter(
          name + ".weight",
          glorot_uniform<Scalar>({out_channels, in_channels, geom.kernel_height, geom.kernel_width},
                                 in_channels * geom.kernel_height * geom.kernel_width,
                                 out_channels * geom.kernel_height * geom.kernel_width, rng))),
      geom_(geom) {
  if (in_channels <= 0 || out_channels <= 0) throw ConfigError("conv layer '" + name + "' needs positive channels");
  geom_.validate();
  if (bias) bias_ = make_parameter(name + ".bias", Tensor<Scalar>({out_channels}));
}

template <typename Scalar>
ConvLayer<Scalar>::ConvLayer(Parameter<Scalar> kernels, std::optional<Parameter<Scalar>> bias,
                             const ConvGeometry& geom)
    : kernels_(std::move(kernels)), bias_(std::move(bias)), geom_(geom) {
  geom_.validate();
}

template <typename Scalar>
Var<Scalar> ConvLayer<Scalar>::forward(const Var<Scalar>& x) const {
  if (x->value.rank() == 3) {
    Shape batched{1};
    batched.insert(batched.end(), x->shape().begin(), x->shape().end());
    return forward(ops::reshape(x, batched));
  }
  return ops::conv2d(x, kernels_.var, bias_ ? bias_->var : Var<Scalar>{}, geom_);
}

template <typename Scalar>
void ConvLayer<Scalar>::collect(ParameterList<Scalar>& out) const {
  out.push_back(kernels_);
  if (bias_) out.push_back(*bias_);
}

template Tensor<float> glorot_uniform(Shape, Index, Index, std::mt19937_64&);
template Tensor<double> glorot_uniform(Shape, Index, Index, std::mt19937_64&);
template class DenseLayer<float>;
template class DenseLayer<double>;
template class ConvLayer<float>;
template class ConvLayer<double>;

}  // namespace anet
