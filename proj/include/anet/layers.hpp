#pragma once

#include <optional>
#include <random>
#include <string>

#include "anet/ops.hpp"

namespace anet {

// Glorot/Xavier uniform: U(-l, l) with l = sqrt(6 / (fan_in + fan_out)).
template <typename Scalar>
Tensor<Scalar> glorot_uniform(Shape shape, Index fan_in, Index fan_out, std::mt19937_64& rng);

// u = x W^T (+ bias). Weight is [out x in].
template <typename Scalar>
class DenseLayer {
 public:
  DenseLayer(const std::string& name, Index in, Index out, bool bias, std::mt19937_64& rng);
  DenseLayer(Parameter<Scalar> weight, std::optional<Parameter<Scalar>> bias);

  // x is [N, in] (or [in], treated as a batch of one).
  Var<Scalar> forward(const Var<Scalar>& x) const;

  Index in_features() const { return weight_.value().dim(1); }
  Index out_features() const { return weight_.value().dim(0); }
  Parameter<Scalar>& weight() { return weight_; }
  std::optional<Parameter<Scalar>>& bias() { return bias_; }
  void collect(ParameterList<Scalar>& out) const;

 private:
  Parameter<Scalar> weight_;
  std::optional<Parameter<Scalar>> bias_;
};

// u = conv(kernels, x) (+ bias). Kernels are [out x in x k x k].
template <typename Scalar>
class ConvLayer {
 public:
  ConvLayer(const std::string& name, Index in_channels, Index out_channels, const ConvGeometry& geom, bool bias,
            std::mt19937_64& rng);
  ConvLayer(Parameter<Scalar> kernels, std::optional<Parameter<Scalar>> bias, const ConvGeometry& geom);

  // x is [N, C, H, W] (or [C, H, W]).
  Var<Scalar> forward(const Var<Scalar>& x) const;

  const ConvGeometry& geometry() const { return geom_; }
  Index in_channels() const { return kernels_.value().dim(1); }
  Index out_channels() const { return kernels_.value().dim(0); }
  Parameter<Scalar>& kernels() { return kernels_; }
  std::optional<Parameter<Scalar>>& bias() { return bias_; }
  void collect(ParameterList<Scalar>& out) const;

 private:
  Parameter<Scalar> kernels_;
  std::optional<Parameter<Scalar>> bias_;
  ConvGeometry geom_;
};

}  // namespace anet
