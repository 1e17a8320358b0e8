#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "anet/ops.hpp"

namespace anet {

// Polynomial coefficients a_0..a_K, index = power.
struct PolyCoeffs {
  std::vector<double> coeffs;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
  void validate() const;
  double operator()(double u) const;
};

// Truncated Maclaurin series:
//   sigmoid(u) ~ 1/2 + u/4 - u^3/48 + u^5/480
//   tanh(u)    ~ u - u^3/3 + 2u^5/15 - 17u^7/315
// zero-padded (or truncated) to `order` + 1 coefficients. Needs order >= 5.
PolyCoeffs taylor_preset(std::string_view name, int order);

// a_1 = 1, all others zero.
PolyCoeffs identity_coeffs(int order);

// JSON object {"sigmoid": [...], "tanh": [...]} at the given order.
std::string presets_json(int order);

// Horner evaluation of the polynomial at every element of u.
template <typename Scalar>
Tensor<Scalar> poly_eval(const PolyCoeffs& coeffs, const Tensor<Scalar>& u);

template <typename Scalar>
Tensor<Scalar> relu(const Tensor<Scalar>& u);

// Pointwise nonlinearity applied after a host layer.
template <typename Scalar>
class ActivationModule {
 public:
  virtual ~ActivationModule() = default;
  virtual Var<Scalar> forward(const Var<Scalar>& u) const = 0;
  virtual void collect(ParameterList<Scalar>& out) const = 0;
  virtual std::string kind() const = 0;
};

template <typename Scalar>
class ReluActivation final : public ActivationModule<Scalar> {
 public:
  Var<Scalar> forward(const Var<Scalar>& u) const override { return ops::relu(u); }
  void collect(ParameterList<Scalar>&) const override {}
  std::string kind() const override { return "relu"; }
};

// One learned coefficient vector shared by every node of a layer.
template <typename Scalar>
class FixedPolyActivation final : public ActivationModule<Scalar> {
 public:
  FixedPolyActivation(const std::string& prefix, const PolyCoeffs& init);

  Var<Scalar> forward(const Var<Scalar>& u) const override { return ops::poly_shared(coeffs_.var, u); }
  void collect(ParameterList<Scalar>& out) const override { out.push_back(coeffs_); }
  std::string kind() const override { return "poly_fixed"; }

  PolyCoeffs coefficients() const;
  Parameter<Scalar>& parameter() { return coeffs_; }

 private:
  Parameter<Scalar> coeffs_;
};

}  // namespace anet
