#include "anet/activations.hpp"

#include <cmath>
#include <json.hpp>

namespace anet {

void PolyCoeffs::validate() const {
  if (coeffs.empty()) throw ContractError("polynomial needs at least one coefficient");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw ContractError("polynomial coefficient is not finite");
}

double PolyCoeffs::operator()(double u) const {
  double acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u + *it;
  return acc;
}

PolyCoeffs taylor_preset(std::string_view name, int order) {
  std::vector<double> series;
  if (name == "sigmoid")
    series = {0.5, 0.25, 0.0, -1.0 / 48.0, 0.0, 1.0 / 480.0};
  else if (name == "tanh")
    series = {0.0, 1.0, 0.0, -1.0 / 3.0, 0.0, 2.0 / 15.0, 0.0, -17.0 / 315.0};
  else
    throw ConfigError("unknown activation preset '" + std::string(name) + "'");
  if (order < 5) throw ContractError("Taylor presets need order >= 5, got " + std::to_string(order));
  series.resize(static_cast<std::size_t>(order) + 1, 0.0);
  return {series};
}

PolyCoeffs identity_coeffs(int order) {
  if (order < 1) throw ContractError("identity polynomial needs order >= 1");
  PolyCoeffs p{std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0)};
  p.coeffs[1] = 1.0;
  return p;
}

std::string presets_json(int order) {
  nlohmann::json j;
  j["order"] = order;
  j["sigmoid"] = taylor_preset("sigmoid", order).coeffs;
  j["tanh"] = taylor_preset("tanh", order).coeffs;
  return j.dump(2);
}

template <typename Scalar>
Tensor<Scalar> poly_eval(const PolyCoeffs& coeffs, const Tensor<Scalar>& u) {
  coeffs.validate();
  const int order = coeffs.order();
  Tensor<Scalar> out(u.shape(), Scalar(coeffs.coeffs[static_cast<std::size_t>(order)]));
  for (int k = order - 1; k >= 0; --k)
    out.array() = out.array() * u.array() + Scalar(coeffs.coeffs[static_cast<std::size_t>(k)]);
  return out;
}

template <typename Scalar>
Tensor<Scalar> relu(const Tensor<Scalar>& u) {
  return Tensor<Scalar>(u.shape(), u.array().max(Scalar(0)).eval());
}

template <typename Scalar>
FixedPolyActivation<Scalar>::FixedPolyActivation(const std::string& prefix, const PolyCoeffs& init)
    : coeffs_(make_parameter(prefix + ".coeffs", Tensor<Scalar>({static_cast<Index>(init.coeffs.size())}))) {
  init.validate();
  for (std::size_t k = 0; k < init.coeffs.size(); ++k) coeffs_.value()[static_cast<Index>(k)] = Scalar(init.coeffs[k]);
}

template <typename Scalar>
PolyCoeffs FixedPolyActivation<Scalar>::coefficients() const {
  PolyCoeffs p;
  for (Scalar c : coeffs_.value().values()) p.coeffs.push_back(static_cast<double>(c));
  return p;
}

template Tensor<float> poly_eval(const PolyCoeffs&, const Tensor<float>&);
template Tensor<double> poly_eval(const PolyCoeffs&, const Tensor<double>&);
template Tensor<float> relu(const Tensor<float>&);
template Tensor<double> relu(const Tensor<double>&);
template class FixedPolyActivation<float>;
template class FixedPolyActivation<double>;

}  // namespace anet
