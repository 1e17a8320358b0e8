#include "anet/activation_net.hpp"

#include <cstdio>
#include <ostream>

#include "anet/layers.hpp"

namespace anet {

void ANConfig::validate() const {
  if (order < 1 || order > kMaxPower)
    throw ConfigError("activation net order must be in [1, " + std::to_string(kMaxPower) + "], got " +
                      std::to_string(order));
  if (kernel <= 0 || kernel % 2 == 0)
    throw ConfigError("activation net kernel must be odd, got " + std::to_string(kernel));
  if (u_clip && !(*u_clip > 0)) throw ConfigError("u_clip must be positive");
  if (init != ANInit::identity && order < 5) throw ConfigError("tanh initialisation needs order >= 5");
}

std::string to_string(ANMode mode) { return mode == ANMode::full ? "full" : "shared"; }

std::string to_string(ANInit init) {
  switch (init) {
    case ANInit::identity: return "identity";
    case ANInit::tanh_taylor: return "tanh_taylor";
    case ANInit::zero_v_tanh: return "zero_v_tanh";
  }
  return "?";
}

ANMode parse_an_mode(const std::string& text) {
  if (text == "full") return ANMode::full;
  if (text == "shared") return ANMode::shared;
  throw ConfigError("unknown activation net mode '" + text + "'");
}

ANInit parse_an_init(const std::string& text) {
  if (text == "identity") return ANInit::identity;
  if (text == "tanh_taylor") return ANInit::tanh_taylor;
  if (text == "zero_v_tanh") return ANInit::zero_v_tanh;
  throw ConfigError("unknown activation net init '" + text + "'");
}

Index an_parameter_count(const ANConfig& config, Index nodes, LayerKind kind) {
  const Index terms = config.order + 1;
  if (kind == LayerKind::conv) return terms * nodes * (nodes * config.kernel * config.kernel + 1);
  if (config.mode == ANMode::full) return terms * nodes * nodes + terms * nodes;
  return terms * nodes + terms * nodes;
}

template <typename Scalar>
ActivationNet<Scalar>::ActivationNet(Parameter<Scalar> weights, Parameter<Scalar> bias, Index nodes,
                                     const ANConfig& config)
    : weights_(std::move(weights)), bias_(std::move(bias)), nodes_(nodes), config_(config) {
  config_.validate();
  if (nodes_ <= 0) throw ConfigError("activation net needs at least one node");
}

template <typename Scalar>
void ActivationNet<Scalar>::initialise(std::mt19937_64& rng, Index fan_in, Index fan_out) {
  const PolyCoeffs base =
      config_.init == ANInit::identity ? identity_coeffs(config_.order) : taylor_preset("tanh", config_.order);
  set_constant(base);
  if (config_.init == ANInit::tanh_taylor) {
    Tensor<Scalar> v = glorot_uniform<Scalar>(weights_.value().shape(), fan_in, fan_out, rng);
    weights_.value().array() = v.array() * Scalar(0.1);
  }
}

template <typename Scalar>
void ActivationNet<Scalar>::set_constant(const PolyCoeffs& coeffs) {
  coeffs.validate();
  if (coeffs.order() != config_.order)
    throw ContractError("coefficient order " + std::to_string(coeffs.order()) + " for a net of order " +
                        std::to_string(config_.order));
  weights_.value().set_zero();
  auto& b = bias_.value();
  for (int k = 0; k <= config_.order; ++k)
    b.array().segment(k * nodes_, nodes_) = Scalar(coeffs.coeffs[static_cast<std::size_t>(k)]);
}

template <typename Scalar>
Var<Scalar> ActivationNet<Scalar>::forward(const Var<Scalar>& u) const {
  Var<Scalar> a = coefficients(u);
  Var<Scalar> powered = config_.u_clip ? ops::clamp(u, Scalar(*config_.u_clip)) : u;
  return ops::poly_sites(a, powered, config_.order);
}

template <typename Scalar>
void ActivationNet<Scalar>::collect(ParameterList<Scalar>& out) const {
  out.push_back(weights_);
  out.push_back(bias_);
}

namespace {

template <typename Scalar>
Parameter<Scalar> zeros(const std::string& name, Shape shape) {
  return make_parameter(name, Tensor<Scalar>(std::move(shape)));
}

Shape dense_weight_shape(const ANConfig& c, Index nodes) {
  c.validate();
  if (c.mode == ANMode::full) return {c.order + 1, nodes, nodes};
  return {c.order + 1, nodes};
}

}  // namespace

template <typename Scalar>
DenseActivationNet<Scalar>::DenseActivationNet(const std::string& prefix, Index nodes, const ANConfig& config,
                                               std::mt19937_64& rng)
    : ActivationNet<Scalar>(zeros<Scalar>(prefix + ".an.v", dense_weight_shape(config, nodes)),
                            zeros<Scalar>(prefix + ".an.b", {config.order + 1, nodes}), nodes, config) {
  const Index terms = config.order + 1;
  this->initialise(rng, nodes, config.mode == ANMode::full ? terms * nodes : terms);
}

template <typename Scalar>
Var<Scalar> DenseActivationNet<Scalar>::coefficients(const Var<Scalar>& u) const {
  if (u->value.rank() != 2 || u->value.dim(1) != this->nodes_)
    throw DimensionError("dense activation net for " + std::to_string(this->nodes_) + " nodes given " +
                         to_string(u->shape()));
  Var<Scalar> mixed = ops::linear(u, this->weights_.var);
  if (this->config_.mode == ANMode::shared) mixed = ops::broadcast_nodes(mixed, this->nodes_);
  return ops::add_bias(mixed, this->bias_.var);
}

template <typename Scalar>
ConvActivationNet<Scalar>::ConvActivationNet(const std::string& prefix, Index channels, const ANConfig& config,
                                             std::mt19937_64& rng, Padding padding)
    : ActivationNet<Scalar>(
          zeros<Scalar>(prefix + ".an.v", {(config.order + 1) * channels, channels, config.kernel, config.kernel}),
          zeros<Scalar>(prefix + ".an.b", {(config.order + 1) * channels}), channels, config),
      geom_(ConvGeometry::same(config.kernel, padding)) {
  const Index taps = config.kernel * config.kernel;
  this->initialise(rng, channels * taps, (config.order + 1) * channels * taps);
}

template <typename Scalar>
Var<Scalar> ConvActivationNet<Scalar>::coefficients(const Var<Scalar>& u) const {
  if (u->value.rank() != 4 || u->value.dim(1) != this->nodes_)
    throw DimensionError("conv activation net for " + std::to_string(this->nodes_) + " channels given " +
                         to_string(u->shape()));
  Var<Scalar> a = ops::conv2d(u, this->weights_.var, this->bias_.var, geom_);
  if (a->value.dim(2) != u->value.dim(2) || a->value.dim(3) != u->value.dim(3))
    throw GeometryError("coefficient maps are not congruent with u");
  return a;
}

namespace {

template <typename Scalar>
Tensor<Scalar> coefficient_map(const ActivationNet<Scalar>& an, const Tensor<Scalar>& u) {
  Shape batched{1};
  batched.insert(batched.end(), u.shape().begin(), u.shape().end());
  NoGradGuard no_grad;
  return an.coefficients(constant(u.reshaped(batched)))->value;
}

template <typename Scalar>
PolyCoeffs extract(const Tensor<Scalar>& a, int order, Index nodes, Index sites, Index node, Index site) {
  PolyCoeffs p;
  for (int k = 0; k <= order; ++k) p.coeffs.push_back(static_cast<double>(a[(k * nodes + node) * sites + site]));
  return p;
}

}  // namespace

template <typename Scalar>
PolyCoeffs site_coefficients(const ActivationNet<Scalar>& an, const Tensor<Scalar>& u, Index node, Index row,
                             Index col) {
  const bool conv = an.layer_kind() == LayerKind::conv;
  const Index height = conv ? u.dim(1) : 1, width = conv ? u.dim(2) : 1;
  if (node < 0 || node >= an.nodes() || row < 0 || row >= height || col < 0 || col >= width)
    throw ContractError("site (" + std::to_string(node) + ", " + std::to_string(row) + ", " + std::to_string(col) +
                        ") outside " + to_string(u.shape()));
  const Tensor<Scalar> a = coefficient_map(an, u);
  return extract(a, an.config().order, an.nodes(), height * width, node, row * width + col);
}

template <typename Scalar>
std::vector<CurveRow> dump_activation_shapes(const ActivationNet<Scalar>& an, const std::string& layer,
                                             const Tensor<Scalar>& u, const SiteSelection& selection,
                                             const std::vector<double>& grid) {
  const bool conv = an.layer_kind() == LayerKind::conv;
  if ((conv && u.rank() != 3) || (!conv && u.rank() != 1))
    throw DimensionError("activation dump input " + to_string(u.shape()) + " does not fit layer '" + layer + "'");
  const Index height = conv ? u.dim(1) : 1, width = conv ? u.dim(2) : 1;
  auto check = [](const std::optional<Index>& v, Index extent, const char* what) {
    if (v && (*v < 0 || *v >= extent))
      throw ContractError(std::string(what) + " " + std::to_string(*v) + " outside [0, " + std::to_string(extent) +
                          ")");
  };
  check(selection.node, an.nodes(), "node");
  check(selection.row, height, "pixel row");
  check(selection.col, width, "pixel column");

  const Tensor<Scalar> a = coefficient_map(an, u);
  std::vector<CurveRow> rows;
  for (Index i = 0; i < an.nodes(); ++i) {
    if (selection.node && *selection.node != i) continue;
    for (Index r = 0; r < height; ++r) {
      if (selection.row && *selection.row != r) continue;
      for (Index c = 0; c < width; ++c) {
        if (selection.col && *selection.col != c) continue;
        const PolyCoeffs p = extract(a, an.config().order, an.nodes(), height * width, i, r * width + c);
        for (double g : grid) rows.push_back({layer, i, r, c, g, p(g)});
      }
    }
  }
  return rows;
}

void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows) {
  os << "layer,node,pixel_row,pixel_col,u_grid,activation_value\n";
  char buf[64];
  for (const auto& r : rows) {
    os << r.layer << ',' << r.node << ',' << r.pixel_row << ',' << r.pixel_col << ',';
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", r.u, r.value);
    os << buf;
  }
}

template class ActivationNet<float>;
template class ActivationNet<double>;
template class DenseActivationNet<float>;
template class DenseActivationNet<double>;
template class ConvActivationNet<float>;
template class ConvActivationNet<double>;
template PolyCoeffs site_coefficients(const ActivationNet<float>&, const Tensor<float>&, Index, Index, Index);
template PolyCoeffs site_coefficients(const ActivationNet<double>&, const Tensor<double>&, Index, Index, Index);
template std::vector<CurveRow> dump_activation_shapes(const ActivationNet<float>&, const std::string&,
                                                      const Tensor<float>&, const SiteSelection&,
                                                      const std::vector<double>&);
template std::vector<CurveRow> dump_activation_shapes(const ActivationNet<double>&, const std::string&,
                                                      const Tensor<double>&, const SiteSelection&,
                                                      const std::vector<double>&);

}  // namespace anet
