#pragma once

#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "anet/activations.hpp"

namespace anet {

// How a dense activation net weighs the layer's intermediate outputs.
//   full:   a_ki = sum_j V[k,i,j] u_j + b[k,i]   (per-node weights)
//   shared: a_ki = sum_j V[k,j]   u_j + b[k,i]   (weights shared across nodes)
enum class ANMode { full, shared };

// identity:    V = 0, b gives x = u
// tanh_taylor: b gives the tanh series, V small Glorot-uniform
// zero_v_tanh: V = 0, b gives the tanh series
enum class ANInit { identity, tanh_taylor, zero_v_tanh };

enum class LayerKind { dense, conv };

struct ANConfig {
  int order = 5;
  ANMode mode = ANMode::full;
  Index kernel = 3;
  // Symmetric clamp on u in the powering path; nullopt disables it.
  std::optional<double> u_clip = 5.0;
  ANInit init = ANInit::zero_v_tanh;

  void validate() const;
};

std::string to_string(ANMode mode);
std::string to_string(ANInit init);
ANMode parse_an_mode(const std::string& text);
ANInit parse_an_init(const std::string& text);

Index an_parameter_count(const ANConfig& config, Index nodes, LayerKind kind);

// Activation nets emit coefficients for every node (dense) or pixel (conv)
// from the layer's own intermediate output u, then evaluate
// x = sum_k a_k u^k site by site.
template <typename Scalar>
class ActivationNet : public ActivationModule<Scalar> {
 public:
  // Coefficients laid out as [N, (K+1)*n, ...]; channel k*n + i is the
  // order-k coefficient of node/channel i.
  virtual Var<Scalar> coefficients(const Var<Scalar>& u) const = 0;
  virtual LayerKind layer_kind() const = 0;

  Var<Scalar> forward(const Var<Scalar>& u) const override;
  std::string kind() const override { return "activation_net"; }

  const ANConfig& config() const { return config_; }
  Index nodes() const { return nodes_; }
  Parameter<Scalar>& weights() { return weights_; }
  Parameter<Scalar>& bias() { return bias_; }
  void collect(ParameterList<Scalar>& out) const override;

  // V = 0 and b = `coeffs` replicated over every node.
  void set_constant(const PolyCoeffs& coeffs);

 protected:
  ActivationNet(Parameter<Scalar> weights, Parameter<Scalar> bias, Index nodes, const ANConfig& config);
  void initialise(std::mt19937_64& rng, Index fan_in, Index fan_out);

  Parameter<Scalar> weights_;
  Parameter<Scalar> bias_;
  Index nodes_;
  ANConfig config_;
};

template <typename Scalar>
class DenseActivationNet final : public ActivationNet<Scalar> {
 public:
  DenseActivationNet(const std::string& prefix, Index nodes, const ANConfig& config, std::mt19937_64& rng);

  // u is [N, n].
  Var<Scalar> coefficients(const Var<Scalar>& u) const override;
  LayerKind layer_kind() const override { return LayerKind::dense; }
};

template <typename Scalar>
class ConvActivationNet final : public ActivationNet<Scalar> {
 public:
  ConvActivationNet(const std::string& prefix, Index channels, const ANConfig& config, std::mt19937_64& rng,
                    Padding padding = Padding::zero);

  // u is [N, n, H, W]; coefficient maps keep H x W.
  Var<Scalar> coefficients(const Var<Scalar>& u) const override;
  LayerKind layer_kind() const override { return LayerKind::conv; }
  const ConvGeometry& geometry() const { return geom_; }

 private:
  ConvGeometry geom_;
};

struct SiteSelection {
  std::optional<Index> node;
  std::optional<Index> row;
  std::optional<Index> col;
};

struct CurveRow {
  std::string layer;
  Index node = 0;
  Index pixel_row = 0;
  Index pixel_col = 0;
  double u = 0;
  double value = 0;
};

// Coefficients the net produces at one site for a single sample u
// ([n] for dense, [n, H, W] for conv).
template <typename Scalar>
PolyCoeffs site_coefficients(const ActivationNet<Scalar>& an, const Tensor<Scalar>& u, Index node, Index row = 0,
                             Index col = 0);

// For each selected site, the polynomial induced by this u evaluated over
// the grid.
template <typename Scalar>
std::vector<CurveRow> dump_activation_shapes(const ActivationNet<Scalar>& an, const std::string& layer,
                                             const Tensor<Scalar>& u, const SiteSelection& selection,
                                             const std::vector<double>& grid);

// Header: layer,node,pixel_row,pixel_col,u_grid,activation_value
void write_curve_csv(std::ostream& os, const std::vector<CurveRow>& rows);

}  // namespace anet
