#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anet/activation_net.hpp"
#include "anet/baselines.hpp"
#include "anet/layers.hpp"

namespace anet {

enum class ActivationMode { relu, poly_fixed, inhibition, attention, activation_net, none };
enum class LayerType { conv, dense, maxpool, upsample, flatten, concat };
enum class LossKind { softmax_xent, mse };

std::string to_string(ActivationMode mode);
std::string to_string(LayerType type);
std::string to_string(LossKind loss);
ActivationMode parse_activation_mode(const std::string& text);
LayerType parse_layer_type(const std::string& text);
LossKind parse_loss_kind(const std::string& text);

// The five activation variants compared by the experiments.
const std::vector<ActivationMode>& comparison_variants();

struct LayerSpec {
  std::string name;
  LayerType type = LayerType::conv;
  Index width = 0;   // output channels (conv) or features (dense)
  Index kernel = 3;  // conv only
  // conv only; unset means same padding, which needs an odd kernel
  std::optional<Index> padding;
  ActivationMode activation = ActivationMode::none;
  bool bias = false;
  std::string with;                   // concat: earlier layer whose output is appended
  std::optional<ANConfig> an;         // overrides the model default for this layer
};

struct ModelSpec {
  std::string name = "model";
  Shape input;  // C x H x W
  LossKind loss = LossKind::softmax_xent;
  ANConfig an;
  Index inhibition_window = 3;
  bool inhibition_learnable = false;
  // Permits an activation on the final layer of a classifier.
  bool final_activation = false;
  std::vector<LayerSpec> layers;

  const ANConfig& an_for(const LayerSpec& layer) const { return layer.an ? *layer.an : an; }
};

// Key-value text with ordered "[layer NAME]" blocks. See README for keys.
ModelSpec parse_model_spec(std::string_view text);
std::string format_model_spec(const ModelSpec& spec);
ModelSpec load_model_spec(const std::filesystem::path& path);

// Output shape (without batch axis) of every layer; throws ConfigError
// naming the first incompatible layer.
std::vector<Shape> validate(const ModelSpec& spec);

// Parameter count derived from the spec alone.
Index spec_parameter_count(const ModelSpec& spec);
Index activation_net_parameter_count(const ModelSpec& spec);

// conv(8) -> pool -> conv(16) -> pool -> dense(64) -> dense(10); the variant
// is applied to every layer except the last.
ModelSpec preset_mini_lenet(ActivationMode variant, Shape input = {1, 28, 28}, const ANConfig& an = {});
// Two down blocks (8, 16 channels), a 16-channel bottleneck, two up blocks
// with skip concatenation and a linear 1x1 output conv. The variant replaces
// the activation of the first conv in each block; other convs use ReLU.
ModelSpec preset_mini_unet(ActivationMode variant, Shape input = {1, 28, 28}, const ANConfig& an = {});
ModelSpec preset(const std::string& name, ActivationMode variant, Shape input, const ANConfig& an = {});

template <typename Scalar>
class Model {
 public:
  using Trace = std::map<std::string, Tensor<Scalar>>;

  // `an_padding` exists for equivariance tests only.
  Model(ModelSpec spec, std::uint64_t seed, Padding an_padding = Padding::zero);
  Model(Model&&) noexcept;
  Model& operator=(Model&&) noexcept;
  ~Model();

  // input is [N, C, H, W]. If `preactivations` is given, the intermediate
  // output u of every activated layer is stored under the layer name.
  Var<Scalar> forward(const Var<Scalar>& input, Trace* preactivations = nullptr) const;

  ParameterList<Scalar>& parameters() { return params_; }
  const ParameterList<Scalar>& parameters() const { return params_; }
  Index parameter_count() const { return anet::parameter_count(params_); }
  const ModelSpec& spec() const { return spec_; }

  // Activation module attached to a layer, or nullptr.
  const ActivationModule<Scalar>* activation(const std::string& layer) const;

  std::map<std::string, Tensor<double>> export_parameters() const;
  // Every registry entry must be present with a matching shape.
  void import_parameters(const std::map<std::string, Tensor<double>>& values);

 private:
  struct Stage;
  ModelSpec spec_;
  std::vector<std::unique_ptr<Stage>> stages_;
  ParameterList<Scalar> params_;
};

struct Snapshot {
  ModelSpec spec;
  std::map<std::string, Tensor<double>> parameters;
  std::map<std::string, std::string> metadata;
};

void save_snapshot(const std::filesystem::path& path, const Snapshot& snapshot);
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace anet
