#include "anet/models.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace anet {

std::string to_string(ActivationMode mode) {
  switch (mode) {
    case ActivationMode::relu: return "relu";
    case ActivationMode::poly_fixed: return "poly_fixed";
    case ActivationMode::inhibition: return "inhibition";
    case ActivationMode::attention: return "attention";
    case ActivationMode::activation_net: return "activation_net";
    case ActivationMode::none: return "none";
  }
  return "?";
}

std::string to_string(LayerType type) {
  switch (type) {
    case LayerType::conv: return "conv";
    case LayerType::dense: return "dense";
    case LayerType::maxpool: return "maxpool";
    case LayerType::upsample: return "upsample";
    case LayerType::flatten: return "flatten";
    case LayerType::concat: return "concat";
  }
  return "?";
}

std::string to_string(LossKind loss) { return loss == LossKind::softmax_xent ? "softmax_xent" : "mse"; }

ActivationMode parse_activation_mode(const std::string& text) {
  for (auto m : {ActivationMode::relu, ActivationMode::poly_fixed, ActivationMode::inhibition,
                 ActivationMode::attention, ActivationMode::activation_net, ActivationMode::none})
    if (to_string(m) == text) return m;
  throw ConfigError("unknown activation '" + text + "'");
}

LayerType parse_layer_type(const std::string& text) {
  for (auto t : {LayerType::conv, LayerType::dense, LayerType::maxpool, LayerType::upsample, LayerType::flatten,
                 LayerType::concat})
    if (to_string(t) == text) return t;
  throw ConfigError("unknown layer type '" + text + "'");
}

LossKind parse_loss_kind(const std::string& text) {
  if (text == "softmax_xent") return LossKind::softmax_xent;
  if (text == "mse") return LossKind::mse;
  throw ConfigError("unknown loss '" + text + "'");
}

const std::vector<ActivationMode>& comparison_variants() {
  static const std::vector<ActivationMode> variants{ActivationMode::relu, ActivationMode::poly_fixed,
                                                    ActivationMode::inhibition, ActivationMode::attention,
                                                    ActivationMode::activation_net};
  return variants;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

Index parse_index(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<Index>(v);
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects an integer, got '" + value + "'");
  }
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("'" + key + "' expects true/false, got '" + value + "'");
}

Shape parse_shape(const std::string& value) {
  Shape shape;
  std::stringstream ss(value);
  std::string part;
  while (std::getline(ss, part, 'x')) shape.push_back(parse_index(trim(part), "input"));
  return shape;
}

std::string format_shape(const Shape& shape) {
  std::string out;
  for (std::size_t i = 0; i < shape.size(); ++i) out += (i ? "x" : "") + std::to_string(shape[i]);
  return out;
}

// Applies one "an.*" key; returns false if the key is not an AN key.
bool apply_an_key(ANConfig& an, const std::string& key, const std::string& value) {
  if (key == "an.order")
    an.order = static_cast<int>(parse_index(value, key));
  else if (key == "an.mode")
    an.mode = parse_an_mode(value);
  else if (key == "an.kernel")
    an.kernel = parse_index(value, key);
  else if (key == "an.u_clip")
    an.u_clip = (value == "off" || value == "none") ? std::nullopt : std::optional<double>(parse_double(value, key));
  else if (key == "an.init")
    an.init = parse_an_init(value);
  else
    return false;
  return true;
}

void format_an(std::ostream& os, const ANConfig& an) {
  os << "an.order = " << an.order << '\n'
     << "an.mode = " << to_string(an.mode) << '\n'
     << "an.kernel = " << an.kernel << '\n'
     << "an.u_clip = ";
  if (an.u_clip)
    os << *an.u_clip << '\n';
  else
    os << "off\n";
  os << "an.init = " << to_string(an.init) << '\n';
}

}  // namespace

ModelSpec parse_model_spec(std::string_view text) {
  ModelSpec spec;
  std::vector<std::vector<std::pair<std::string, std::string>>> layer_an_keys;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      const std::string header = trim(line.substr(1, line.size() - 2));
      if (header.rfind("layer", 0) != 0) throw ConfigError(where + "expected [layer NAME]");
      LayerSpec layer;
      layer.name = trim(header.substr(5));
      if (layer.name.empty()) throw ConfigError(where + "layer needs a name");
      spec.layers.push_back(layer);
      layer_an_keys.emplace_back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (spec.layers.empty()) {
        if (key == "name")
          spec.name = value;
        else if (key == "input")
          spec.input = parse_shape(value);
        else if (key == "loss")
          spec.loss = parse_loss_kind(value);
        else if (key == "inhibition.window")
          spec.inhibition_window = parse_index(value, key);
        else if (key == "inhibition.learnable")
          spec.inhibition_learnable = parse_bool(value, key);
        else if (key == "final_activation")
          spec.final_activation = parse_bool(value, key);
        else if (!apply_an_key(spec.an, key, value))
          throw ConfigError("unknown key '" + key + "'");
      } else {
        LayerSpec& layer = spec.layers.back();
        if (key == "type")
          layer.type = parse_layer_type(value);
        else if (key == "width")
          layer.width = parse_index(value, key);
        else if (key == "kernel")
          layer.kernel = parse_index(value, key);
        else if (key == "padding")
          layer.padding = parse_index(value, key);
        else if (key == "activation")
          layer.activation = parse_activation_mode(value);
        else if (key == "bias")
          layer.bias = parse_bool(value, key);
        else if (key == "with")
          layer.with = value;
        else if (key.rfind("an.", 0) == 0)
          layer_an_keys.back().emplace_back(key, value);
        else
          throw ConfigError("unknown layer key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    if (layer_an_keys[i].empty()) continue;
    ANConfig an = spec.an;
    for (const auto& [key, value] : layer_an_keys[i])
      if (!apply_an_key(an, key, value)) throw ConfigError("layer '" + spec.layers[i].name + "': unknown key " + key);
    spec.layers[i].an = an;
  }
  validate(spec);
  return spec;
}

std::string format_model_spec(const ModelSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  os << "name = " << spec.name << '\n'
     << "input = " << format_shape(spec.input) << '\n'
     << "loss = " << to_string(spec.loss) << '\n';
  format_an(os, spec.an);
  os << "inhibition.window = " << spec.inhibition_window << '\n'
     << "inhibition.learnable = " << (spec.inhibition_learnable ? "true" : "false") << '\n'
     << "final_activation = " << (spec.final_activation ? "true" : "false") << '\n';
  for (const auto& layer : spec.layers) {
    os << "\n[layer " << layer.name << "]\n"
       << "type = " << to_string(layer.type) << '\n';
    if (layer.type == LayerType::conv || layer.type == LayerType::dense) {
      os << "width = " << layer.width << '\n';
      if (layer.type == LayerType::conv) os << "kernel = " << layer.kernel << '\n';
      if (layer.padding) os << "padding = " << *layer.padding << '\n';
      os << "activation = " << to_string(layer.activation) << '\n'
         << "bias = " << (layer.bias ? "true" : "false") << '\n';
      if (layer.an) format_an(os, *layer.an);
    }
    if (layer.type == LayerType::concat) os << "with = " << layer.with << '\n';
  }
  return os.str();
}

ModelSpec load_model_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_spec(ss.str());
}

// ---------------------------------------------------------------------------
// Validation and counting

namespace {

ConvGeometry layer_geometry(const LayerSpec& layer) {
  if (layer.padding) return ConvGeometry{layer.kernel, layer.kernel, 1, *layer.padding, Padding::zero};
  return ConvGeometry::same(layer.kernel);
}

bool has_host(const LayerSpec& layer) { return layer.type == LayerType::conv || layer.type == LayerType::dense; }

}  // namespace

std::vector<Shape> validate(const ModelSpec& spec) {
  auto fail = [](const LayerSpec& layer, const std::string& why) {
    throw ConfigError("layer '" + layer.name + "' (" + to_string(layer.type) + "): " + why);
  };
  if (spec.input.empty() || std::any_of(spec.input.begin(), spec.input.end(), [](Index d) { return d <= 0; }))
    throw ConfigError("model input shape must be positive, got " + to_string(spec.input));
  if (spec.layers.empty()) throw ConfigError("model has no layers");
  spec.an.validate();
  if (spec.inhibition_window <= 1 || spec.inhibition_window % 2 == 0)
    throw ConfigError("inhibition window must be odd and > 1");

  std::vector<Shape> shapes;
  std::map<std::string, std::size_t> seen;
  Shape cur = spec.input;
  for (std::size_t li = 0; li < spec.layers.size(); ++li) {
    const LayerSpec& layer = spec.layers[li];
    if (!seen.emplace(layer.name, li).second) fail(layer, "duplicate layer name");
    if (!has_host(layer) && layer.activation != ActivationMode::none) fail(layer, "only conv/dense layers activate");
    if (layer.an) layer.an->validate();
    switch (layer.type) {
      case LayerType::conv: {
        if (cur.size() != 3) fail(layer, "needs a C x H x W input, got " + to_string(cur));
        if (layer.width <= 0) fail(layer, "width must be positive");
        ConvGeometry geom;
        try {
          geom = layer_geometry(layer);
          cur = {layer.width, geom.output_height(cur[1]), geom.output_width(cur[2])};
        } catch (const GeometryError& e) {
          fail(layer, e.what());
        }
        break;
      }
      case LayerType::dense:
        if (cur.size() != 1) fail(layer, "needs a flat input (add a flatten layer), got " + to_string(cur));
        if (layer.width <= 0) fail(layer, "width must be positive");
        cur = {layer.width};
        break;
      case LayerType::maxpool:
        if (cur.size() != 3 || cur[1] % 2 || cur[2] % 2) fail(layer, "needs even spatial extents, got " + to_string(cur));
        cur = {cur[0], cur[1] / 2, cur[2] / 2};
        break;
      case LayerType::upsample:
        if (cur.size() != 3) fail(layer, "needs a C x H x W input");
        cur = {cur[0], cur[1] * 2, cur[2] * 2};
        break;
      case LayerType::flatten:
        cur = {numel(cur)};
        break;
      case LayerType::concat: {
        auto it = seen.find(layer.with);
        if (layer.with.empty() || it == seen.end() || it->second >= li)
          fail(layer, "'with' must name an earlier layer, got '" + layer.with + "'");
        const Shape& other = shapes[it->second];
        if (cur.size() != 3 || other.size() != 3 || cur[1] != other[1] || cur[2] != other[2])
          fail(layer, "spatial mismatch " + to_string(cur) + " vs " + to_string(other));
        cur = {cur[0] + other[0], cur[1], cur[2]};
        break;
      }
    }
    shapes.push_back(cur);
  }

  if (spec.loss == LossKind::softmax_xent) {
    if (shapes.back().size() != 1) throw ConfigError("classifier must end in a flat layer");
    if (!spec.final_activation) {
      auto last = std::find_if(spec.layers.rbegin(), spec.layers.rend(), has_host);
      if (last != spec.layers.rend() && last->activation != ActivationMode::none)
        throw ConfigError("layer '" + last->name + "': the final layer of a classifier takes no activation");
    }
  } else if (shapes.back() != spec.input) {
    throw ConfigError("mse model output " + to_string(shapes.back()) + " differs from input " + to_string(spec.input));
  }
  return shapes;
}

namespace {

Index activation_extra(const ModelSpec& spec, const LayerSpec& layer, Index nodes) {
  const ANConfig& an = spec.an_for(layer);
  switch (layer.activation) {
    case ActivationMode::poly_fixed: return an.order + 1;
    case ActivationMode::attention: return 2 * nodes;
    case ActivationMode::inhibition: return spec.inhibition_learnable ? 1 : 0;
    case ActivationMode::activation_net:
      return an_parameter_count(an, nodes, layer.type == LayerType::conv ? LayerKind::conv : LayerKind::dense);
    default: return 0;
  }
}

}  // namespace

Index spec_parameter_count(const ModelSpec& spec) {
  const auto shapes = validate(spec);
  Shape prev = spec.input;
  Index total = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& layer = spec.layers[i];
    if (layer.type == LayerType::conv) total += layer.width * prev[0] * layer.kernel * layer.kernel;
    if (layer.type == LayerType::dense) total += layer.width * prev[0];
    if (has_host(layer)) {
      if (layer.bias) total += layer.width;
      total += activation_extra(spec, layer, layer.width);
    }
    prev = shapes[i];
  }
  return total;
}

Index activation_net_parameter_count(const ModelSpec& spec) {
  Index total = 0;
  for (const auto& layer : spec.layers)
    if (layer.activation == ActivationMode::activation_net) total += activation_extra(spec, layer, layer.width);
  return total;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

LayerSpec conv(std::string name, Index width, Index kernel, ActivationMode act) {
  LayerSpec l;
  l.name = std::move(name);
  l.type = LayerType::conv;
  l.width = width;
  l.kernel = kernel;
  l.activation = act;
  return l;
}

LayerSpec dense(std::string name, Index width, ActivationMode act) {
  LayerSpec l;
  l.name = std::move(name);
  l.type = LayerType::dense;
  l.width = width;
  l.activation = act;
  return l;
}

LayerSpec structural(std::string name, LayerType type, std::string with = {}) {
  LayerSpec l;
  l.name = std::move(name);
  l.type = type;
  l.with = std::move(with);
  return l;
}

void require_variant(ActivationMode variant) {
  if (variant == ActivationMode::none) throw ConfigError("preset variant must be one of the five activation modes");
}

}  // namespace

ModelSpec preset_mini_lenet(ActivationMode variant, Shape input, const ANConfig& an) {
  require_variant(variant);
  ModelSpec spec;
  spec.name = "mini_lenet_" + to_string(variant);
  spec.input = std::move(input);
  spec.loss = LossKind::softmax_xent;
  spec.an = an;
  spec.layers = {conv("conv1", 8, 3, variant),         structural("pool1", LayerType::maxpool),
                 conv("conv2", 16, 3, variant),        structural("pool2", LayerType::maxpool),
                 structural("flatten", LayerType::flatten), dense("dense1", 64, variant),
                 dense("dense2", 10, ActivationMode::none)};
  validate(spec);
  return spec;
}

ModelSpec preset_mini_unet(ActivationMode variant, Shape input, const ANConfig& an) {
  require_variant(variant);
  const auto relu = ActivationMode::relu;
  ModelSpec spec;
  spec.name = "mini_unet_" + to_string(variant);
  spec.input = input;
  spec.loss = LossKind::mse;
  spec.an = an;
  spec.layers = {conv("enc1a", 8, 3, variant),
                 conv("enc1b", 8, 3, relu),
                 structural("pool1", LayerType::maxpool),
                 conv("enc2a", 16, 3, variant),
                 conv("enc2b", 16, 3, relu),
                 structural("pool2", LayerType::maxpool),
                 conv("bottleneck", 16, 3, variant),
                 structural("up2", LayerType::upsample),
                 conv("dec2a", 16, 3, variant),
                 structural("skip2", LayerType::concat, "enc2b"),
                 conv("dec2b", 16, 3, relu),
                 structural("up1", LayerType::upsample),
                 conv("dec1a", 8, 3, variant),
                 structural("skip1", LayerType::concat, "enc1b"),
                 conv("dec1b", 8, 3, relu),
                 conv("output", input.at(0), 1, ActivationMode::none)};
  validate(spec);
  return spec;
}

ModelSpec preset(const std::string& name, ActivationMode variant, Shape input, const ANConfig& an) {
  if (name == "mini_lenet") return preset_mini_lenet(variant, std::move(input), an);
  if (name == "mini_unet") return preset_mini_unet(variant, std::move(input), an);
  throw ConfigError("unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// Model

template <typename Scalar>
struct Model<Scalar>::Stage {
  LayerSpec spec;
  std::optional<DenseLayer<Scalar>> dense;
  std::optional<ConvLayer<Scalar>> conv;
  std::unique_ptr<ActivationModule<Scalar>> activation;
};

template <typename Scalar>
Model<Scalar>::Model(ModelSpec spec, std::uint64_t seed, Padding an_padding) : spec_(std::move(spec)) {
  const auto shapes = validate(spec_);
  std::mt19937_64 rng(seed);
  Shape prev = spec_.input;
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    auto stage = std::make_unique<Stage>();
    stage->spec = spec_.layers[i];
    const LayerSpec& l = stage->spec;
    if (l.type == LayerType::conv) {
      stage->conv.emplace(l.name, prev[0], l.width, layer_geometry(l), l.bias, rng);
      stage->conv->collect(params_);
    } else if (l.type == LayerType::dense) {
      stage->dense.emplace(l.name, prev[0], l.width, l.bias, rng);
      stage->dense->collect(params_);
    }
    const LayerKind kind = l.type == LayerType::conv ? LayerKind::conv : LayerKind::dense;
    const ANConfig& an = spec_.an_for(l);
    switch (l.activation) {
      case ActivationMode::none: break;
      case ActivationMode::relu: stage->activation = std::make_unique<ReluActivation<Scalar>>(); break;
      case ActivationMode::poly_fixed:
        stage->activation = std::make_unique<FixedPolyActivation<Scalar>>(
            l.name, an.order >= 5 ? taylor_preset("tanh", an.order) : identity_coeffs(an.order));
        break;
      case ActivationMode::inhibition:
        stage->activation = std::make_unique<InhibitionActivation<Scalar>>(
            l.name, kind, l.width, spec_.inhibition_window, std::nullopt, spec_.inhibition_learnable);
        break;
      case ActivationMode::attention:
        stage->activation = std::make_unique<AttentionActivation<Scalar>>(l.name, l.width);
        break;
      case ActivationMode::activation_net:
        if (kind == LayerKind::conv)
          stage->activation = std::make_unique<ConvActivationNet<Scalar>>(l.name, l.width, an, rng, an_padding);
        else
          stage->activation = std::make_unique<DenseActivationNet<Scalar>>(l.name, l.width, an, rng);
        break;
    }
    if (stage->activation) stage->activation->collect(params_);
    stages_.push_back(std::move(stage));
    prev = shapes[i];
  }
}

template <typename Scalar>
Model<Scalar>::Model(Model&&) noexcept = default;
template <typename Scalar>
Model<Scalar>& Model<Scalar>::operator=(Model&&) noexcept = default;
template <typename Scalar>
Model<Scalar>::~Model() = default;

template <typename Scalar>
Var<Scalar> Model<Scalar>::forward(const Var<Scalar>& input, Trace* preactivations) const {
  const Shape& in = input->shape();
  if (in.size() != spec_.input.size() + 1 || !std::equal(spec_.input.begin(), spec_.input.end(), in.begin() + 1))
    throw DimensionError("model '" + spec_.name + "' expects [N]x" + to_string(spec_.input) + " input, got " +
                         to_string(in));
  std::map<std::string, Var<Scalar>> outputs;
  Var<Scalar> cur = input;
  for (const auto& stage : stages_) {
    const LayerSpec& l = stage->spec;
    switch (l.type) {
      case LayerType::conv: cur = stage->conv->forward(cur); break;
      case LayerType::dense: cur = stage->dense->forward(cur); break;
      case LayerType::maxpool: cur = ops::maxpool2(cur); break;
      case LayerType::upsample: cur = ops::upsample2(cur); break;
      case LayerType::flatten: cur = ops::flatten(cur); break;
      case LayerType::concat: cur = ops::concat_channels(cur, outputs.at(l.with)); break;
    }
    if (stage->activation) {
      if (preactivations) (*preactivations)[l.name] = cur->value;
      cur = stage->activation->forward(cur);
    }
    outputs[l.name] = cur;
  }
  return cur;
}

template <typename Scalar>
const ActivationModule<Scalar>* Model<Scalar>::activation(const std::string& layer) const {
  for (const auto& stage : stages_)
    if (stage->spec.name == layer) return stage->activation.get();
  throw ConfigError("model '" + spec_.name + "' has no layer '" + layer + "'");
}

template <typename Scalar>
std::map<std::string, Tensor<double>> Model<Scalar>::export_parameters() const {
  std::map<std::string, Tensor<double>> out;
  for (const auto& p : params_) out[p.name] = p.value().template cast<double>();
  return out;
}

template <typename Scalar>
void Model<Scalar>::import_parameters(const std::map<std::string, Tensor<double>>& values) {
  for (auto& p : params_) {
    auto it = values.find(p.name);
    if (it == values.end()) throw ConfigError("snapshot lacks parameter '" + p.name + "'");
    if (it->second.shape() != p.value().shape())
      throw ConfigError("snapshot parameter '" + p.name + "' has shape " + to_string(it->second.shape()) +
                        ", model expects " + to_string(p.value().shape()));
    p.value() = it->second.template cast<Scalar>();
  }
}

template class Model<float>;
template class Model<double>;

// ---------------------------------------------------------------------------
// Snapshots

void save_snapshot(const std::filesystem::path& path, const Snapshot& snapshot) {
  nlohmann::json j;
  j["format"] = "anet-snapshot-1";
  j["spec"] = format_model_spec(snapshot.spec);
  j["metadata"] = snapshot.metadata;
  for (const auto& [name, t] : snapshot.parameters) {
    j["parameters"][name]["shape"] = t.shape();
    j["parameters"][name]["data"] = std::vector<double>(t.values().begin(), t.values().end());
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write snapshot " + path.string());
  out << j.dump() << '\n';
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open snapshot " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    if (j.value("format", "") != "anet-snapshot-1") throw ConfigError("not an anet snapshot: " + path.string());
    Snapshot s;
    s.spec = parse_model_spec(j.at("spec").get<std::string>());
    s.metadata = j.value("metadata", std::map<std::string, std::string>{});
    if (j.contains("parameters"))
      for (const auto& [name, entry] : j["parameters"].items()) {
        auto data = entry.at("data").get<std::vector<double>>();
        Tensor<double>::Array arr = Eigen::Map<Tensor<double>::Array>(data.data(), static_cast<Index>(data.size()));
        s.parameters.emplace(name, Tensor<double>(entry.at("shape").get<Shape>(), std::move(arr)));
      }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed snapshot " + path.string() + ": " + e.what());
  }
}

}  // namespace anet
