#include "anet/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

namespace anet {

std::string to_string(Precision precision) { return precision == Precision::single ? "single" : "double"; }

Precision parse_precision(const std::string& text) {
  if (text == "single" || text == "float") return Precision::single;
  if (text == "double") return Precision::double_;
  throw ConfigError("unknown precision '" + text + "'");
}

void TrainConfig::validate() const {
  if (!(lr > 0) || !std::isfinite(lr)) throw ConfigError("learning rate must be positive");
  if (momentum < 0 || momentum >= 1) throw ConfigError("momentum must be in [0, 1)");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
}

template <typename Scalar>
Sgd<Scalar>::Sgd(ParameterList<Scalar>& params, double lr, double momentum)
    : params_(params), lr_(static_cast<Scalar>(lr)), momentum_(static_cast<Scalar>(momentum)) {
  if (momentum_ != Scalar(0))
    for (const auto& p : params_) velocity_.emplace_back(p.value().shape());
}

template <typename Scalar>
bool Sgd<Scalar>::step() {
  bool finite = true;
  for (auto& p : params_) finite = finite && p.grad().all_finite();
  if (finite) {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto& p = params_[i];
      if (velocity_.empty()) {
        p.value().array() -= lr_ * p.grad().array();
      } else {
        auto& v = velocity_[i].array();
        v = momentum_ * v + p.grad().array();
        p.value().array() -= lr_ * v;
      }
    }
  }
  zero_grad(params_);
  return finite;
}

template <typename Scalar>
Var<Scalar> model_loss(const Model<Scalar>& model, const Var<Scalar>& output, const Dataset& batch) {
  if (model.spec().loss == LossKind::softmax_xent) return ops::softmax_xent(output, batch.labels);
  if (!batch.has_targets()) throw DataError("denoising model '" + model.spec().name + "' needs target images");
  return ops::mse(output, batch.targets.template cast<Scalar>());
}

template <typename Scalar>
Evaluation evaluate(const Model<Scalar>& model, const Dataset& data, Index batch_size) {
  const Index n = data.size();
  if (n == 0) return {std::nan(""), std::nan("")};
  NoGradGuard no_grad;
  const bool classify = model.spec().loss == LossKind::softmax_xent;
  double loss_sum = 0;
  Index correct = 0;
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index start = 0; start < n; start += batch_size) {
    const Index len = std::min(batch_size, n - start);
    const Dataset batch = data.select(std::span<const Index>(idx).subspan(start, len));
    const Var<Scalar> out = model.forward(constant(batch.images.template cast<Scalar>()));
    loss_sum += static_cast<double>(model_loss(model, out, batch)->value[0]) * len;
    if (classify) {
      const Index classes = out->value.dim(1);
      const auto logits = out->value.matrix(len, classes);
      for (Index r = 0; r < len; ++r) {
        Index best = 0;
        logits.row(r).maxCoeff(&best);
        if (best == batch.labels[static_cast<std::size_t>(r)]) ++correct;
      }
    }
  }
  const double loss = loss_sum / static_cast<double>(n);
  return {loss, classify ? static_cast<double>(correct) / static_cast<double>(n) : loss};
}

nlohmann::json RunRecord::to_json() const {
  using nlohmann::json;
  json epochs_json = json::array();
  for (const auto& e : epochs)
    epochs_json.push_back({{"epoch", e.epoch},
                           {"train_loss", e.train_loss},
                           {"val_loss", e.val_loss},
                           {metric_name, e.metric},
                           {"wall_seconds", e.wall_seconds}});
  json j{{"model", model},
         {"metric", metric_name},
         {"parameters", parameters},
         {"config",
          {{"lr", config.lr},
           {"momentum", config.momentum},
           {"epochs", config.epochs},
           {"batch_size", config.batch_size},
           {"seed", config.seed},
           {"precision", to_string(config.precision)}}},
         {"epochs", epochs_json},
         {"best_epoch", best_epoch},
         {"diverged", diverged},
         {"provenance", provenance}};
  j["test_loss"] = test_loss ? json(*test_loss) : json(nullptr);
  j["test_" + metric_name] = test_metric ? json(*test_metric) : json(nullptr);
  if (diverged) j["divergence"] = divergence;
  return j;
}

void write_losses_csv(std::ostream& os, const RunRecord& record) {
  os << "epoch,train_loss,val_loss,metric\n";
  char buf[128];
  for (const auto& e : record.epochs) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g\n", e.epoch, e.train_loss, e.val_loss, e.metric);
    os << buf;
  }
}

template <typename Scalar>
RunRecord train(Model<Scalar>& model, const TrainData& data, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  data.train.validate();
  const Index n = data.train.size();
  if (n == 0) throw DataError("training set is empty");

  RunRecord rec;
  rec.model = model.spec().name;
  rec.metric_name = model.spec().loss == LossKind::softmax_xent ? "accuracy" : "mse";
  rec.config = config;
  rec.parameters = model.parameter_count();

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  auto diverge = [&](std::string why) {
    rec.diverged = true;
    rec.divergence = std::move(why);
  };

  const bool has_validation = data.validation.size() > 0;
  const Evaluation initial_train = evaluate(model, data.train);
  const Evaluation initial_val = has_validation ? evaluate(model, data.validation) : initial_train;
  rec.epochs.push_back({0, initial_train.loss, initial_val.loss, initial_val.metric, elapsed()});
  if (!std::isfinite(initial_train.loss)) diverge("non-finite loss before training");

  auto best = model.export_parameters();
  double best_val = initial_val.loss;

  Sgd<Scalar> optimiser(model.parameters(), config.lr, config.momentum);
  std::mt19937_64 rng(config.seed ^ 0x5DEECE66DULL);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  for (int epoch = 1; epoch <= config.epochs && !rec.diverged; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0;
    for (Index b = 0; b < n; b += config.batch_size) {
      const Index len = std::min(config.batch_size, n - b);
      const Dataset batch = data.train.select(std::span<const Index>(order).subspan(b, len));
      const Var<Scalar> loss = model_loss(model, model.forward(constant(batch.images.template cast<Scalar>())), batch);
      const double value = static_cast<double>(loss->value[0]);
      if (!std::isfinite(value)) {
        diverge("non-finite training loss in epoch " + std::to_string(epoch));
        break;
      }
      backward(loss);
      if (!optimiser.step()) {
        diverge("non-finite gradient in epoch " + std::to_string(epoch));
        break;
      }
      loss_sum += value * static_cast<double>(len);
    }
    if (rec.diverged) break;
    const Evaluation val = has_validation ? evaluate(model, data.validation) : Evaluation{};
    const double train_loss = loss_sum / static_cast<double>(n);
    rec.epochs.push_back({epoch, train_loss, has_validation ? val.loss : train_loss, val.metric, elapsed()});
    const double score = rec.epochs.back().val_loss;
    if (!std::isfinite(score)) {
      diverge("non-finite validation loss in epoch " + std::to_string(epoch));
      break;
    }
    if (!has_validation || score < best_val || !std::isfinite(best_val)) {
      best_val = score;
      best = model.export_parameters();
      rec.best_epoch = epoch;
    }
    if (on_epoch) on_epoch(rec.epochs.back());
  }

  model.import_parameters(best);
  if (data.test.size() > 0) {
    const Evaluation test = evaluate(model, data.test);
    rec.test_loss = test.loss;
    rec.test_metric = test.metric;
  }
  return rec;
}

GradCheckReport check_model_gradients(const ModelSpec& spec, std::uint64_t seed, const GradCheckOptions& options,
                                      double jitter) {
  Model<double> model(spec, seed);
  std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL);
  std::uniform_real_distribution<double> noise(-jitter, jitter), pixel(0.0, 1.0);
  for (auto& p : model.parameters())
    for (auto& v : p.value().values()) v += noise(rng);

  const Index batch_size = 2;
  Shape shape{batch_size};
  shape.insert(shape.end(), spec.input.begin(), spec.input.end());
  Dataset batch;
  batch.images = Tensor<float>(shape);
  for (auto& v : batch.images.values()) v = static_cast<float>(pixel(rng));
  const Tensor<double> input = batch.images.cast<double>();

  if (spec.loss == LossKind::softmax_xent) {
    const Index classes = validate(spec).back().at(0);
    std::uniform_int_distribution<int> label(0, static_cast<int>(classes) - 1);
    for (Index i = 0; i < batch_size; ++i) batch.labels.push_back(label(rng));
  } else {
    batch.targets = Tensor<float>(shape);
    for (auto& v : batch.targets.values()) v = static_cast<float>(pixel(rng));
  }

  GradCheckOptions opts = options;
  opts.seed = options.seed ^ seed;
  return gradient_check(
      model.parameters(), [&] { return model_loss(model, model.forward(constant(input)), batch); }, opts);
}

template class Sgd<float>;
template class Sgd<double>;
template Var<float> model_loss(const Model<float>&, const Var<float>&, const Dataset&);
template Var<double> model_loss(const Model<double>&, const Var<double>&, const Dataset&);
template Evaluation evaluate(const Model<float>&, const Dataset&, Index);
template Evaluation evaluate(const Model<double>&, const Dataset&, Index);
template RunRecord train(Model<float>&, const TrainData&, const TrainConfig&, const EpochCallback&);
template RunRecord train(Model<double>&, const TrainData&, const TrainConfig&, const EpochCallback&);

}  // namespace anet
