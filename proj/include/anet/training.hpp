#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anet/data.hpp"
#include "anet/models.hpp"

namespace anet {

enum class Precision { single, double_ };

std::string to_string(Precision precision);
Precision parse_precision(const std::string& text);

struct TrainConfig {
  double lr = 0.01;
  double momentum = 0.0;
  int epochs = 20;
  Index batch_size = 32;
  std::uint64_t seed = 0;
  Precision precision = Precision::single;

  void validate() const;
};

// w <- w - lr * v, v <- momentum * v + g. Gradients are zeroed after every
// call, applied or not.
template <typename Scalar>
class Sgd {
 public:
  Sgd(ParameterList<Scalar>& params, double lr, double momentum = 0.0);

  // False (and no parameter touched) if any gradient is non-finite.
  bool step();

 private:
  ParameterList<Scalar>& params_;
  Scalar lr_, momentum_;
  std::vector<Tensor<Scalar>> velocity_;
};

// Loss of a model output against a batch: softmax cross-entropy on labels
// or MSE on targets, chosen by the spec.
template <typename Scalar>
Var<Scalar> model_loss(const Model<Scalar>& model, const Var<Scalar>& output, const Dataset& batch);

struct Evaluation {
  double loss = 0;
  double metric = 0;  // accuracy for classifiers, MSE for denoisers
};

template <typename Scalar>
Evaluation evaluate(const Model<Scalar>& model, const Dataset& data, Index batch_size = 250);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0;
  double val_loss = 0;
  double metric = 0;  // on the validation set
  double wall_seconds = 0;
};

struct RunRecord {
  std::string model;
  std::string metric_name;
  TrainConfig config;
  Index parameters = 0;
  std::vector<EpochRecord> epochs;  // entry 0 is the evaluation before training
  int best_epoch = 0;
  std::optional<double> test_loss;
  std::optional<double> test_metric;  // from the best-validation parameters
  bool diverged = false;
  std::string divergence;
  std::map<std::string, std::string> provenance;

  const EpochRecord& final() const { return epochs.back(); }
  nlohmann::json to_json() const;
};

// epoch,train_loss,val_loss,metric with %.9g values.
void write_losses_csv(std::ostream& os, const RunRecord& record);

struct TrainData {
  Dataset train;
  Dataset validation;
  Dataset test;  // may be empty
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Train loss of an epoch is the mean of the pre-update batch losses. The
// parameters with the lowest validation loss are restored at the end and
// used for the test evaluation.
template <typename Scalar>
RunRecord train(Model<Scalar>& model, const TrainData& data, const TrainConfig& config,
                const EpochCallback& on_epoch = {});

// Finite-difference check of a spec built in double precision on a batch
// of two random inputs. Parameters are jittered so that zero-initialised
// weights do not hide terms of the backward rule.
GradCheckReport check_model_gradients(const ModelSpec& spec, std::uint64_t seed, const GradCheckOptions& options = {},
                                      double jitter = 0.05);

}  // namespace anet
