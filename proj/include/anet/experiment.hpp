#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anet/training.hpp"

namespace anet {

struct DataOptions {
  std::string dataset = "mnist";  // mnist | cifar10
  std::filesystem::path data_dir;
  Index n_train = 2000;
  Index n_test = 1000;
  double noise_variance = 0.05;  // denoising only
  // Subset draw, validation split and noise. Kept apart from the run seed
  // so that every run of a comparison sees the same data.
  std::uint64_t data_seed = 0;
  double validation_fraction = 0.1;
};

// Directory from ANET_DATA_DIR, else data/<dataset>.
std::filesystem::path default_data_dir(const std::string& dataset);

// Classifiers get a stratified subset; denoisers take the first n images
// and Gaussian-corrupted copies as inputs.
TrainData prepare_data(const DataOptions& options, LossKind loss);

std::map<std::string, std::string> provenance(const DataOptions& options, LossKind loss);

struct RunOutcome {
  RunRecord record;
  Snapshot snapshot;  // best-validation parameters
};

// Builds the spec at the configured precision, trains it and captures the
// restored parameters.
RunOutcome run_training(const ModelSpec& spec, const TrainData& data, const TrainConfig& config,
                        const EpochCallback& on_epoch = {});

struct CompareRow {
  std::string variant;
  Index params = 0;
  double param_ratio = 0;  // params / params of the relu row
  double final_train_loss = 0;
  double final_val_loss = 0;
  double test_metric = 0;
  std::string failure;  // empty on success
};

// variant,params,param_ratio,final_train_loss,final_val_loss,test_metric.
// Failed rows carry nan metrics.
void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows);

}  // namespace anet
