#include "anet/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace anet {

namespace fs = std::filesystem;

fs::path default_data_dir(const std::string& dataset) {
  if (const char* env = std::getenv("ANET_DATA_DIR"); env && *env) return env;
  return fs::path("data") / dataset;
}

namespace {

std::pair<Dataset, Dataset> load_pools(const DataOptions& options) {
  const fs::path dir = options.data_dir.empty() ? default_data_dir(options.dataset) : options.data_dir;
  if (options.dataset == "mnist") {
    return {load_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte"),
            load_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte")};
  }
  if (options.dataset == "cifar10") {
    std::vector<fs::path> batches;
    for (int i = 1; i <= 5; ++i) {
      const fs::path p = dir / ("data_batch_" + std::to_string(i) + ".bin");
      if (fs::exists(p)) batches.push_back(p);
    }
    if (batches.empty()) throw DataError("no CIFAR-10 data_batch_*.bin files in " + dir.string());
    return {load_cifar10_bin(batches), load_cifar10_bin({dir / "test_batch.bin"})};
  }
  throw ConfigError("unknown dataset '" + options.dataset + "'");
}

Dataset draw(const Dataset& pool, Index n, std::uint64_t seed, SubsetMode mode, const char* what) {
  if (n < 0 || n > pool.size())
    throw DataError(std::string(what) + " subset of " + std::to_string(n) + " exceeds the " +
                    std::to_string(pool.size()) + " available images");
  return subset(pool, n, seed, mode);
}

}  // namespace

TrainData prepare_data(const DataOptions& options, LossKind loss) {
  auto [train_pool, test_pool] = load_pools(options);
  const bool denoise = loss == LossKind::mse;
  const SubsetMode mode = denoise ? SubsetMode::first_n : SubsetMode::stratified;
  Dataset train = draw(train_pool, options.n_train, options.data_seed, mode, "training");
  Dataset test = draw(test_pool, options.n_test, options.data_seed + 1, mode, "test");
  if (denoise) {
    train = corrupt_gaussian(train, {options.noise_variance, options.data_seed + 2});
    test = corrupt_gaussian(test, {options.noise_variance, options.data_seed + 3});
  }
  Split split = split_validation(train, options.validation_fraction, options.data_seed + 4);
  return {std::move(split.train), std::move(split.validation), std::move(test)};
}

std::map<std::string, std::string> provenance(const DataOptions& options, LossKind loss) {
  std::map<std::string, std::string> p{{"dataset", options.dataset},
                                       {"n_train", std::to_string(options.n_train)},
                                       {"n_test", std::to_string(options.n_test)},
                                       {"data_seed", std::to_string(options.data_seed)},
                                       {"validation_fraction", std::to_string(options.validation_fraction)},
                                       {"subset", loss == LossKind::mse ? "first_n" : "stratified"}};
  if (loss == LossKind::mse) p["noise_variance"] = std::to_string(options.noise_variance);
  return p;
}

namespace {

template <typename Scalar>
RunOutcome run_at(const ModelSpec& spec, const TrainData& data, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  Model<Scalar> model(spec, config.seed);
  RunOutcome out;
  out.record = train(model, data, config, on_epoch);
  out.snapshot.spec = spec;
  out.snapshot.parameters = model.export_parameters();
  return out;
}

}  // namespace

RunOutcome run_training(const ModelSpec& spec, const TrainData& data, const TrainConfig& config,
                        const EpochCallback& on_epoch) {
  if (data.train.sample_shape() != spec.input)
    throw ConfigError("model '" + spec.name + "' expects input " + to_string(spec.input) + ", data has " +
                      to_string(data.train.sample_shape()));
  if (config.precision == Precision::double_) return run_at<double>(spec, data, config, on_epoch);
  return run_at<float>(spec, data, config, on_epoch);
}

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows) {
  os << "variant,params,param_ratio,final_train_loss,final_val_loss,test_metric\n";
  char buf[256];
  for (const auto& r : rows) {
    const double nan = std::nan("");
    const bool ok = r.failure.empty();
    std::snprintf(buf, sizeof buf, "%s,%lld,%.1f%%,%.9g,%.9g,%.9g\n", r.variant.c_str(),
                  static_cast<long long>(r.params), 100.0 * r.param_ratio, ok ? r.final_train_loss : nan,
                  ok ? r.final_val_loss : nan, ok ? r.test_metric : nan);
    os << buf;
  }
}

}  // namespace anet
