// Experiment harness: train, compare, gradcheck, dump-activations.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "anet/experiment.hpp"

namespace fs = std::filesystem;
using namespace anet;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInternal = 1, kConfig = 2, kData = 3, kDiverged = 4, kGradcheck = 5 };

struct ModelFlags {
  std::string preset = "mini_lenet";
  std::string model_file;
  std::string variant = "activation_net";
  int order = 5;
  std::string an_mode = "full";
  std::string an_init = "zero_v_tanh";
  Index an_kernel = 3;
  std::string u_clip = "5";

  ANConfig an() const {
    ANConfig c;
    c.order = order;
    c.mode = parse_an_mode(an_mode);
    c.init = parse_an_init(an_init);
    c.kernel = an_kernel;
    if (u_clip == "off" || u_clip == "none") {
      c.u_clip.reset();
    } else {
      try {
        c.u_clip = std::stod(u_clip);
      } catch (const std::exception&) {
        throw ConfigError("--u-clip expects a number or 'off', got '" + u_clip + "'");
      }
    }
    c.validate();
    return c;
  }

  ModelSpec spec(const Shape& input, std::optional<ActivationMode> variant_override = {}) const {
    if (!model_file.empty()) return load_model_spec(model_file);
    return anet::preset(preset, variant_override.value_or(parse_activation_mode(variant)), input, an());
  }
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--preset", f.preset, "mini_lenet | mini_unet")->capture_default_str();
  cmd->add_option("--model-file", f.model_file, "model spec text file (overrides --preset and AN flags)");
  cmd->add_option("--an-mode", f.an_mode, "dense activation-net weights: full | shared")->capture_default_str();
  cmd->add_option("--an-init", f.an_init, "identity | tanh_taylor | zero_v_tanh")->capture_default_str();
  cmd->add_option("--K", f.order, "polynomial order")->capture_default_str();
  cmd->add_option("--an-kernel", f.an_kernel, "activation-net conv kernel extent")->capture_default_str();
  cmd->add_option("--u-clip", f.u_clip, "clamp bound on u before powering, or 'off'")->capture_default_str();
}

struct TrainFlags {
  DataOptions data;
  std::string data_dir;
  TrainConfig config;
  std::string precision = "single";
  std::string out = "out";
  bool quiet = false;

  DataOptions data_options() const {
    DataOptions d = data;
    d.data_dir = data_dir.empty() ? default_data_dir(d.dataset) : fs::path(data_dir);
    return d;
  }
  TrainConfig train_config() const {
    TrainConfig c = config;
    c.precision = parse_precision(precision);
    c.validate();
    return c;
  }
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--dataset", f.data.dataset, "mnist | cifar10")->capture_default_str();
  cmd->add_option("--data-dir", f.data_dir, "dataset directory (default $ANET_DATA_DIR, else data/<dataset>)");
  cmd->add_option("--n-train", f.data.n_train, "training images drawn from the training pool")->capture_default_str();
  cmd->add_option("--n-test", f.data.n_test, "test images drawn from the test pool")->capture_default_str();
  cmd->add_option("--noise-var", f.data.noise_variance, "Gaussian noise variance (denoising)")->capture_default_str();
  cmd->add_option("--data-seed", f.data.data_seed, "seed of the subset, split and noise")->capture_default_str();
  cmd->add_option("--val-fraction", f.data.validation_fraction, "validation share of the training subset")
      ->capture_default_str();
  cmd->add_option("--epochs", f.config.epochs)->capture_default_str();
  cmd->add_option("--lr", f.config.lr)->capture_default_str();
  cmd->add_option("--momentum", f.config.momentum)->capture_default_str();
  cmd->add_option("--batch", f.config.batch_size)->capture_default_str();
  cmd->add_option("--seed", f.config.seed, "initialisation and shuffling seed")->capture_default_str();
  cmd->add_option("--precision", f.precision, "single | double")->capture_default_str();
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_flag("--quiet", f.quiet, "no per-epoch progress on stderr");
}

Shape dataset_shape(const std::string& dataset) {
  if (dataset == "mnist") return {1, 28, 28};
  if (dataset == "cifar10") return {3, 32, 32};
  throw ConfigError("unknown dataset '" + dataset + "'");
}

Shape parse_shape_flag(const std::string& text) {
  Shape s;
  std::stringstream ss(text);
  std::string part;
  try {
    while (std::getline(ss, part, 'x')) s.push_back(std::stoll(part));
  } catch (const std::exception&) {
    throw ConfigError("malformed shape '" + text + "', expected CxHxW");
  }
  if (s.size() != 3) throw ConfigError("malformed shape '" + text + "', expected CxHxW");
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

EpochCallback progress(bool quiet, const std::string& label, const std::string& metric) {
  if (quiet) return {};
  return [label, metric](const EpochRecord& e) {
    std::fprintf(stderr, "[%s] epoch %d train_loss %.6f val_loss %.6f %s %.4f (%.1fs)\n", label.c_str(), e.epoch,
                 e.train_loss, e.val_loss, metric.c_str(), e.metric, e.wall_seconds);
  };
}

// run.json, losses.csv and snapshot.json under `dir`.
void write_run(const fs::path& dir, RunOutcome& outcome) {
  fs::create_directories(dir);
  write_text(dir / "run.json", outcome.record.to_json().dump(2) + "\n");
  std::ostringstream csv;
  write_losses_csv(csv, outcome.record);
  write_text(dir / "losses.csv", csv.str());
  outcome.snapshot.metadata = outcome.record.provenance;
  outcome.snapshot.metadata["seed"] = std::to_string(outcome.record.config.seed);
  save_snapshot(dir / "snapshot.json", outcome.snapshot);
}

int cmd_train(const ModelFlags& mf, const TrainFlags& tf) {
  const DataOptions data_opts = tf.data_options();
  const TrainConfig config = tf.train_config();
  const ModelSpec spec = mf.spec(dataset_shape(data_opts.dataset));
  const TrainData data = prepare_data(data_opts, spec.loss);
  const std::string metric = spec.loss == LossKind::softmax_xent ? "accuracy" : "mse";
  RunOutcome outcome = run_training(spec, data, config, progress(tf.quiet, spec.name, metric));
  outcome.record.provenance = provenance(data_opts, spec.loss);
  write_run(tf.out, outcome);
  if (outcome.record.diverged) {
    std::cerr << "diverged: " << outcome.record.divergence << "\n";
    return kDiverged;
  }
  if (!tf.quiet && outcome.record.test_metric)
    std::fprintf(stderr, "test %s %.6f (best epoch %d)\n", metric.c_str(), *outcome.record.test_metric,
                 outcome.record.best_epoch);
  return kOk;
}

int cmd_compare(const ModelFlags& mf, const TrainFlags& tf) {
  if (!mf.model_file.empty()) throw ConfigError("compare runs the preset variants; --model-file is not accepted");
  const DataOptions data_opts = tf.data_options();
  const TrainConfig config = tf.train_config();
  const Shape input = dataset_shape(data_opts.dataset);
  const LossKind loss = preset(mf.preset, ActivationMode::relu, input, mf.an()).loss;
  const TrainData data = prepare_data(data_opts, loss);

  std::vector<CompareRow> rows;
  json runs = json::array();
  Index relu_params = 0;
  bool any_failed = false;
  for (ActivationMode variant : comparison_variants()) {
    CompareRow row;
    row.variant = to_string(variant);
    json entry{{"variant", row.variant}};
    try {
      const ModelSpec spec = mf.spec(input, variant);
      row.params = spec_parameter_count(spec);
      if (variant == ActivationMode::relu) relu_params = row.params;
      RunOutcome outcome = run_training(spec, data, config, progress(tf.quiet, spec.name, "metric"));
      outcome.record.provenance = provenance(data_opts, loss);
      write_run(fs::path(tf.out) / row.variant, outcome);
      const RunRecord& r = outcome.record;
      row.final_train_loss = r.final().train_loss;
      row.final_val_loss = r.final().val_loss;
      row.test_metric = r.test_metric.value_or(std::nan(""));
      if (r.diverged) row.failure = "diverged: " + r.divergence;
      entry["run"] = r.to_json();
    } catch (const std::exception& e) {
      row.failure = e.what();
    }
    if (!row.failure.empty()) {
      any_failed = true;
      entry["failure"] = row.failure;
      std::cerr << row.variant << " failed: " << row.failure << "\n";
    }
    rows.push_back(row);
    runs.push_back(entry);
  }
  for (auto& row : rows) row.param_ratio = relu_params > 0 ? double(row.params) / double(relu_params) : std::nan("");

  fs::create_directories(tf.out);
  std::ostringstream csv;
  write_compare_csv(csv, rows);
  write_text(fs::path(tf.out) / "compare.csv", csv.str());
  write_text(fs::path(tf.out) / "compare.json",
             json{{"preset", mf.preset}, {"provenance", provenance(data_opts, loss)}, {"runs", runs}}.dump(2) + "\n");
  std::cout << csv.str();
  return any_failed ? kDiverged : kOk;
}

struct GradcheckFlags {
  bool all = false;
  std::string input = "1x28x28";
  std::uint64_t seed = 0;
  Index samples = 50;
  double tolerance = 1e-4;
  std::string out = "out";
};

int cmd_gradcheck(const ModelFlags& mf, const GradcheckFlags& gf) {
  const Shape input = parse_shape_flag(gf.input);
  std::vector<std::pair<ModelSpec, std::string>> specs;
  if (gf.all) {
    for (const char* name : {"mini_lenet", "mini_unet"}) {
      for (ActivationMode variant : comparison_variants()) {
        ANConfig an = mf.an();
        an.mode = ANMode::full;
        specs.emplace_back(preset(name, variant, input, an), "full");
        if (variant == ActivationMode::activation_net) {
          an.mode = ANMode::shared;
          specs.emplace_back(preset(name, variant, input, an), "shared");
        }
      }
    }
  } else {
    specs.emplace_back(mf.spec(input), mf.an_mode);
  }

  GradCheckOptions options;
  options.samples_per_parameter = gf.samples;
  json checks = json::array();
  bool passed = true;
  for (const auto& [spec, mode] : specs) {
    const GradCheckReport report = check_model_gradients(spec, gf.seed, options);
    const bool ok = report.passed(gf.tolerance);
    passed = passed && ok;
    json params = json::object();
    Index one_sided = 0;
    for (const auto& e : report.entries) {
      params[e.parameter] = {{"max_relative_error", e.max_relative_error},
                             {"coordinates", e.coordinates_checked},
                             {"failed", e.failed_coordinates},
                             {"one_sided", e.one_sided_coordinates},
                             {"kinked", e.kinked_coordinates}};
      one_sided += e.one_sided_coordinates;
    }
    checks.push_back({{"model", spec.name},
                      {"an_mode", mode},
                      {"max_relative_error", report.max_relative_error()},
                      {"coordinates", report.coordinates_checked()},
                      {"one_sided", one_sided},
                      {"kinked", report.kinked_coordinates()},
                      {"passed", ok},
                      {"parameters", params}});
    std::printf("%-28s %-6s max_rel_err %.3e  coords %ld one-sided %ld kinked %ld  %s\n", spec.name.c_str(),
                mode.c_str(), report.max_relative_error(), static_cast<long>(report.coordinates_checked()),
                static_cast<long>(one_sided), static_cast<long>(report.kinked_coordinates()), ok ? "PASS" : "FAIL");
  }
  fs::create_directories(gf.out);
  write_text(fs::path(gf.out) / "gradcheck.json", json{{"epsilon", options.epsilon},
                                                       {"samples_per_parameter", options.samples_per_parameter},
                                                       {"tolerance", gf.tolerance},
                                                       {"seed", gf.seed},
                                                       {"passed", passed},
                                                       {"checks", checks}}
                                                      .dump(2) + "\n");
  return passed ? kOk : kGradcheck;
}

struct DumpFlags {
  std::string snapshot;
  Index input_index = 0;
  std::string layer;
  std::string grid = "-2:2:41";
  std::optional<Index> node;
  std::string pixel;
  std::string data_dir;
  std::string out = "out";
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  double lo = 0, hi = 0;
  long n = 0;
  try {
    if (parts.size() != 3) throw std::invalid_argument(text);
    std::size_t used = 0;
    lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(text);
    hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(text);
    n = std::stol(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ConfigError("malformed grid '" + text + "', expected lo:hi:n");
  }
  if (n < 1 || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ConfigError("malformed grid '" + text + "', need n >= 1 and lo <= hi");
  std::vector<double> grid;
  for (long i = 0; i < n; ++i) grid.push_back(n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1));
  return grid;
}

int cmd_dump(const DumpFlags& df) {
  const std::vector<double> grid = parse_grid(df.grid);
  SiteSelection selection;
  selection.node = df.node;
  if (!df.pixel.empty()) {
    const auto comma = df.pixel.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument(df.pixel);
      selection.row = std::stoll(df.pixel.substr(0, comma));
      selection.col = std::stoll(df.pixel.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError("malformed --pixel '" + df.pixel + "', expected ROW,COL");
    }
  }

  const Snapshot snap = load_snapshot(df.snapshot);
  Model<float> model(snap.spec, 0);
  model.import_parameters(snap.parameters);
  const auto* an = dynamic_cast<const ActivationNet<float>*>(model.activation(df.layer));
  if (!an) throw ConfigError("layer '" + df.layer + "' has no activation network");

  auto meta = [&](const std::string& key) -> std::string {
    auto it = snap.metadata.find(key);
    if (it == snap.metadata.end()) throw ConfigError("snapshot lacks data provenance '" + key + "'");
    return it->second;
  };
  DataOptions data_opts;
  data_opts.dataset = meta("dataset");
  data_opts.n_train = std::stoll(meta("n_train"));
  data_opts.n_test = std::stoll(meta("n_test"));
  data_opts.data_seed = std::stoull(meta("data_seed"));
  data_opts.validation_fraction = std::stod(meta("validation_fraction"));
  if (snap.spec.loss == LossKind::mse) data_opts.noise_variance = std::stod(meta("noise_variance"));
  data_opts.data_dir = df.data_dir.empty() ? default_data_dir(data_opts.dataset) : fs::path(df.data_dir);
  const TrainData data = prepare_data(data_opts, snap.spec.loss);
  if (df.input_index < 0 || df.input_index >= data.test.size())
    throw ConfigError("--input-index " + std::to_string(df.input_index) + " outside the " +
                      std::to_string(data.test.size()) + " test images");

  const Index idx[] = {df.input_index};
  const Dataset one = data.test.select(idx);
  Model<float>::Trace trace;
  {
    NoGradGuard no_grad;
    model.forward(constant(one.images), &trace);
  }
  const Tensor<float>& u = trace.at(df.layer);
  const Tensor<float> sample = u.reshaped(Shape(u.shape().begin() + 1, u.shape().end()));
  const auto rows = dump_activation_shapes(*an, df.layer, sample, selection, grid);

  fs::create_directories(df.out);
  std::ofstream csv(fs::path(df.out) / "activations.csv", std::ios::binary);
  if (!csv) throw DataError("cannot write " + (fs::path(df.out) / "activations.csv").string());
  write_curve_csv(csv, rows);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Activation-network experiments"};
  app.require_subcommand(1);

  ModelFlags train_model, compare_model, check_model;
  TrainFlags train_flags, compare_flags;
  GradcheckFlags check_flags;
  DumpFlags dump_flags;

  auto* train = app.add_subcommand("train", "train one model");
  add_model_flags(train, train_model);
  train->add_option("--variant", train_model.variant, "relu | poly_fixed | inhibition | attention | activation_net")
      ->capture_default_str();
  add_train_flags(train, train_flags);

  auto* compare = app.add_subcommand("compare", "train all five activation variants of a preset");
  add_model_flags(compare, compare_model);
  add_train_flags(compare, compare_flags);

  auto* check = app.add_subcommand("gradcheck", "finite-difference gradient check");
  add_model_flags(check, check_model);
  check->add_option("--variant", check_model.variant)->capture_default_str();
  check->add_flag("--all", check_flags.all, "every preset x variant, both dense AN modes");
  check->add_option("--input", check_flags.input, "input shape CxHxW")->capture_default_str();
  check->add_option("--seed", check_flags.seed)->capture_default_str();
  check->add_option("--samples", check_flags.samples, "coordinates per parameter")->capture_default_str();
  check->add_option("--tolerance", check_flags.tolerance)->capture_default_str();
  check->add_option("--out", check_flags.out)->capture_default_str();

  auto* dump = app.add_subcommand("dump-activations", "per-site activation curves of a trained snapshot");
  dump->add_option("--snapshot", dump_flags.snapshot)->required();
  dump->add_option("--layer", dump_flags.layer)->required();
  dump->add_option("--input-index", dump_flags.input_index, "test image index")->capture_default_str();
  dump->add_option("--grid", dump_flags.grid, "lo:hi:n")->capture_default_str();
  dump->add_option("--node", dump_flags.node, "restrict to one node/channel");
  dump->add_option("--pixel", dump_flags.pixel, "restrict to ROW,COL");
  dump->add_option("--data-dir", dump_flags.data_dir);
  dump->add_option("--out", dump_flags.out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (*train) return cmd_train(train_model, train_flags);
    if (*compare) return cmd_compare(compare_model, compare_flags);
    if (*check) return cmd_gradcheck(check_model, check_flags);
    if (*dump) return cmd_dump(dump_flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const FormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ContractError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
