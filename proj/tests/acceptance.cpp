// Acceptance gate. One PASS/FAIL line per criterion; `anet_acceptance N`
// runs criterion N only, no arguments runs all of them.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>

#include "anet/experiment.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace anet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("anet_acceptance_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the CLI with stdout/stderr discarded; returns its exit code.
int cli(const std::string& args) {
  const std::string cmd = std::string(ANET_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

double cpu_seconds() { return double(std::clock()) / CLOCKS_PER_SEC; }

fs::path mnist_dir() {
  if (const char* env = std::getenv("ANET_DATA_DIR"); env && *env) return env;
  return fs::path(ANET_SOURCE_DIR) / "data" / "mnist";
}

// Settings shared by every variant and seed of criteria 5 and 6.
TrainConfig desk_config(std::uint64_t seed) {
  TrainConfig c;
  c.lr = 0.01;
  c.momentum = 0.9;
  c.batch_size = 32;
  c.epochs = 5;
  c.seed = seed;
  return c;
}

ANConfig desk_an() {
  ANConfig an;
  an.u_clip = 1.0;
  return an;
}

Outcome gradient_integrity() {
  const fs::path out = scratch("gradcheck");
  const auto start = std::chrono::steady_clock::now();
  const int code = cli("gradcheck --all --out " + out.string());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ifstream in(out / "gradcheck.json");
  if (!in) return {false, fmt("exit %d, no gradcheck.json", code)};
  const auto j = nlohmann::json::parse(in);
  double worst = 0;
  int checks = 0, kinds = 0;
  bool shared = false;
  for (const auto& c : j.at("checks")) {
    ++checks;
    worst = std::max(worst, c.at("max_relative_error").get<double>());
    shared = shared || c.at("an_mode") == "shared";
    // mini_lenet's activation nets decorate both conv and dense layers.
    if (c.at("model") == "mini_lenet_activation_net") kinds = 2;
  }
  const bool pass = code == 0 && checks == 12 && shared && kinds == 2 && worst < 1e-4 && secs < 300;
  return {pass, fmt("%d checks, worst relative error %.2e (< 1e-4), %.0f s (< 300 s), exit %d", checks, worst,
                    secs, code)};
}

Outcome baseline_recovery() {
  std::mt19937_64 rng(20);
  double worst = 0;
  for (const char* name : {"tanh", "sigmoid"}) {
    const PolyCoeffs preset = taylor_preset(name, 5);
    ANConfig cfg;
    cfg.init = ANInit::identity;
    cfg.u_clip = std::nullopt;
    DenseActivationNet<double> dense("d", 4, cfg, rng);
    ConvActivationNet<double> conv("c", 2, cfg, rng);
    dense.set_constant(preset);
    conv.set_constant(preset);
    FixedPolyActivation<double> fixed("p", preset);
    const auto ud = oracle::random_tensor<double>({25, 4}, rng, -2, 2);     // 100 values
    const auto uc = oracle::random_tensor<double>({2, 2, 5, 5}, rng, -2, 2);  // 100 values
    for (const auto& [an_out, u] : {std::pair{dense.forward(constant(ud))->value, ud},
                                    std::pair{conv.forward(constant(uc))->value, uc}}) {
      const auto ref = fixed.forward(constant(u))->value;
      const auto direct = poly_eval(preset, u);
      worst = std::max({worst, (an_out.array() - ref.array()).abs().maxCoeff(),
                        (an_out.array() - direct.array()).abs().maxCoeff()});
    }
  }
  return {worst <= 1e-12, fmt("dense and conv AN vs fixed tanh/sigmoid polynomial: max |diff| %.2e (<= 1e-12)", worst)};
}

template <typename S>
double conv_oracle_error(std::mt19937_64& rng) {
  std::uniform_int_distribution<Index> ch(1, 4), ext(1, 7), kern(0, 2);
  std::uniform_int_distribution<int> order(1, 5);
  ANConfig cfg;
  cfg.order = order(rng);
  cfg.kernel = 2 * kern(rng) + 1;
  cfg.init = ANInit::identity;
  cfg.u_clip = 1.0;
  const Index n = ch(rng), H = ext(rng), W = ext(rng);
  ConvActivationNet<S> an("c", n, cfg, rng);
  const double scale = 1.0 / std::sqrt(double(n * cfg.kernel * cfg.kernel));
  an.weights().value() = oracle::random_tensor<S>(an.weights().value().shape(), rng, -scale, scale);
  an.bias().value() = oracle::random_tensor<S>(an.bias().value().shape(), rng);
  const auto u = oracle::random_tensor<S>({1, n, H, W}, rng, -1.5, 1.5);
  const auto x = an.forward(constant(u))->value;
  const auto ref = oracle::conv_an(u.reshaped({n, H, W}), an.weights().value(), an.bias().value(), cfg.order, 1.0);
  return double((x.array() - ref.array()).abs().maxCoeff());
}

Outcome conv_oracle() {
  std::mt19937_64 rng(30);
  double single = 0, dbl = 0;
  for (int i = 0; i < 20; ++i) {
    single = std::max(single, conv_oracle_error<float>(rng));
    dbl = std::max(dbl, conv_oracle_error<double>(rng));
  }
  return {single <= 1e-6 && dbl <= 1e-12,
          fmt("20 configs each: single %.2e (<= 1e-6), double %.2e (<= 1e-12)", single, dbl)};
}

Outcome taylor_fidelity() {
  Tensor<double> u({20001});
  for (Index i = 0; i < u.size(); ++i) u[i] = -0.5 + double(i) / 20000;
  const auto p = poly_eval(taylor_preset("tanh", 5), u);
  double worst = 0;
  for (Index i = 0; i < u.size(); ++i) worst = std::max(worst, std::abs(p[i] - std::tanh(u[i])));
  return {worst <= 5e-4, fmt("max |poly - tanh| on |u| <= 0.5: %.3e (<= 5e-4)", worst)};
}

struct SeedResult {
  double relu_loss, an_loss, relu_metric, an_metric;
  bool an_diverged;
};

std::vector<SeedResult> compare_seeds(const std::string& preset_name, double& cpu) {
  const double t0 = cpu_seconds();
  DataOptions opts;
  opts.data_dir = mnist_dir();
  const ModelSpec relu = preset(preset_name, ActivationMode::relu, {1, 28, 28});
  const ModelSpec an = preset(preset_name, ActivationMode::activation_net, {1, 28, 28}, desk_an());
  const TrainData data = prepare_data(opts, relu.loss);
  std::vector<SeedResult> out;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RunRecord r = run_training(relu, data, desk_config(seed)).record;
    const RunRecord a = run_training(an, data, desk_config(seed)).record;
    out.push_back({r.final().train_loss, a.final().train_loss, r.test_metric.value_or(std::nan("")),
                   a.test_metric.value_or(std::nan("")), a.diverged});
    std::printf("    seed %d: train loss relu %.4f an %.4f; test %s relu %.4f an %.4f%s\n", int(seed),
                out.back().relu_loss, out.back().an_loss, r.metric_name.c_str(), out.back().relu_metric,
                out.back().an_metric, a.diverged ? " (an diverged)" : "");
    std::fflush(stdout);
  }
  cpu = cpu_seconds() - t0;
  return out;
}

Outcome desk_classification() {
  double cpu = 0;
  int wins = 0;
  for (const auto& s : compare_seeds("mini_lenet", cpu))
    wins += !s.an_diverged && s.an_loss <= s.relu_loss && s.an_metric >= s.relu_metric - 0.01;
  return {wins >= 4 && cpu < 1800, fmt("AN wins %d of 5 seeds (>= 4), %.0f CPU-s (< 1800)", wins, cpu)};
}

Outcome desk_denoising() {
  double cpu = 0;
  int wins = 0;
  for (const auto& s : compare_seeds("mini_unet", cpu)) wins += !s.an_diverged && s.an_metric <= s.relu_metric;
  return {wins >= 4, fmt("AN test MSE <= relu in %d of 5 seeds (>= 4), %.0f CPU-s", wins, cpu)};
}

Outcome noise_calibration() {
  Dataset clean;
  clean.images = Tensor<float>({1, 1, 1000, 1000}, 0.5f);
  clean.labels = {0};
  const Dataset noisy = corrupt_gaussian(clean, {0.05, 7, false});
  long double sum = 0, sq = 0;
  for (Index i = 0; i < noisy.images.size(); ++i) {
    const long double e = static_cast<long double>(noisy.images[i]) - clean.images[i];
    sum += e;
    sq += e * e;
  }
  const long double n = noisy.images.size();
  const double var = double((sq - sum * sum / n) / (n - 1));
  return {std::abs(var - 0.05) <= 0.002, fmt("sample variance over 1e6 draws %.5f (0.05 +- 0.002)", var)};
}

Outcome determinism() {
  const std::string args = "train --preset mini_lenet --variant activation_net --n-train 300 --n-test 100 "
                           "--epochs 2 --lr 0.01 --momentum 0.9 --u-clip 1 --seed 3 --quiet --data-dir " +
                           mnist_dir().string() + " --out ";
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const int ca = cli(args + a.string()), cb = cli(args + b.string());
  const std::string la = slurp(a / "losses.csv"), lb = slurp(b / "losses.csv");
  const bool pass = ca == 0 && cb == 0 && !la.empty() && la == lb;
  return {pass, fmt("exit %d/%d, losses.csv %zu bytes, identical: %s", ca, cb, la.size(), la == lb ? "yes" : "no")};
}

Outcome format_robustness() {
  int roundtrips = 0;
  {
    const fs::path dir = scratch("roundtrip");
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> byte(0, 255), label(0, 9);
    Dataset m;
    m.images = Tensor<float>({6, 1, 28, 28});
    for (auto& v : m.images.values()) v = float(byte(rng)) / 255.0f;
    for (int i = 0; i < 6; ++i) m.labels.push_back(label(rng));
    write_idx(dir / "i", dir / "l", m);
    const Dataset mb = load_idx(dir / "i", dir / "l");
    roundtrips += mb.images == m.images && mb.labels == m.labels;
    Dataset c;
    c.images = Tensor<float>({4, 3, 32, 32});
    for (auto& v : c.images.values()) v = float(byte(rng)) / 255.0f;
    for (int i = 0; i < 4; ++i) c.labels.push_back(label(rng));
    write_cifar10_bin(dir / "c.bin", c);
    const Dataset cb = load_cifar10_bin({dir / "c.bin"});
    roundtrips += cb.images == c.images && cb.labels == c.labels;
  }
  // The valid fixture loads through the CLI; every defect exits with 3.
  const fs::path good = scratch("valid");
  fixture::valid_mnist(good);
  const int ok = cli("train --epochs 0 --n-train 4 --n-test 2 --val-fraction 0 --quiet --data-dir " + good.string() +
                     " --out " + (good / "out").string());
  int rejected = 0;
  std::string codes;
  for (const auto& f : fixture::malformed_fixtures()) {
    const fs::path dir = scratch("bad");
    f.make(dir);
    const int code = cli("train --epochs 0 --n-train 1 --n-test 1 --quiet --dataset " + f.dataset +
                         " --data-dir " + dir.string() + " --out " + (dir / "out").string());
    rejected += code == 3;
    codes += (codes.empty() ? "" : ",") + std::to_string(code);
  }
  return {roundtrips == 2 && ok == 0 && rejected == 6,
          fmt("roundtrips %d/2, valid fixture exit %d, malformed rejected with 3: %d/6 (codes %s)", roundtrips, ok,
              rejected, codes.c_str())};
}

Outcome parameter_accounting() {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> order(1, 8), kern(0, 2), coin(0, 1);
  std::uniform_int_distribution<Index> nodes(1, 12);
  int matched = 0;
  std::string bad;
  for (int i = 0; i < 10; ++i) {
    ANConfig cfg;
    cfg.order = order(rng);
    cfg.kernel = 2 * kern(rng) + 1;
    cfg.mode = coin(rng) ? ANMode::full : ANMode::shared;
    cfg.init = cfg.order >= 5 && coin(rng) ? ANInit::tanh_taylor : ANInit::identity;
    const Index n = nodes(rng);
    const LayerKind kind = coin(rng) ? LayerKind::conv : LayerKind::dense;
    ParameterList<float> ps;
    if (kind == LayerKind::conv)
      ConvActivationNet<float>("c", n, cfg, rng).collect(ps);
    else
      DenseActivationNet<float>("d", n, cfg, rng).collect(ps);
    Index enumerated = 0;
    for (const auto& p : ps) enumerated += p.size();
    if (enumerated == an_parameter_count(cfg, n, kind)) ++matched;
    else bad += fmt(" K=%d n=%ld", cfg.order, long(n));
  }
  return {matched == 10, fmt("%d of 10 random configs match the registry%s", matched, bad.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"gradient integrity", gradient_integrity},
      {"baseline recovery", baseline_recovery},
      {"conv activation net oracle", conv_oracle},
      {"tanh Taylor fidelity", taylor_fidelity},
      {"desk-scale classification", desk_classification},
      {"desk-scale denoising", desk_denoising},
      {"noise calibration", noise_calibration},
      {"determinism", determinism},
      {"format robustness", format_robustness},
      {"parameter accounting", parameter_accounting},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (int i = 1; i <= int(criteria.size()); ++i) selected.push_back(i);

  int failed = 0;
  for (int id : selected) {
    if (id < 1 || id > int(criteria.size())) {
      std::fprintf(stderr, "no criterion %d\n", id);
      return 2;
    }
    const auto& [name, run] = criteria[std::size_t(id - 1)];
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2d %-28s %s  %s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(fs::temp_directory_path() / ("anet_acceptance_" + std::to_string(::getpid())));
  return failed == 0 ? 0 : 1;
}
