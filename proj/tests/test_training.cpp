#include <doctest.h>

#include <sstream>

#include "anet/training.hpp"
#include "oracles.hpp"

using namespace anet;

namespace {

// Two points in the plane, one per class; a bias-free linear classifier
// separates them.
ModelSpec toy_spec() {
  return parse_model_spec(R"(
name = toy
input = 1x1x2
[layer flat]
type = flatten
[layer out]
type = dense
width = 2
)");
}

Dataset toy_data() {
  Dataset d;
  d.images = Tensor<float>({2, 1, 1, 2}, {1.0f, 0.2f, 0.1f, 1.0f});
  d.labels = {0, 1};
  return d;
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("sgd step") {
  auto w = make_parameter("w", Tensor<double>({2}, {1.0, 1.0}));
  ParameterList<double> ps{w};
  Sgd<double> sgd(ps, 0.1);
  w.grad() = Tensor<double>({2}, {0.5, 0.0});
  CHECK(sgd.step());
  CHECK(w.value()[0] == doctest::Approx(0.95));
  CHECK(w.value()[1] == 1.0);
  CHECK(w.grad().array().abs().maxCoeff() == 0.0);
}

TEST_CASE("sgd momentum displacement") {
  auto w = make_parameter("w", Tensor<double>({1}, {0.0}));
  ParameterList<double> ps{w};
  Sgd<double> sgd(ps, 0.1, 0.9);
  for (int i = 0; i < 2; ++i) {
    w.grad()[0] = 0.5;
    sgd.step();
  }
  CHECK(w.value()[0] == doctest::Approx(-0.1 * 0.5 * (1 + 1.9)));
}

TEST_CASE("sgd is linear in the step size") {
  auto a = make_parameter("a", Tensor<double>({3}, {1, -2, 3}));
  auto b = make_parameter("b", Tensor<double>({3}, {1, -2, 3}));
  const Tensor<double> g({3}, {0.25, 0.5, -1});
  ParameterList<double> pa{a}, pb{b};
  Sgd<double> once(pa, 0.2), twice(pb, 0.1);
  a.grad() = g;
  once.step();
  for (int i = 0; i < 2; ++i) {
    b.grad() = g;
    twice.step();
  }
  CHECK((a.value().array() - b.value().array()).abs().maxCoeff() < 1e-15);
}

TEST_CASE("sgd refuses non-finite gradients") {
  auto w = make_parameter("w", Tensor<double>({1}, {1.0}));
  ParameterList<double> ps{w};
  Sgd<double> sgd(ps, 0.1);
  w.grad()[0] = std::nan("");
  CHECK_FALSE(sgd.step());
  CHECK(w.value()[0] == 1.0);
}

TEST_CASE("softmax cross-entropy") {
  const auto uniform = ops::softmax_xent(constant(Tensor<double>({1, 10}, 0.0)), {3});
  CHECK(uniform->value[0] == doctest::Approx(std::log(10.0)).epsilon(1e-12));

  Tensor<double> big({1, 10});
  big[4] = 1000;
  CHECK(ops::softmax_xent(constant(big), {4})->value[0] == doctest::Approx(0.0));

  std::mt19937_64 rng(1);
  auto z = make_parameter("z", oracle::random_tensor<double>({2, 4}, rng));
  backward(ops::softmax_xent(z.var, {1, 3}));
  for (Index b = 0; b < 2; ++b) {
    double norm = 0;
    for (Index c = 0; c < 4; ++c) norm += std::exp(z.value().at(b, c));
    for (Index c = 0; c < 4; ++c) {
      const double expected = (std::exp(z.value().at(b, c)) / norm - (c == (b == 0 ? 1 : 3))) / 2;
      CHECK(z.grad().at(b, c) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(ops::softmax_xent(z.var, {0, 4}), ContractError);
}

TEST_CASE("mse") {
  const Tensor<double> ones({2}, 1.0);
  CHECK(ops::mse(constant(ones), ones)->value[0] == 0.0);
  CHECK(ops::mse(constant(Tensor<double>({2})), ones)->value[0] == 1.0);
  CHECK(ops::mse(constant(Tensor<double>({2}, {0, 2})), ones)->value[0] == 1.0);
  CHECK_THROWS_AS(ops::mse(constant(Tensor<double>({3})), ones), DimensionError);
}

TEST_CASE("zero epochs record the initial evaluation only") {
  Model<float> m(toy_spec(), 0);
  TrainConfig cfg;
  cfg.epochs = 0;
  const RunRecord r = train(m, {toy_data(), {}, {}}, cfg);
  REQUIRE(r.epochs.size() == 1);
  CHECK(r.epochs[0].epoch == 0);
  CHECK(std::isfinite(r.epochs[0].train_loss));
}

TEST_CASE("toy problem converges") {
  Model<double> m(toy_spec(), 3);
  TrainConfig cfg;
  cfg.epochs = 500;
  cfg.batch_size = 2;
  cfg.lr = 0.5;
  const RunRecord r = train(m, {toy_data(), {}, {}}, cfg);
  CHECK_FALSE(r.diverged);
  // Entry k holds the loss before step k, so entry 500 follows 499 steps.
  CHECK(r.final().train_loss < 0.01);
}

TEST_CASE("host and activation parameters move in the same step") {
  ModelSpec spec = toy_spec();
  spec.final_activation = true;
  spec.layers.back().activation = ActivationMode::activation_net;
  spec.an.init = ANInit::tanh_taylor;
  Model<double> m(spec, 1);
  const auto before = m.export_parameters();
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 2;
  train(m, {toy_data(), {}, {}}, cfg);
  const auto after = m.export_parameters();
  for (const auto& [name, value] : before) {
    CAPTURE(name);
    CHECK_FALSE(after.at(name) == value);
  }
}

TEST_CASE("same seed, same trajectory") {
  std::mt19937_64 rng(5);
  Dataset d;
  d.images = oracle::random_tensor<float>({40, 1, 1, 2}, rng, 0, 1);
  for (int i = 0; i < 40; ++i) d.labels.push_back(i % 2);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 8;
  cfg.seed = 11;
  auto run = [&] {
    Model<float> m(toy_spec(), cfg.seed);
    std::ostringstream os;
    write_losses_csv(os, train(m, {d, {}, {}}, cfg));
    return os.str();
  };
  const std::string a = run();
  CHECK(a == run());
  CHECK(a.rfind("epoch,train_loss,val_loss,metric\n0,", 0) == 0);
}

TEST_CASE("divergence is flagged") {
  Model<float> m(toy_spec(), 0);
  Dataset d = toy_data();
  d.images[0] = std::nanf("");
  TrainConfig cfg;
  cfg.epochs = 2;
  const RunRecord r = train(m, {d, {}, {}}, cfg);
  CHECK(r.diverged);
  CHECK_FALSE(r.divergence.empty());
}

TEST_CASE("config validation") {
  TrainConfig cfg;
  cfg.lr = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.momentum = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

}
