#include <doctest.h>

#include "anet/layers.hpp"
#include "oracles.hpp"

using namespace anet;

TEST_SUITE("layers") {

TEST_CASE("dense layer") {
  DenseLayer<double> eye(make_parameter("w", Tensor<double>({2, 2}, {1, 0, 0, 1})), std::nullopt);
  const Tensor<double> x({1, 2}, {0.3, -0.7});
  CHECK(eye.forward(constant(x))->value == x);

  DenseLayer<double> zero(make_parameter("w", Tensor<double>({2, 2})),
                          make_parameter("b", Tensor<double>({2}, {1.5, -2})));
  CHECK(zero.forward(constant(x))->value == Tensor<double>({1, 2}, {1.5, -2}));

  DenseLayer<double> m(make_parameter("w", Tensor<double>({2, 2}, {1, 2, 3, 4})), std::nullopt);
  CHECK(m.forward(constant(Tensor<double>({1, 2}, {1, 1})))->value == Tensor<double>({1, 2}, {3, 7}));
  CHECK_THROWS_AS(m.forward(constant(Tensor<double>({1, 3}))), DimensionError);
}

TEST_CASE("dense layer registry") {
  std::mt19937_64 rng(0);
  DenseLayer<float> d("fc", 5, 3, true, rng);
  ParameterList<float> ps;
  d.collect(ps);
  REQUIRE(ps.size() == 2);
  CHECK(ps[0].name == "fc.weight");
  CHECK(ps[1].name == "fc.bias");
  CHECK(parameter_count(ps) == 18);
  // Glorot bound sqrt(6 / 8).
  CHECK(ps[0].value().array().abs().maxCoeff() <= std::sqrt(6.0f / 8.0f));
}

TEST_CASE("conv layer") {
  ConvLayer<double> ident(make_parameter("k", Tensor<double>({1, 1, 1, 1}, {1.0})), std::nullopt,
                          ConvGeometry::same(1));
  std::mt19937_64 rng(4);
  const auto x = oracle::random_tensor<double>({2, 1, 5, 4}, rng);
  CHECK(ident.forward(constant(x))->value == x);

  ConvLayer<double> zero(make_parameter("k", Tensor<double>({2, 1, 3, 3})),
                         make_parameter("b", Tensor<double>({2}, {0.25, -1})), ConvGeometry::same(3));
  const auto z = zero.forward(constant(x))->value;
  for (Index n = 0; n < 2; ++n)
    for (Index i = 0; i < 20; ++i) {
      CHECK(z.at(n, 0, i / 4, i % 4) == 0.25);
      CHECK(z.at(n, 1, i / 4, i % 4) == -1.0);
    }
}

TEST_CASE("conv layer against loops") {
  std::mt19937_64 rng(8);
  ConvLayer<float> conv("c", 3, 2, ConvGeometry::same(3), true, rng);
  const auto x = oracle::random_tensor<float>({1, 3, 6, 5}, rng);
  const auto out = conv.forward(constant(x))->value;
  const auto& b = conv.bias()->value();
  const auto ref = oracle::conv(x.reshaped({3, 6, 5}), conv.kernels().value(),
                                std::vector<float>(b.values().begin(), b.values().end()), 1, 1);
  CHECK((out.array() - ref.array()).abs().maxCoeff() < 1e-6f);
}

TEST_CASE("structural ops") {
  const Tensor<double> t({1, 1, 2, 2}, {1, 2, 3, 4});
  const auto f = ops::flatten(constant(t))->value;
  CHECK(f == Tensor<double>({1, 4}, {1, 2, 3, 4}));

  std::mt19937_64 rng(6);
  const auto a = oracle::random_tensor<double>({2, 2, 3, 3}, rng);
  const auto b = oracle::random_tensor<double>({2, 3, 3, 3}, rng);
  const auto c = ops::concat_channels(constant(a), constant(b))->value;
  CHECK(c.shape() == Shape{2, 5, 3, 3});
  for (Index n = 0; n < 2; ++n)
    for (Index ch = 0; ch < 2; ++ch)
      for (Index i = 0; i < 9; ++i) CHECK(c.at(n, ch, i / 3, i % 3) == a.at(n, ch, i / 3, i % 3));
  CHECK_THROWS_AS(ops::concat_channels(constant(a), constant(Tensor<double>({2, 3, 4, 4}))), DimensionError);
}

TEST_CASE("pool -> upsample -> concat gradient") {
  std::mt19937_64 rng(12);
  ConvLayer<double> conv("c", 1, 2, ConvGeometry::same(3), true, rng);
  const auto x = oracle::random_tensor<double>({2, 1, 4, 4}, rng);
  const auto t = oracle::random_tensor<double>({2, 3, 4, 4}, rng);
  ParameterList<double> ps;
  conv.collect(ps);
  const auto report = gradient_check(ps, [&] {
    const auto u = conv.forward(constant(x));
    return ops::mse(ops::concat_channels(ops::upsample2(ops::maxpool2(u)), constant(x)), t);
  });
  CHECK(report.passed(1e-4));
}

}
