#include <doctest.h>

#include "anet/layers.hpp"
#include "oracles.hpp"

using namespace anet;

TEST_SUITE("autograd") {

TEST_CASE("linear and power rules") {
  auto w = make_parameter("w", Tensor<double>({1}, {2.0}));
  backward(ops::scale(w.var, 3.0));
  CHECK(w.grad()[0] == 3.0);

  auto u = make_parameter("u", Tensor<double>({2}, {1, -2}));
  backward(ops::sum(ops::pow(u.var, 2)));
  CHECK(u.grad() == Tensor<double>({2}, {2, -4}));
}

TEST_CASE("leaf gradients accumulate across sweeps") {
  auto w = make_parameter("w", Tensor<double>({1}, {2.0}));
  backward(ops::scale(w.var, 3.0));
  backward(ops::scale(w.var, 3.0));
  CHECK(w.grad()[0] == 6.0);
  ParameterList<double> ps{w};
  zero_grad(ps);
  CHECK(w.grad()[0] == 0.0);
}

TEST_CASE("shared subexpression gets both contributions") {
  auto x = make_parameter("x", Tensor<double>({1}, {3.0}));
  const auto y = ops::mul(x.var, x.var);
  backward(ops::sum(ops::add(y, x.var)));
  CHECK(x.grad()[0] == doctest::Approx(7.0));
}

TEST_CASE("no-grad mode records nothing") {
  auto x = make_parameter("x", Tensor<double>({1}, {3.0}));
  NoGradGuard guard;
  const auto y = ops::mul(x.var, x.var);
  CHECK_FALSE(y->requires_grad);
  CHECK(y->inputs.empty());
  CHECK(y->value[0] == 9.0);
}

TEST_CASE("backward needs a scalar") {
  auto x = make_parameter("x", Tensor<double>({2}, {1, 2}));
  CHECK_THROWS_AS(backward(ops::scale(x.var, 2.0)), ContractError);
}

TEST_CASE("gradient check of linear regression") {
  auto w = make_parameter("w", Tensor<double>({1}, {0.7}));
  const double x = 1.3, y = -0.4;
  ParameterList<double> ps{w};
  const auto report = gradient_check(ps, [&] {
    return ops::mse(ops::scale(w.var, x), Tensor<double>({1}, {y}));
  });
  REQUIRE(report.entries.size() == 1);
  // Closed form: 2x(wx - y).
  zero_grad(ps);
  backward(ops::mse(ops::scale(w.var, x), Tensor<double>({1}, {y})));
  CHECK(w.grad()[0] == doctest::Approx(2 * x * (0.7 * x - y)).epsilon(1e-14));
  CHECK(report.max_relative_error() < 1e-9);
}

TEST_CASE("gradient check of an empty parameter list") {
  ParameterList<double> none;
  const auto report = gradient_check(none, [] { return constant(Tensor<double>({1}, {1.0})); });
  CHECK(report.entries.empty());
  CHECK(report.passed(1e-4));
}

TEST_CASE("dense -> polynomial -> mse against finite differences") {
  std::mt19937_64 rng(2);
  DenseLayer<double> dense("d", 4, 3, true, rng);
  auto coeffs = make_parameter("c", oracle::random_tensor<double>({4}, rng, -0.5, 0.5));
  const auto x = oracle::random_tensor<double>({5, 4}, rng);
  const auto t = oracle::random_tensor<double>({5, 3}, rng);
  ParameterList<double> ps;
  dense.collect(ps);
  ps.push_back(coeffs);
  const auto report = gradient_check(ps, [&] {
    return ops::mse(ops::poly_shared(coeffs.var, dense.forward(constant(x))), t);
  });
  CHECK(report.max_relative_error() < 1e-5);
  CHECK(report.passed(1e-5));
}

TEST_CASE("every op against finite differences") {
  std::mt19937_64 rng(9);
  auto P = [&](const char* name, Shape s) { return make_parameter(name, oracle::random_tensor<double>(s, rng)); };
  auto a = P("a", {2, 3, 4, 4}), b = P("b", {2, 3, 4, 4}), c = P("c", {1}), v = P("v", {2, 6});
  auto w = P("w", {4, 6}), m = P("m", {6, 5}), k = P("k", {2, 3, 3, 3}), kb = P("kb", {2});
  auto p = P("p", {3}), q = P("q", {3}), s = P("s", {2, 3});
  auto coeff = P("coeff", {2, 9, 4, 4});
  const auto t4 = oracle::random_tensor<double>({2, 3, 4, 4}, rng);
  const std::vector<int> labels{1, 3};

  const std::vector<std::pair<const char*, std::function<Var<double>()>>> cases{
      {"add/sub/mul", [&] { return ops::mse(ops::mul(ops::add(a.var, b.var), ops::sub(a.var, b.var)), t4); }},
      {"scale_by", [&] { return ops::mse(ops::scale_by(a.var, c.var), t4); }},
      {"matmul", [&] { return ops::sum(ops::pow(ops::matmul(v.var, m.var), 2)); }},
      {"linear", [&] { return ops::softmax_xent(ops::linear(v.var, w.var), labels); }},
      {"conv2d", [&] { return ops::mean(ops::pow(ops::conv2d(a.var, k.var, kb.var, ConvGeometry::same(3)), 2)); }},
      {"pool/upsample/concat",
       [&] {
         const auto up = ops::upsample2(ops::maxpool2(a.var));
         return ops::mean(ops::pow(ops::concat_channels(up, b.var), 3));
       }},
      {"flatten/reshape", [&] { return ops::softmax_xent(ops::reshape(ops::flatten(s.var), {2, 3}), {0, 2}); }},
      {"sigmoid/channel_affine",
       [&] { return ops::mse(ops::sigmoid(ops::channel_affine(a.var, p.var, q.var)), t4); }},
      {"box_sum", [&] { return ops::mean(ops::pow(ops::box_sum(a.var, 3), 2)); }},
      {"others_sum/broadcast",
       [&] { return ops::mean(ops::pow(ops::broadcast_nodes(ops::others_sum(s.var), 2), 2)); }},
      {"poly_sites", [&] { return ops::mse(ops::poly_sites(coeff.var, ops::clamp(a.var, 0.8), 2), t4); }},
      {"relu", [&] { return ops::mse(ops::relu(ops::add_bias(a.var, p.var)), t4); }},
  };
  for (const auto& [name, fn] : cases) {
    CAPTURE(name);
    ParameterList<double> ps{a, b, c, v, w, m, k, kb, p, q, s, coeff};
    const auto report = gradient_check(ps, fn);
    CHECK(report.max_relative_error() < 1e-6);
    CHECK(report.passed(1e-6));
  }
}

TEST_CASE("kinks fall back to the smooth side") {
  // relu(x) at x = 4e-6 puts x - eps on the other branch; the one-sided
  // stencil on the active side recovers slope 1.
  auto x = make_parameter("x", Tensor<double>({1}, {4e-6}));
  ParameterList<double> ps{x};
  const auto report = gradient_check(ps, [&] { return ops::sum(ops::relu(x.var)); });
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].one_sided_coordinates == 1);
  CHECK(report.max_relative_error() < 1e-9);
}

TEST_CASE("branch recorder") {
  CHECK_FALSE(BranchRecorder::active());
  std::uint64_t d1 = 0, d2 = 0, d3 = 0;
  auto run = [](double shift) {
    BranchRecorder r;
    ops::relu(constant(Tensor<double>({3}, {-1 + shift, 0.5, 2})));
    return r.digest();
  };
  d1 = run(0);
  d2 = run(0.5);
  d3 = run(2);
  CHECK(d1 == d2);
  CHECK(d1 != d3);
  CHECK_FALSE(BranchRecorder::active());
}

TEST_CASE("loss residual keeps the rounding error") {
  // 1 + 1e-17 is 1 in double; the residual holds the remainder.
  const auto s = ops::sum(constant(Tensor<double>({2}, {1.0, 1e-17})));
  CHECK(s->value[0] == 1.0);
  CHECK(s->residual == doctest::Approx(1e-17).epsilon(1e-3));
}

}
