#include <doctest.h>

#include <json.hpp>

#include "anet/activations.hpp"
#include "oracles.hpp"

using namespace anet;

TEST_SUITE("activations") {

TEST_CASE("taylor presets") {
  const auto s = taylor_preset("sigmoid", 5).coeffs;
  const std::vector<double> s_ref{0.5, 0.25, 0, -1.0 / 48, 0, 1.0 / 480};
  CHECK(s == s_ref);
  const auto t = taylor_preset("tanh", 5).coeffs;
  const std::vector<double> t_ref{0, 1, 0, -1.0 / 3, 0, 2.0 / 15};
  CHECK(t == t_ref);
  CHECK(taylor_preset("tanh", 7).coeffs.at(7) == -17.0 / 315);
  CHECK(taylor_preset("tanh", 8).coeffs.size() == 9);
  CHECK(taylor_preset("tanh", 8).coeffs.at(8) == 0.0);
  CHECK_THROWS(taylor_preset("tanh", 4));
  CHECK_THROWS(taylor_preset("gelu", 5));
}

TEST_CASE("poly_eval") {
  std::mt19937_64 rng(1);
  const auto u = oracle::random_tensor<double>({4, 3}, rng, -3, 3);
  CHECK(poly_eval(identity_coeffs(5), u) == u);
  CHECK(poly_eval(taylor_preset("sigmoid", 5), Tensor<double>({1}, {0.0}))[0] == 0.5);
  const double t = poly_eval(taylor_preset("tanh", 5), Tensor<double>({1}, {0.1}))[0];
  CHECK(std::abs(t - 0.0996680) < 5e-8);
  CHECK(std::abs(t - std::tanh(0.1)) <= 17.0 / 315 * std::pow(0.1, 7) * 1.01);
  const auto p7 = poly_eval(taylor_preset("tanh", 7), u);
  for (Index i = 0; i < u.size(); ++i) CHECK(p7[i] == doctest::Approx(oracle::tanh_series(u[i], 7)).epsilon(1e-12));
}

TEST_CASE("tanh preset stays within the remainder bound") {
  // Next nonzero term at |u| = 0.5 is 17/315 * 0.5^7 ~ 4.2e-4.
  for (int i = -500; i <= 500; ++i) {
    const double u = i / 1000.0;
    CHECK(std::abs(taylor_preset("tanh", 5)(u) - std::tanh(u)) < 5e-4);
  }
}

TEST_CASE("presets_json") {
  const auto j = nlohmann::json::parse(presets_json(5));
  CHECK(j["tanh"].get<std::vector<double>>() == taylor_preset("tanh", 5).coeffs);
  CHECK(j["sigmoid"].get<std::vector<double>>() == taylor_preset("sigmoid", 5).coeffs);
}

TEST_CASE("relu") {
  CHECK(relu(Tensor<double>({3}, {-1, 0, 2})) == Tensor<double>({3}, {0, 0, 2}));
  std::mt19937_64 rng(2);
  const auto u = oracle::random_tensor<double>({10}, rng);
  CHECK(relu(relu(u)) == relu(u));
  auto x = make_parameter("x", Tensor<double>({2}, {3, -3}));
  backward(ops::sum(ops::relu(x.var)));
  CHECK(x.grad() == Tensor<double>({2}, {1, 0}));
}

TEST_CASE("fixed polynomial activation") {
  FixedPolyActivation<double> act("p", taylor_preset("tanh", 5));
  ParameterList<double> ps;
  act.collect(ps);
  REQUIRE(ps.size() == 1);
  CHECK(ps[0].name == "p.coeffs");
  std::mt19937_64 rng(3);
  const auto u = oracle::random_tensor<double>({2, 3, 2, 2}, rng);
  const auto x = act.forward(constant(u))->value;
  CHECK((x.array() - poly_eval(taylor_preset("tanh", 5), u).array()).abs().maxCoeff() < 1e-15);
  const auto t = oracle::random_tensor<double>(u.shape(), rng);
  CHECK(gradient_check(ps, [&] { return ops::mse(act.forward(constant(u)), t); }).passed(1e-6));
}

}
