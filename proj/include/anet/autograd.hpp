#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "anet/tensor.hpp"

namespace anet {

// One recorded operation. The backward rule reads `grad` and accumulates
// into the inputs; values it needs beyond the inputs' outputs are captured
// by the closure.
template <typename Scalar>
struct Node {
  std::string op;
  Tensor<Scalar> value;
  Tensor<Scalar> grad;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;
  bool requires_grad = false;
  // Scalar reductions keep the part of their exact value that rounding to
  // Scalar dropped, so finite differences of a loss are not quantised to its ulp.
  double residual = 0;

  // Gradient accumulator, zero-initialised on first use.
  Tensor<Scalar>& grad_buffer() {
    if (grad.shape() != value.shape()) grad = Tensor<Scalar>(value.shape());
    return grad;
  }
  const Shape& shape() const { return value.shape(); }
};

template <typename Scalar>
using Var = std::shared_ptr<Node<Scalar>>;

template <typename Scalar>
Var<Scalar> constant(Tensor<Scalar> value) {
  auto node = std::make_shared<Node<Scalar>>();
  node->op = "constant";
  node->value = std::move(value);
  return node;
}

template <typename Scalar>
Var<Scalar> leaf(Tensor<Scalar> value) {
  auto node = constant(std::move(value));
  node->op = "leaf";
  node->requires_grad = true;
  return node;
}

// Thread-local switch. While disabled, ops compute values only.
class GradMode {
 public:
  static bool enabled();
  static void set(bool enabled);
};

class NoGradGuard {
 public:
  NoGradGuard() : previous_(GradMode::enabled()) { GradMode::set(false); }
  ~NoGradGuard() { GradMode::set(previous_); }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Hash of the branch decisions taken by non-smooth ops (pooling argmax,
// ReLU and clamp masks) while a recorder is alive on this thread. Two
// forward passes with equal digests evaluate the same smooth piece.
class BranchRecorder {
 public:
  BranchRecorder();
  ~BranchRecorder();
  BranchRecorder(const BranchRecorder&) = delete;
  BranchRecorder& operator=(const BranchRecorder&) = delete;

  static bool active();
  static void note(std::uint64_t value);
  std::uint64_t digest() const;

 private:
  bool previous_;
  std::uint64_t saved_;
};

// Folds a boolean mask into the active recorder.
template <typename Mask>
void note_mask(const Mask& mask) {
  if (!BranchRecorder::active()) return;
  std::uint64_t word = 0;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    word = (word << 1) | (mask[i] ? 1u : 0u);
    if (i % 64 == 63) {
      BranchRecorder::note(word);
      word = 0;
    }
  }
  BranchRecorder::note(word);
}

// Builds the output node of an op. The backward rule and input links are
// kept only when gradients are being recorded and some input needs one.
template <typename Scalar, typename Backward>
Var<Scalar> record(const char* op, Tensor<Scalar> value, std::vector<Var<Scalar>> inputs, Backward&& backward) {
  auto node = std::make_shared<Node<Scalar>>();
  node->op = op;
  node->value = std::move(value);
  if (GradMode::enabled()) {
    for (const auto& in : inputs)
      if (in && in->requires_grad) node->requires_grad = true;
    if (node->requires_grad) {
      node->inputs = std::move(inputs);
      node->backward = std::forward<Backward>(backward);
    }
  }
  return node;
}

// Accumulates `delta` into an input's gradient if it takes one.
template <typename Scalar>
void accumulate(const Var<Scalar>& input, const Tensor<Scalar>& delta) {
  if (!input || !input->requires_grad) return;
  input->grad_buffer().array() += delta.array();
}

template <typename Scalar>
struct Parameter {
  std::string name;
  Var<Scalar> var;

  const Tensor<Scalar>& value() const { return var->value; }
  Tensor<Scalar>& value() { return var->value; }
  Tensor<Scalar>& grad() { return var->grad_buffer(); }
  Index size() const { return var->value.size(); }
};

template <typename Scalar>
Parameter<Scalar> make_parameter(std::string name, Tensor<Scalar> value) {
  return {std::move(name), leaf(std::move(value))};
}

template <typename Scalar>
using ParameterList = std::vector<Parameter<Scalar>>;

template <typename Scalar>
void zero_grad(ParameterList<Scalar>& params) {
  for (auto& p : params) p.grad().set_zero();
}

template <typename Scalar>
Index parameter_count(const ParameterList<Scalar>& params) {
  Index n = 0;
  for (const auto& p : params) n += p.size();
  return n;
}

// Reverse-mode sweep from a scalar loss. Leaf gradients accumulate (+=);
// interior gradients are reset first so the same graph can be swept again.
template <typename Scalar>
void backward(const Var<Scalar>& loss);

struct GradCheckOptions {
  double epsilon = 1e-5;
  // Coordinates checked per parameter; tensors at or below this size are
  // checked exhaustively.
  Index samples_per_parameter = 50;
  unsigned long long seed = 0;
};

struct GradCheckEntry {
  std::string parameter;
  Index coordinates_checked = 0;
  Index failed_coordinates = 0;  // non-finite perturbed loss
  // One side of the stencil crossed a kink; compared against the one-sided
  // difference on the other side.
  Index one_sided_coordinates = 0;
  // Both sides crossed a kink; no finite-difference oracle, not compared.
  Index kinked_coordinates = 0;
  double max_relative_error = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;

  double max_relative_error() const;
  Index coordinates_checked() const;
  Index kinked_coordinates() const;
  // Error below tolerance, no failed coordinates, and at most
  // `max_kinked_fraction` of the coordinates left without an oracle.
  bool passed(double tolerance, double max_kinked_fraction = 0.1) const;
  std::map<std::string, double> as_map() const;
};

// Central-difference check of every parameter's gradient. `loss_fn` must
// rebuild the graph from the current parameter values on each call.
// Coordinates whose stencil crosses a branch of a non-smooth op fall back
// to a one-sided difference on the side that stays on the analytic branch.
GradCheckReport gradient_check(ParameterList<double>& params, const std::function<Var<double>()>& loss_fn,
                               const GradCheckOptions& options = {});

double relative_error(double analytic, double numeric);

}  // namespace anet
