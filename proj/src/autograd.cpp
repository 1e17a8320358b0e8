#include "anet/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <unordered_set>

namespace anet {

namespace {
thread_local bool grad_mode_enabled = true;
}

bool GradMode::enabled() { return grad_mode_enabled; }
void GradMode::set(bool enabled) { grad_mode_enabled = enabled; }

namespace {
thread_local bool branch_active = false;
thread_local std::uint64_t branch_hash = 0;
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
}  // namespace

BranchRecorder::BranchRecorder() : previous_(branch_active), saved_(branch_hash) {
  branch_active = true;
  branch_hash = kFnvOffset;
}

BranchRecorder::~BranchRecorder() {
  branch_active = previous_;
  branch_hash = saved_;
}

bool BranchRecorder::active() { return branch_active; }

void BranchRecorder::note(std::uint64_t value) {
  if (branch_active) branch_hash = (branch_hash ^ value) * kFnvPrime;
}

std::uint64_t BranchRecorder::digest() const { return branch_hash; }

template <typename Scalar>
void backward(const Var<Scalar>& loss) {
  if (!loss) throw ContractError("backward on a null node");
  if (loss->value.size() != 1)
    throw ContractError("backward needs a scalar loss, got shape " + to_string(loss->value.shape()));

  // Iterative post-order DFS gives a topological order.
  std::vector<Node<Scalar>*> order;
  std::unordered_set<Node<Scalar>*> seen;
  std::vector<std::pair<Node<Scalar>*, std::size_t>> stack{{loss.get(), 0}};
  seen.insert(loss.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node<Scalar>* child = node->inputs[next++].get();
      if (child && child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node<Scalar>* node : order)
    if (node->backward) node->grad_buffer().set_zero();
  loss->grad_buffer().array() += Scalar(1);

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<Scalar>* node = *it;
    if (node->backward) node->backward(*node);
  }
}

template void backward(const Var<float>&);
template void backward(const Var<double>&);

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / scale;
}

double GradCheckReport::max_relative_error() const {
  double worst = 0;
  for (const auto& e : entries) {
    if (e.failed_coordinates > 0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, e.max_relative_error);
  }
  return worst;
}

Index GradCheckReport::coordinates_checked() const {
  Index n = 0;
  for (const auto& e : entries) n += e.coordinates_checked;
  return n;
}

Index GradCheckReport::kinked_coordinates() const {
  Index n = 0;
  for (const auto& e : entries) n += e.kinked_coordinates;
  return n;
}

bool GradCheckReport::passed(double tolerance, double max_kinked_fraction) const {
  return max_relative_error() < tolerance &&
         static_cast<double>(kinked_coordinates()) <= max_kinked_fraction * static_cast<double>(coordinates_checked());
}

std::map<std::string, double> GradCheckReport::as_map() const {
  std::map<std::string, double> out;
  for (const auto& e : entries)
    out[e.parameter] = e.failed_coordinates > 0 ? std::numeric_limits<double>::infinity() : e.max_relative_error;
  return out;
}

GradCheckReport gradient_check(ParameterList<double>& params, const std::function<Var<double>()>& loss_fn,
                               const GradCheckOptions& options) {
  GradCheckReport report;
  if (params.empty()) return report;

  zero_grad(params);
  backward(loss_fn());
  std::vector<Tensor<double>> analytic;
  analytic.reserve(params.size());
  for (auto& p : params) analytic.push_back(p.grad());

  NoGradGuard no_grad;
  // Loss at the current parameters, with the residual the reduction kept, and
  // the digest of every branch decision taken on the way.
  auto evaluate = [&](std::uint64_t& branches) {
    BranchRecorder recorder;
    const Var<double> loss = loss_fn();
    branches = recorder.digest();
    return static_cast<long double>(loss->value[0]) + loss->residual;
  };
  std::uint64_t base_branches = 0;
  const long double base = evaluate(base_branches);

  std::mt19937_64 rng(options.seed);
  const double eps = options.epsilon;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto& p = params[pi];
    GradCheckEntry entry;
    entry.parameter = p.name;
    std::vector<Index> coords(static_cast<std::size_t>(p.size()));
    std::iota(coords.begin(), coords.end(), Index{0});
    if (static_cast<Index>(coords.size()) > options.samples_per_parameter) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(static_cast<std::size_t>(options.samples_per_parameter));
      std::sort(coords.begin(), coords.end());
    }
    for (Index c : coords) {
      double& theta = p.value()[c];
      const double saved = theta;
      // Loss at saved + k * eps, or nullopt once the step leaves the base branch.
      auto at = [&](int k) -> std::optional<long double> {
        std::uint64_t branches = 0;
        theta = saved + k * eps;
        const long double value = evaluate(branches);
        theta = saved;
        if (branches != base_branches && std::isfinite(static_cast<double>(value))) return std::nullopt;
        return value;
      };
      ++entry.coordinates_checked;
      const auto plus = at(1), minus = at(-1);
      if ((plus && !std::isfinite(static_cast<double>(*plus))) ||
          (minus && !std::isfinite(static_cast<double>(*minus)))) {
        ++entry.failed_coordinates;
        continue;
      }
      long double numeric = 0;
      if (plus && minus) {
        numeric = (*plus - *minus) / (2 * eps);
      } else {
        // Second-order one-sided stencil on whichever side stays smooth.
        const int dir = plus ? 1 : -1;
        const auto near = plus ? plus : minus;
        const auto far = near ? at(2 * dir) : std::nullopt;
        if (!far || !std::isfinite(static_cast<double>(*far))) {
          ++entry.kinked_coordinates;
          continue;
        }
        numeric = (-3 * base + 4 * *near - *far) / (2 * dir * eps);
        ++entry.one_sided_coordinates;
      }
      entry.max_relative_error =
          std::max(entry.max_relative_error, relative_error(analytic[pi][c], static_cast<double>(numeric)));
    }
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace anet
