#include "anet/ops.hpp"

#include <algorithm>
#include <cmath>

namespace anet::ops {

namespace {

template <typename S>
void require_same_shape(const Var<S>& a, const Var<S>& b, const char* op) {
  if (a->shape() != b->shape())
    throw DimensionError(std::string(op) + " shape mismatch: " + to_string(a->shape()) + " vs " +
                         to_string(b->shape()));
}

// Splits a batched shape into (batch, channels, per-channel sites).
struct Layout {
  Index batch, channels, sites;
};

Layout layout_of(const Shape& shape, const char* op) {
  if (shape.size() < 2) throw DimensionError(std::string(op) + " needs a batched tensor, got " + to_string(shape));
  Index sites = 1;
  for (std::size_t i = 2; i < shape.size(); ++i) sites *= shape[i];
  return {shape[0], shape[1], sites};
}

}  // namespace

template <typename S>
Var<S> add(const Var<S>& a, const Var<S>& b) {
  require_same_shape(a, b, "add");
  Tensor<S> out(a->shape(), (a->value.array() + b->value.array()).eval());
  return record("add", std::move(out), {a, b}, [](Node<S>& self) {
    accumulate(self.inputs[0], self.grad);
    accumulate(self.inputs[1], self.grad);
  });
}

template <typename S>
Var<S> sub(const Var<S>& a, const Var<S>& b) {
  require_same_shape(a, b, "sub");
  Tensor<S> out(a->shape(), (a->value.array() - b->value.array()).eval());
  return record("sub", std::move(out), {a, b}, [](Node<S>& self) {
    accumulate(self.inputs[0], self.grad);
    if (self.inputs[1]->requires_grad) self.inputs[1]->grad_buffer().array() -= self.grad.array();
  });
}

template <typename S>
Var<S> mul(const Var<S>& a, const Var<S>& b) {
  require_same_shape(a, b, "mul");
  Tensor<S> out(a->shape(), (a->value.array() * b->value.array()).eval());
  return record("mul", std::move(out), {a, b}, [](Node<S>& self) {
    const auto& x = self.inputs[0];
    const auto& y = self.inputs[1];
    if (x->requires_grad) x->grad_buffer().array() += self.grad.array() * y->value.array();
    if (y->requires_grad) y->grad_buffer().array() += self.grad.array() * x->value.array();
  });
}

template <typename S>
Var<S> scale(const Var<S>& a, S factor) {
  Tensor<S> out(a->shape(), (a->value.array() * factor).eval());
  return record("scale", std::move(out), {a}, [factor](Node<S>& self) {
    self.inputs[0]->grad_buffer().array() += self.grad.array() * factor;
  });
}

template <typename S>
Var<S> scale_by(const Var<S>& a, const Var<S>& c) {
  if (c->value.size() != 1) throw DimensionError("scale_by needs a one-element factor, got " + to_string(c->shape()));
  Tensor<S> out(a->shape(), (a->value.array() * c->value[0]).eval());
  return record("scale_by", std::move(out), {a, c}, [](Node<S>& self) {
    const auto& x = self.inputs[0];
    const auto& f = self.inputs[1];
    if (x->requires_grad) x->grad_buffer().array() += self.grad.array() * f->value[0];
    if (f->requires_grad) f->grad_buffer()[0] += (self.grad.array() * x->value.array()).sum();
  });
}

template <typename S>
Var<S> matmul(const Var<S>& a, const Var<S>& b) {
  Tensor<S> out = anet::matmul(a->value, b->value);
  return record("matmul", std::move(out), {a, b}, [](Node<S>& self) {
    const auto& x = self.inputs[0];
    const auto& y = self.inputs[1];
    const Index m = x->value.dim(0), k = x->value.dim(1), n = y->value.dim(1);
    const auto g = self.grad.matrix(m, n);
    if (x->requires_grad) x->grad_buffer().matrix(m, k).noalias() += g * y->value.matrix(k, n).transpose();
    if (y->requires_grad) y->grad_buffer().matrix(k, n).noalias() += x->value.matrix(m, k).transpose() * g;
  });
}

template <typename S>
Var<S> linear(const Var<S>& x, const Var<S>& weight) {
  if (x->value.rank() != 2) throw DimensionError("linear expects [N, in] input, got " + to_string(x->shape()));
  const Index batch = x->value.dim(0), in = x->value.dim(1);
  if (in == 0 || weight->value.size() % in != 0)
    throw DimensionError("linear width mismatch: input " + to_string(x->shape()) + ", weight " +
                         to_string(weight->shape()));
  const Index rows = weight->value.size() / in;
  if (weight->value.rank() < 1 || weight->value.shape().back() != in)
    throw DimensionError("linear width mismatch: input " + to_string(x->shape()) + ", weight " +
                         to_string(weight->shape()));
  Tensor<S> out({batch, rows});
  out.matrix(batch, rows).noalias() = x->value.matrix(batch, in) * weight->value.matrix(rows, in).transpose();
  return record("linear", std::move(out), {x, weight}, [batch, in, rows](Node<S>& self) {
    const auto& xin = self.inputs[0];
    const auto& w = self.inputs[1];
    const auto g = self.grad.matrix(batch, rows);
    if (xin->requires_grad) xin->grad_buffer().matrix(batch, in).noalias() += g * w->value.matrix(rows, in);
    if (w->requires_grad) w->grad_buffer().matrix(rows, in).noalias() += g.transpose() * xin->value.matrix(batch, in);
  });
}

template <typename S>
Var<S> add_bias(const Var<S>& x, const Var<S>& bias) {
  const Layout l = layout_of(x->shape(), "add_bias");
  if (bias->value.size() != l.channels)
    throw DimensionError("bias " + to_string(bias->shape()) + " for input " + to_string(x->shape()));
  Tensor<S> out = x->value;
  for (Index b = 0; b < l.batch; ++b)
    for (Index c = 0; c < l.channels; ++c) out.array().segment((b * l.channels + c) * l.sites, l.sites) += bias->value[c];
  return record("add_bias", std::move(out), {x, bias}, [l](Node<S>& self) {
    accumulate(self.inputs[0], self.grad);
    const auto& bias_in = self.inputs[1];
    if (!bias_in->requires_grad) return;
    auto& gb = bias_in->grad_buffer();
    for (Index b = 0; b < l.batch; ++b)
      for (Index c = 0; c < l.channels; ++c) gb[c] += self.grad.array().segment((b * l.channels + c) * l.sites, l.sites).sum();
  });
}

template <typename S>
Var<S> conv2d(const Var<S>& x, const Var<S>& kernels, const Var<S>& bias, const ConvGeometry& geom) {
  static const Tensor<S> no_bias;
  Tensor<S> out = anet::conv2d(x->value, kernels->value, bias ? bias->value : no_bias, geom);
  std::vector<Var<S>> inputs{x, kernels};
  if (bias) inputs.push_back(bias);
  return record("conv2d", std::move(out), std::move(inputs), [geom](Node<S>& self) {
    const auto& xin = self.inputs[0];
    const auto& k = self.inputs[1];
    if (xin->requires_grad)
      xin->grad_buffer().array() += conv2d_input_grad(self.grad, k->value, xin->shape(), geom).array();
    if (k->requires_grad)
      k->grad_buffer().array() += conv2d_kernel_grad(self.grad, xin->value, k->shape(), geom).array();
    if (self.inputs.size() > 2 && self.inputs[2]->requires_grad) {
      const Layout l = layout_of(self.grad.shape(), "conv2d");
      auto& gb = self.inputs[2]->grad_buffer();
      for (Index b = 0; b < l.batch; ++b)
        for (Index c = 0; c < l.channels; ++c)
          gb[c] += self.grad.array().segment((b * l.channels + c) * l.sites, l.sites).sum();
    }
  });
}

template <typename S>
Var<S> maxpool2(const Var<S>& x) {
  PoolResult<S> pooled = anet::maxpool2(x->value);
  if (BranchRecorder::active())
    for (Index i : pooled.argmax) BranchRecorder::note(static_cast<std::uint64_t>(i));
  return record("maxpool2", std::move(pooled.output), {x},
                [argmax = std::move(pooled.argmax)](Node<S>& self) {
                  const auto& in = self.inputs[0];
                  auto& g = in->grad_buffer();
                  for (std::size_t i = 0; i < argmax.size(); ++i) g[argmax[i]] += self.grad[static_cast<Index>(i)];
                });
}

template <typename S>
Var<S> upsample2(const Var<S>& x) {
  return record("upsample2", upsample_nearest2(x->value), {x}, [](Node<S>& self) {
    self.inputs[0]->grad_buffer().array() += upsample_nearest2_backward(self.grad).array();
  });
}

template <typename S>
Var<S> concat_channels(const Var<S>& a, const Var<S>& b) {
  const Shape& sa = a->shape();
  const Shape& sb = b->shape();
  if (sa.size() != sb.size() || sa.size() < 2 || sa[0] != sb[0] ||
      !std::equal(sa.begin() + 2, sa.end(), sb.begin() + 2))
    throw DimensionError("concat_channels spatial mismatch: " + to_string(sa) + " vs " + to_string(sb));
  const Layout la = layout_of(sa, "concat_channels");
  const Layout lb = layout_of(sb, "concat_channels");
  Shape shape = sa;
  shape[1] = la.channels + lb.channels;
  Tensor<S> out(shape);
  const Index block_a = la.channels * la.sites, block_b = lb.channels * lb.sites;
  for (Index n = 0; n < la.batch; ++n) {
    out.array().segment(n * (block_a + block_b), block_a) = a->value.array().segment(n * block_a, block_a);
    out.array().segment(n * (block_a + block_b) + block_a, block_b) = b->value.array().segment(n * block_b, block_b);
  }
  return record("concat_channels", std::move(out), {a, b}, [la, block_a, block_b](Node<S>& self) {
    const auto& x = self.inputs[0];
    const auto& y = self.inputs[1];
    for (Index n = 0; n < la.batch; ++n) {
      if (x->requires_grad)
        x->grad_buffer().array().segment(n * block_a, block_a) +=
            self.grad.array().segment(n * (block_a + block_b), block_a);
      if (y->requires_grad)
        y->grad_buffer().array().segment(n * block_b, block_b) +=
            self.grad.array().segment(n * (block_a + block_b) + block_a, block_b);
    }
  });
}

template <typename S>
Var<S> reshape(const Var<S>& x, Shape shape) {
  Tensor<S> out = x->value.reshaped(std::move(shape));
  return record("reshape", std::move(out), {x}, [](Node<S>& self) {
    self.inputs[0]->grad_buffer().array() += self.grad.array();
  });
}

template <typename S>
Var<S> flatten(const Var<S>& x) {
  if (x->value.rank() < 1) throw DimensionError("flatten needs a batch axis");
  const Index batch = x->value.dim(0);
  return reshape(x, {batch, batch == 0 ? 0 : x->value.size() / batch});
}

template <typename S>
Var<S> pow(const Var<S>& x, int k) {
  Tensor<S> out = elementwise_pow(x->value, k);
  return record("pow", std::move(out), {x}, [k](Node<S>& self) {
    const auto& in = self.inputs[0];
    if (k == 0) return;
    const Tensor<S> lower = elementwise_pow(in->value, k - 1);
    in->grad_buffer().array() += self.grad.array() * lower.array() * S(k);
  });
}

template <typename S>
Var<S> relu(const Var<S>& x) {
  Tensor<S> out(x->shape(), x->value.array().max(S(0)).eval());
  note_mask((x->value.array() > S(0)).eval());
  return record("relu", std::move(out), {x}, [](Node<S>& self) {
    const auto& in = self.inputs[0];
    in->grad_buffer().array() += (in->value.array() > S(0)).select(self.grad.array(), S(0));
  });
}

template <typename S>
Var<S> sigmoid(const Var<S>& x) {
  Tensor<S> out(x->shape(), (S(1) / (S(1) + (-x->value.array()).exp())).eval());
  return record("sigmoid", out, {x}, [out](Node<S>& self) {
    self.inputs[0]->grad_buffer().array() += self.grad.array() * out.array() * (S(1) - out.array());
  });
}

template <typename S>
Var<S> clamp(const Var<S>& x, S bound) {
  Tensor<S> out(x->shape(), x->value.array().max(-bound).min(bound).eval());
  note_mask((x->value.array().abs() <= bound).eval());
  return record("clamp", std::move(out), {x}, [bound](Node<S>& self) {
    const auto& in = self.inputs[0];
    in->grad_buffer().array() += (in->value.array().abs() <= bound).select(self.grad.array(), S(0));
  });
}

template <typename S>
Var<S> poly_sites(const Var<S>& coeffs, const Var<S>& u, int order) {
  const Layout l = layout_of(u->shape(), "poly_sites");
  if (order < 0) throw ContractError("polynomial order must be non-negative");
  Shape expected = u->shape();
  expected[1] = (order + 1) * l.channels;
  if (coeffs->shape() != expected)
    throw DimensionError("coefficient tensor " + to_string(coeffs->shape()) + " for sites " + to_string(u->shape()) +
                         " at order " + std::to_string(order));
  const Index terms = order + 1;
  auto coeff_index = [l, terms](Index b, Index k, Index i, Index p) {
    return ((b * terms + k) * l.channels + i) * l.sites + p;
  };
  Tensor<S> out(u->shape());
  for (Index b = 0; b < l.batch; ++b)
    for (Index i = 0; i < l.channels; ++i)
      for (Index p = 0; p < l.sites; ++p) {
        const S x = u->value[(b * l.channels + i) * l.sites + p];
        S acc = coeffs->value[coeff_index(b, order, i, p)];
        for (Index k = order - 1; k >= 0; --k) acc = acc * x + coeffs->value[coeff_index(b, k, i, p)];
        out[(b * l.channels + i) * l.sites + p] = acc;
      }
  return record("poly_sites", std::move(out), {coeffs, u}, [l, order, terms, coeff_index](Node<S>& self) {
    const auto& a = self.inputs[0];
    const auto& uin = self.inputs[1];
    Tensor<S>* ga = a->requires_grad ? &a->grad_buffer() : nullptr;
    Tensor<S>* gu = uin->requires_grad ? &uin->grad_buffer() : nullptr;
    for (Index b = 0; b < l.batch; ++b)
      for (Index i = 0; i < l.channels; ++i)
        for (Index p = 0; p < l.sites; ++p) {
          const Index site = (b * l.channels + i) * l.sites + p;
          const S g = self.grad[site];
          const S x = uin->value[site];
          if (ga) {
            S power = 1;
            for (Index k = 0; k < terms; ++k) {
              (*ga)[coeff_index(b, k, i, p)] += g * power;
              power *= x;
            }
          }
          if (gu && order > 0) {
            S slope = S(order) * a->value[coeff_index(b, order, i, p)];
            for (Index k = order - 1; k >= 1; --k) slope = slope * x + S(k) * a->value[coeff_index(b, k, i, p)];
            (*gu)[site] += g * slope;
          }
        }
  });
}

template <typename S>
Var<S> poly_shared(const Var<S>& coeffs, const Var<S>& u) {
  const Index terms = coeffs->value.size();
  if (terms < 1) throw DimensionError("polynomial needs at least one coefficient");
  Tensor<S> out(u->shape());
  const auto& a = coeffs->value;
  for (Index s = 0; s < u->value.size(); ++s) {
    const S x = u->value[s];
    S acc = a[terms - 1];
    for (Index k = terms - 2; k >= 0; --k) acc = acc * x + a[k];
    out[s] = acc;
  }
  return record("poly_shared", std::move(out), {coeffs, u}, [terms](Node<S>& self) {
    const auto& ain = self.inputs[0];
    const auto& uin = self.inputs[1];
    const auto& a = ain->value;
    Tensor<S>* ga = ain->requires_grad ? &ain->grad_buffer() : nullptr;
    Tensor<S>* gu = uin->requires_grad ? &uin->grad_buffer() : nullptr;
    for (Index s = 0; s < uin->value.size(); ++s) {
      const S g = self.grad[s];
      const S x = uin->value[s];
      if (ga) {
        S power = 1;
        for (Index k = 0; k < terms; ++k) {
          (*ga)[k] += g * power;
          power *= x;
        }
      }
      if (gu && terms > 1) {
        S slope = S(terms - 1) * a[terms - 1];
        for (Index k = terms - 2; k >= 1; --k) slope = slope * x + S(k) * a[k];
        (*gu)[s] += g * slope;
      }
    }
  });
}

template <typename S>
Var<S> box_sum(const Var<S>& x, Index window) {
  // The zero-padded centred window sum is self-adjoint.
  return record("box_sum", anet::box_sum(x->value, window), {x}, [window](Node<S>& self) {
    self.inputs[0]->grad_buffer().array() += anet::box_sum(self.grad, window).array();
  });
}

template <typename S>
Var<S> others_sum(const Var<S>& x) {
  if (x->value.rank() != 2) throw DimensionError("others_sum expects [N, n], got " + to_string(x->shape()));
  const Index batch = x->value.dim(0), n = x->value.dim(1);
  auto apply = [batch, n](const Tensor<S>& in) {
    Tensor<S> out(in.shape());
    auto src = in.matrix(batch, n);
    auto dst = out.matrix(batch, n);
    for (Index b = 0; b < batch; ++b) dst.row(b).array() = src.row(b).sum() - src.row(b).array();
    return out;
  };
  return record("others_sum", apply(x->value), {x}, [apply](Node<S>& self) {
    self.inputs[0]->grad_buffer().array() += apply(self.grad).array();
  });
}

template <typename S>
Var<S> broadcast_nodes(const Var<S>& s, Index nodes) {
  if (s->value.rank() != 2) throw DimensionError("broadcast_nodes expects [N, K+1], got " + to_string(s->shape()));
  const Index batch = s->value.dim(0), terms = s->value.dim(1);
  Tensor<S> out({batch, terms * nodes});
  for (Index b = 0; b < batch; ++b)
    for (Index k = 0; k < terms; ++k) out.array().segment((b * terms + k) * nodes, nodes) = s->value[b * terms + k];
  return record("broadcast_nodes", std::move(out), {s}, [batch, terms, nodes](Node<S>& self) {
    auto& g = self.inputs[0]->grad_buffer();
    for (Index b = 0; b < batch; ++b)
      for (Index k = 0; k < terms; ++k) g[b * terms + k] += self.grad.array().segment((b * terms + k) * nodes, nodes).sum();
  });
}

template <typename S>
Var<S> channel_affine(const Var<S>& u, const Var<S>& p, const Var<S>& q) {
  const Layout l = layout_of(u->shape(), "channel_affine");
  if (p->value.size() != l.channels || q->value.size() != l.channels)
    throw DimensionError("channel_affine parameters do not match " + std::to_string(l.channels) + " channels");
  Tensor<S> out(u->shape());
  for (Index b = 0; b < l.batch; ++b)
    for (Index c = 0; c < l.channels; ++c) {
      const Index off = (b * l.channels + c) * l.sites;
      out.array().segment(off, l.sites) = u->value.array().segment(off, l.sites) * p->value[c] + q->value[c];
    }
  return record("channel_affine", std::move(out), {u, p, q}, [l](Node<S>& self) {
    const auto& uin = self.inputs[0];
    const auto& pin = self.inputs[1];
    const auto& qin = self.inputs[2];
    for (Index b = 0; b < l.batch; ++b)
      for (Index c = 0; c < l.channels; ++c) {
        const Index off = (b * l.channels + c) * l.sites;
        const auto g = self.grad.array().segment(off, l.sites);
        if (uin->requires_grad) uin->grad_buffer().array().segment(off, l.sites) += g * pin->value[c];
        if (pin->requires_grad) pin->grad_buffer()[c] += (g * uin->value.array().segment(off, l.sites)).sum();
        if (qin->requires_grad) qin->grad_buffer()[c] += g.sum();
      }
  });
}

namespace {

template <typename S>
long double accurate_sum(const Tensor<S>& x) {
  long double total = 0;
  for (const S v : x.values()) total += v;
  return total;
}

template <typename S>
Var<S> with_residual(Var<S> node, long double exact) {
  node->residual = static_cast<double>(exact - static_cast<long double>(node->value[0]));
  return node;
}

}  // namespace

template <typename S>
Var<S> sum(const Var<S>& x) {
  const long double exact = accurate_sum(x->value);
  return with_residual(record("sum", Tensor<S>({1}, {static_cast<S>(exact)}), {x},
                              [](Node<S>& self) { self.inputs[0]->grad_buffer().array() += self.grad[0]; }),
                       exact);
}

template <typename S>
Var<S> mean(const Var<S>& x) {
  const Index n = x->value.size();
  if (n == 0) throw ContractError("mean of an empty tensor");
  const long double exact = accurate_sum(x->value) / n;
  return with_residual(record("mean", Tensor<S>({1}, {static_cast<S>(exact)}), {x},
                              [n](Node<S>& self) { self.inputs[0]->grad_buffer().array() += self.grad[0] / S(n); }),
                       exact);
}

template <typename S>
Var<S> softmax_xent(const Var<S>& logits, const std::vector<int>& labels) {
  if (logits->value.rank() != 2) throw DimensionError("softmax_xent expects [N, C], got " + to_string(logits->shape()));
  const Index batch = logits->value.dim(0), classes = logits->value.dim(1);
  if (classes < 2) throw ContractError("softmax_xent needs at least two classes");
  if (static_cast<Index>(labels.size()) != batch)
    throw DimensionError("softmax_xent given " + std::to_string(labels.size()) + " labels for batch " +
                         std::to_string(batch));
  const auto z = logits->value.matrix(batch, classes);
  Tensor<S> probs({batch, classes});
  auto pm = probs.matrix(batch, classes);
  long double total = 0;
  for (Index b = 0; b < batch; ++b) {
    const int label = labels[static_cast<std::size_t>(b)];
    if (label < 0 || label >= classes)
      throw ContractError("label " + std::to_string(label) + " outside [0, " + std::to_string(classes) + ")");
    const S peak = z.row(b).maxCoeff();
    pm.row(b) = (z.row(b).array() - peak).exp().matrix();
    const S norm = pm.row(b).sum();
    pm.row(b) /= norm;
    long double exact_norm = 0;
    for (Index c = 0; c < classes; ++c) exact_norm += std::exp(static_cast<long double>(z(b, c)) - peak);
    total += std::log(exact_norm) - (static_cast<long double>(z(b, label)) - peak);
  }
  total /= batch;
  auto node = record("softmax_xent", Tensor<S>({1}, {static_cast<S>(total)}), {logits},
                [probs = std::move(probs), labels, batch, classes](Node<S>& self) {
                  Tensor<S> delta = probs;
                  auto d = delta.matrix(batch, classes);
                  for (Index b = 0; b < batch; ++b) d(b, labels[static_cast<std::size_t>(b)]) -= S(1);
                  self.inputs[0]->grad_buffer().array() += delta.array() * (self.grad[0] / S(batch));
                });
  return with_residual(std::move(node), total);
}

template <typename S>
Var<S> mse(const Var<S>& pred, const Tensor<S>& target) {
  if (pred->shape() != target.shape())
    throw DimensionError("mse shape mismatch: " + to_string(pred->shape()) + " vs " + to_string(target.shape()));
  const Index n = target.size();
  if (n == 0) throw ContractError("mse of empty tensors");
  Tensor<S> diff(target.shape(), (pred->value.array() - target.array()).eval());
  long double exact = 0;
  for (Index i = 0; i < n; ++i) {
    const long double d = static_cast<long double>(pred->value[i]) - target[i];
    exact += d * d;
  }
  exact /= n;
  auto node = record("mse", Tensor<S>({1}, {static_cast<S>(exact)}), {pred},
                     [diff = std::move(diff), n](Node<S>& self) {
                       self.inputs[0]->grad_buffer().array() += diff.array() * (S(2) * self.grad[0] / S(n));
                     });
  return with_residual(std::move(node), exact);
}

#define ANET_INSTANTIATE(S)                                                              \
  template Var<S> add(const Var<S>&, const Var<S>&);                                     \
  template Var<S> sub(const Var<S>&, const Var<S>&);                                     \
  template Var<S> mul(const Var<S>&, const Var<S>&);                                     \
  template Var<S> scale(const Var<S>&, S);                                               \
  template Var<S> scale_by(const Var<S>&, const Var<S>&);                                \
  template Var<S> matmul(const Var<S>&, const Var<S>&);                                  \
  template Var<S> linear(const Var<S>&, const Var<S>&);                                  \
  template Var<S> add_bias(const Var<S>&, const Var<S>&);                                \
  template Var<S> conv2d(const Var<S>&, const Var<S>&, const Var<S>&, const ConvGeometry&); \
  template Var<S> maxpool2(const Var<S>&);                                               \
  template Var<S> upsample2(const Var<S>&);                                              \
  template Var<S> concat_channels(const Var<S>&, const Var<S>&);                         \
  template Var<S> flatten(const Var<S>&);                                                \
  template Var<S> reshape(const Var<S>&, Shape);                                         \
  template Var<S> pow(const Var<S>&, int);                                               \
  template Var<S> relu(const Var<S>&);                                                   \
  template Var<S> sigmoid(const Var<S>&);                                                \
  template Var<S> clamp(const Var<S>&, S);                                               \
  template Var<S> poly_sites(const Var<S>&, const Var<S>&, int);                         \
  template Var<S> poly_shared(const Var<S>&, const Var<S>&);                             \
  template Var<S> box_sum(const Var<S>&, Index);                                         \
  template Var<S> others_sum(const Var<S>&);                                             \
  template Var<S> broadcast_nodes(const Var<S>&, Index);                                 \
  template Var<S> channel_affine(const Var<S>&, const Var<S>&, const Var<S>&);           \
  template Var<S> sum(const Var<S>&);                                                    \
  template Var<S> mean(const Var<S>&);                                                   \
  template Var<S> softmax_xent(const Var<S>&, const std::vector<int>&);                  \
  template Var<S> mse(const Var<S>&, const Tensor<S>&);

ANET_INSTANTIATE(float)
ANET_INSTANTIATE(double)
#undef ANET_INSTANTIATE

}  // namespace anet::ops
