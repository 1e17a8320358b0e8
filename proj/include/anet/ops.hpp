#pragma once

#include <vector>

#include "anet/autograd.hpp"

// Differentiable operations on recorded Vars. Batched tensors carry the
// batch on axis 0 and features/channels on axis 1.
namespace anet::ops {

template <typename S> Var<S> add(const Var<S>& a, const Var<S>& b);
template <typename S> Var<S> sub(const Var<S>& a, const Var<S>& b);
template <typename S> Var<S> mul(const Var<S>& a, const Var<S>& b);
template <typename S> Var<S> scale(const Var<S>& a, S factor);
// a * c for a one-element Var c.
template <typename S> Var<S> scale_by(const Var<S>& a, const Var<S>& c);

template <typename S> Var<S> matmul(const Var<S>& a, const Var<S>& b);
// x[N, in] times weight^T, where weight holds (rows x in) values in any shape.
template <typename S> Var<S> linear(const Var<S>& x, const Var<S>& weight);
// Adds bias[F] along axis 1 of x[N, F, ...].
template <typename S> Var<S> add_bias(const Var<S>& x, const Var<S>& bias);
// bias may be null.
template <typename S>
Var<S> conv2d(const Var<S>& x, const Var<S>& kernels, const Var<S>& bias, const ConvGeometry& geom);

template <typename S> Var<S> maxpool2(const Var<S>& x);
template <typename S> Var<S> upsample2(const Var<S>& x);
template <typename S> Var<S> concat_channels(const Var<S>& a, const Var<S>& b);
template <typename S> Var<S> flatten(const Var<S>& x);
template <typename S> Var<S> reshape(const Var<S>& x, Shape shape);

template <typename S> Var<S> pow(const Var<S>& x, int k);
template <typename S> Var<S> relu(const Var<S>& x);
template <typename S> Var<S> sigmoid(const Var<S>& x);
// Symmetric clamp to [-bound, bound]; unit gradient inside, zero outside.
template <typename S> Var<S> clamp(const Var<S>& x, S bound);

// Per-site polynomial. u is [N, n, ...]; coeffs is [N, (K+1)*n, ...] with
// channel k*n + i holding the order-k coefficient of site channel i.
template <typename S> Var<S> poly_sites(const Var<S>& coeffs, const Var<S>& u, int order);
// One coefficient vector [K+1] shared by every element of u.
template <typename S> Var<S> poly_shared(const Var<S>& coeffs, const Var<S>& u);

// Zero-padded window sum over the last two axes.
template <typename S> Var<S> box_sum(const Var<S>& x, Index window);
// For x[N, n]: out[b, i] = sum_j x[b, j] - x[b, i].
template <typename S> Var<S> others_sum(const Var<S>& x);
// s[N, K+1] -> [N, (K+1)*n] with out[b, k*n + i] = s[b, k].
template <typename S> Var<S> broadcast_nodes(const Var<S>& s, Index nodes);
// u[N, n, ...] -> u * p[i] + q[i] along axis 1.
template <typename S> Var<S> channel_affine(const Var<S>& u, const Var<S>& p, const Var<S>& q);

template <typename S> Var<S> sum(const Var<S>& x);
template <typename S> Var<S> mean(const Var<S>& x);

// Mean over the batch of -log softmax(logits[b])[labels[b]].
template <typename S> Var<S> softmax_xent(const Var<S>& logits, const std::vector<int>& labels);
// Mean squared difference over all elements.
template <typename S> Var<S> mse(const Var<S>& pred, const Tensor<S>& target);

}  // namespace anet::ops
