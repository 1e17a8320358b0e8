#pragma once

// Independent reference implementations. Plain loops over the textbook
// definitions; nothing here calls into the library's kernels.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "anet/tensor.hpp"

namespace oracle {

using anet::Index;
using anet::Tensor;

template <typename S>
Tensor<S> random_tensor(anet::Shape shape, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  Tensor<S> t(std::move(shape));
  std::uniform_real_distribution<double> d(lo, hi);
  for (auto& v : t.values()) v = static_cast<S>(d(rng));
  return t;
}

// Single-image cross-correlation, input C x H x W, kernels O x C x kh x kw.
// Out-of-range taps read zero, or wrap around when `circular`.
template <typename S>
Tensor<S> conv(const Tensor<S>& x, const Tensor<S>& w, const std::vector<S>& bias, Index stride, Index pad,
               bool circular = false) {
  const Index C = x.dim(0), H = x.dim(1), W = x.dim(2);
  const Index O = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const Index Ho = (H + 2 * pad - kh) / stride + 1, Wo = (W + 2 * pad - kw) / stride + 1;
  Tensor<S> out({O, Ho, Wo});
  for (Index o = 0; o < O; ++o)
    for (Index r = 0; r < Ho; ++r)
      for (Index c = 0; c < Wo; ++c) {
        long double acc = bias.empty() ? 0 : bias[static_cast<std::size_t>(o)];
        for (Index ch = 0; ch < C; ++ch)
          for (Index i = 0; i < kh; ++i)
            for (Index j = 0; j < kw; ++j) {
              Index y = r * stride + i - pad, z = c * stride + j - pad;
              if (circular) {
                y = (y % H + H) % H;
                z = (z % W + W) % W;
              } else if (y < 0 || y >= H || z < 0 || z >= W) {
                continue;
              }
              acc += static_cast<long double>(w.at(o, ch, i, j)) * x.at(ch, y, z);
            }
        out.at(o, r, c) = static_cast<S>(acc);
      }
  return out;
}

inline double tanh_series(double u, int order) {
  const double c[] = {0, 1, 0, -1.0 / 3, 0, 2.0 / 15, 0, -17.0 / 315};
  double s = 0;
  for (int k = 0; k <= std::min(order, 7); ++k) s += c[k] * std::pow(u, k);
  return s;
}

// Per-pixel activation net: for every channel i and pixel (r, c),
//   a_k = sum_j sum_{p,q} V[k*n+i, j, p, q] u_j(r+p-h, c+q-h) + b[k*n+i]
//   x   = sum_k a_k clip(u_i(r, c))^k
// with zero outside the image. u is n x H x W.
template <typename S>
Tensor<S> conv_an(const Tensor<S>& u, const Tensor<S>& V, const Tensor<S>& b, int K, double clip) {
  const Index n = u.dim(0), H = u.dim(1), W = u.dim(2), ks = V.dim(2), h = ks / 2;
  Tensor<S> x(u.shape());
  for (Index i = 0; i < n; ++i)
    for (Index r = 0; r < H; ++r)
      for (Index c = 0; c < W; ++c) {
        const long double ui = std::clamp<long double>(u.at(i, r, c), -clip, clip);
        long double out = 0, power = 1;
        for (int k = 0; k <= K; ++k) {
          long double a = b[k * n + i];
          for (Index j = 0; j < n; ++j)
            for (Index p = 0; p < ks; ++p)
              for (Index q = 0; q < ks; ++q) {
                const Index y = r + p - h, z = c + q - h;
                if (y < 0 || y >= H || z < 0 || z >= W) continue;
                a += static_cast<long double>(V.at(k * n + i, j, p, q)) * u.at(j, y, z);
              }
          out += a * power;
          power *= ui;
        }
        x.at(i, r, c) = static_cast<S>(out);
      }
  return x;
}

// Per-node activation net on one sample u[n]. Full weights are
// [K+1, n, n] (a_ki = sum_j V[k,i,j] u_j + b[k,i]); shared weights are
// [K+1, n] (a_ki = sum_j V[k,j] u_j + b[k,i]).
template <typename S>
std::vector<double> dense_an(const std::vector<double>& u, const Tensor<S>& V, const Tensor<S>& b, int K,
                             bool shared) {
  const Index n = static_cast<Index>(u.size());
  std::vector<double> x(u.size());
  for (Index i = 0; i < n; ++i) {
    long double out = 0;
    for (int k = 0; k <= K; ++k) {
      long double a = b.at(k, i);
      for (Index j = 0; j < n; ++j) a += static_cast<long double>(shared ? V.at(k, j) : V.at(k, i, j)) * u[j];
      out += a * std::pow(static_cast<long double>(u[i]), k);
    }
    x[i] = static_cast<double>(out);
  }
  return x;
}

}  // namespace oracle
