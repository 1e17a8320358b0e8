#include "anet/tensor.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace anet {

Index numel(const Shape& shape) {
  Index n = 1;
  for (Index extent : shape) {
    if (extent < 0) throw DimensionError("negative extent in shape " + to_string(shape));
    n *= extent;
  }
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

ConvGeometry ConvGeometry::same(Index kernel, Padding mode) {
  if (kernel <= 0 || kernel % 2 == 0)
    throw GeometryError("same padding needs an odd positive kernel, got " + std::to_string(kernel));
  return ConvGeometry{kernel, kernel, 1, (kernel - 1) / 2, mode};
}

void ConvGeometry::validate() const {
  if (kernel_height <= 0 || kernel_width <= 0) throw GeometryError("kernel extents must be positive");
  if (stride <= 0) throw GeometryError("stride must be positive");
  if (padding < 0) throw GeometryError("padding must be non-negative");
}

Index ConvGeometry::output_height(Index in) const {
  Index out = (in + 2 * padding - kernel_height) / stride + 1;
  if (in + 2 * padding < kernel_height || out < 1)
    throw GeometryError("convolution output height would be non-positive for input height " + std::to_string(in));
  return out;
}

Index ConvGeometry::output_width(Index in) const {
  Index out = (in + 2 * padding - kernel_width) / stride + 1;
  if (in + 2 * padding < kernel_width || out < 1)
    throw GeometryError("convolution output width would be non-positive for input width " + std::to_string(in));
  return out;
}

template <typename Scalar>
Tensor<Scalar> matmul(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
    throw DimensionError("matmul shape mismatch: " + to_string(a.shape()) + " x " + to_string(b.shape()));
  Tensor<Scalar> c({a.dim(0), b.dim(1)});
  c.matrix(a.dim(0), b.dim(1)).noalias() = a.matrix(a.dim(0), a.dim(1)) * b.matrix(b.dim(0), b.dim(1));
  return c;
}

namespace {

struct ConvDims {
  Index batch, channels, height, width;
  Index out_channels, out_height, out_width;
  Index patch;  // channels * kh * kw
  bool batched;
};

ConvDims conv_dims(const Shape& input, const Shape& kernels, const ConvGeometry& geom) {
  geom.validate();
  if (input.size() != 3 && input.size() != 4)
    throw DimensionError("conv2d input must be CxHxW or NxCxHxW, got " + to_string(input));
  if (kernels.size() != 4) throw DimensionError("conv2d kernels must be OxCxkhxkw, got " + to_string(kernels));
  const bool batched = input.size() == 4;
  const std::size_t o = batched ? 1 : 0;
  ConvDims d{};
  d.batched = batched;
  d.batch = batched ? input[0] : 1;
  d.channels = input[o];
  d.height = input[o + 1];
  d.width = input[o + 2];
  if (kernels[1] != d.channels)
    throw DimensionError("conv2d channel mismatch: input " + to_string(input) + ", kernels " + to_string(kernels));
  if (kernels[2] != geom.kernel_height || kernels[3] != geom.kernel_width)
    throw GeometryError("kernel tensor " + to_string(kernels) + " disagrees with geometry");
  d.out_channels = kernels[0];
  d.out_height = geom.output_height(d.height);
  d.out_width = geom.output_width(d.width);
  d.patch = d.channels * geom.kernel_height * geom.kernel_width;
  return d;
}

Shape conv_output_shape(const ConvDims& d) {
  if (d.batched) return {d.batch, d.out_channels, d.out_height, d.out_width};
  return {d.out_channels, d.out_height, d.out_width};
}

// Maps an input coordinate to a source index, or -1 for zero padding.
inline Index source_coord(Index pos, Index extent, Padding mode) {
  if (pos >= 0 && pos < extent) return pos;
  if (mode == Padding::zero) return -1;
  return ((pos % extent) + extent) % extent;
}

template <typename Scalar>
void im2col(const Scalar* image, const ConvDims& d, const ConvGeometry& g, RowMatrix<Scalar>& col) {
  const Index cols = d.out_height * d.out_width;
  col.resize(d.patch, cols);
  Index row = 0;
  for (Index c = 0; c < d.channels; ++c) {
    const Scalar* plane = image + c * d.height * d.width;
    for (Index ki = 0; ki < g.kernel_height; ++ki) {
      for (Index kj = 0; kj < g.kernel_width; ++kj, ++row) {
        Scalar* dst = col.row(row).data();
        for (Index oy = 0; oy < d.out_height; ++oy) {
          const Index iy = source_coord(oy * g.stride - g.padding + ki, d.height, g.mode);
          for (Index ox = 0; ox < d.out_width; ++ox) {
            const Index ix = source_coord(ox * g.stride - g.padding + kj, d.width, g.mode);
            dst[oy * d.out_width + ox] = (iy < 0 || ix < 0) ? Scalar(0) : plane[iy * d.width + ix];
          }
        }
      }
    }
  }
}

template <typename Scalar>
void col2im(const RowMatrix<Scalar>& col, const ConvDims& d, const ConvGeometry& g, Scalar* image) {
  Index row = 0;
  for (Index c = 0; c < d.channels; ++c) {
    Scalar* plane = image + c * d.height * d.width;
    for (Index ki = 0; ki < g.kernel_height; ++ki) {
      for (Index kj = 0; kj < g.kernel_width; ++kj, ++row) {
        const Scalar* src = col.row(row).data();
        for (Index oy = 0; oy < d.out_height; ++oy) {
          const Index iy = source_coord(oy * g.stride - g.padding + ki, d.height, g.mode);
          if (iy < 0) continue;
          for (Index ox = 0; ox < d.out_width; ++ox) {
            const Index ix = source_coord(ox * g.stride - g.padding + kj, d.width, g.mode);
            if (ix < 0) continue;
            plane[iy * d.width + ix] += src[oy * d.out_width + ox];
          }
        }
      }
    }
  }
}

}  // namespace

template <typename Scalar>
Tensor<Scalar> conv2d(const Tensor<Scalar>& input, const Tensor<Scalar>& kernels, const Tensor<Scalar>& bias,
                      const ConvGeometry& geom) {
  const ConvDims d = conv_dims(input.shape(), kernels.shape(), geom);
  if (!bias.empty() && bias.size() != d.out_channels)
    throw DimensionError("conv2d bias " + to_string(bias.shape()) + " for " + std::to_string(d.out_channels) +
                         " output channels");
  Tensor<Scalar> out(conv_output_shape(d));
  const auto weights = kernels.matrix(d.out_channels, d.patch);
  const Index plane_in = d.channels * d.height * d.width;
  const Index cols = d.out_height * d.out_width;
  RowMatrix<Scalar> col;
  for (Index n = 0; n < d.batch; ++n) {
    im2col(input.data() + n * plane_in, d, geom, col);
    Eigen::Map<RowMatrix<Scalar>> dst(out.data() + n * d.out_channels * cols, d.out_channels, cols);
    dst.noalias() = weights * col;
    if (!bias.empty())
      for (Index o = 0; o < d.out_channels; ++o) dst.row(o).array() += bias[o];
  }
  return out;
}

template <typename Scalar>
Tensor<Scalar> conv2d_input_grad(const Tensor<Scalar>& grad_out, const Tensor<Scalar>& kernels,
                                 const Shape& input_shape, const ConvGeometry& geom) {
  const ConvDims d = conv_dims(input_shape, kernels.shape(), geom);
  if (grad_out.shape() != conv_output_shape(d))
    throw DimensionError("conv2d gradient " + to_string(grad_out.shape()) + " does not match output shape");
  Tensor<Scalar> grad_in(input_shape);
  const auto weights = kernels.matrix(d.out_channels, d.patch);
  const Index plane_in = d.channels * d.height * d.width;
  const Index cols = d.out_height * d.out_width;
  RowMatrix<Scalar> col(d.patch, cols);
  for (Index n = 0; n < d.batch; ++n) {
    Eigen::Map<const RowMatrix<Scalar>> g(grad_out.data() + n * d.out_channels * cols, d.out_channels, cols);
    col.noalias() = weights.transpose() * g;
    col2im(col, d, geom, grad_in.data() + n * plane_in);
  }
  return grad_in;
}

template <typename Scalar>
Tensor<Scalar> conv2d_kernel_grad(const Tensor<Scalar>& grad_out, const Tensor<Scalar>& input,
                                  const Shape& kernel_shape, const ConvGeometry& geom) {
  const ConvDims d = conv_dims(input.shape(), kernel_shape, geom);
  if (grad_out.shape() != conv_output_shape(d))
    throw DimensionError("conv2d gradient " + to_string(grad_out.shape()) + " does not match output shape");
  Tensor<Scalar> grad_k(kernel_shape);
  auto gk = grad_k.matrix(d.out_channels, d.patch);
  const Index plane_in = d.channels * d.height * d.width;
  const Index cols = d.out_height * d.out_width;
  RowMatrix<Scalar> col;
  for (Index n = 0; n < d.batch; ++n) {
    im2col(input.data() + n * plane_in, d, geom, col);
    Eigen::Map<const RowMatrix<Scalar>> g(grad_out.data() + n * d.out_channels * cols, d.out_channels, cols);
    gk.noalias() += g * col.transpose();
  }
  return grad_k;
}

template <typename Scalar>
Tensor<Scalar> elementwise_pow(const Tensor<Scalar>& t, int k, int k_max) {
  if (k < 0 || k > k_max)
    throw ContractError("power " + std::to_string(k) + " outside [0, " + std::to_string(k_max) + "]");
  Tensor<Scalar> out(t.shape(), Scalar(1));
  for (int i = 0; i < k; ++i) out.array() *= t.array();
  return out;
}

namespace {

struct PlaneDims {
  Index planes, height, width;
};

PlaneDims plane_dims(const Shape& shape, const char* op) {
  if (shape.size() < 2) throw DimensionError(std::string(op) + " needs at least two axes, got " + to_string(shape));
  const Index height = shape[shape.size() - 2];
  const Index width = shape[shape.size() - 1];
  const Index total = numel(shape);
  return {height * width == 0 ? 0 : total / (height * width), height, width};
}

Shape with_spatial(Shape shape, Index height, Index width) {
  shape[shape.size() - 2] = height;
  shape[shape.size() - 1] = width;
  return shape;
}

}  // namespace

template <typename Scalar>
PoolResult<Scalar> maxpool2(const Tensor<Scalar>& input) {
  const PlaneDims p = plane_dims(input.shape(), "maxpool2");
  if (p.height % 2 != 0 || p.width % 2 != 0)
    throw GeometryError("maxpool2 needs even spatial extents, got " + to_string(input.shape()));
  const Index oh = p.height / 2, ow = p.width / 2;
  PoolResult<Scalar> result{Tensor<Scalar>(with_spatial(input.shape(), oh, ow)), {}};
  result.argmax.resize(static_cast<std::size_t>(result.output.size()));
  Index out = 0;
  for (Index plane = 0; plane < p.planes; ++plane) {
    const Index base = plane * p.height * p.width;
    for (Index y = 0; y < oh; ++y) {
      for (Index x = 0; x < ow; ++x, ++out) {
        Index best = base + 2 * y * p.width + 2 * x;
        for (Index dy = 0; dy < 2; ++dy)
          for (Index dx = 0; dx < 2; ++dx) {
            const Index idx = base + (2 * y + dy) * p.width + 2 * x + dx;
            if (input[idx] > input[best]) best = idx;
          }
        result.output[out] = input[best];
        result.argmax[static_cast<std::size_t>(out)] = best;
      }
    }
  }
  return result;
}

template <typename Scalar>
Tensor<Scalar> maxpool2_backward(const Tensor<Scalar>& grad_out, const std::vector<Index>& argmax,
                                 const Shape& input_shape) {
  if (static_cast<Index>(argmax.size()) != grad_out.size())
    throw DimensionError("maxpool2 gradient does not match recorded argmax");
  Tensor<Scalar> grad_in(input_shape);
  for (std::size_t i = 0; i < argmax.size(); ++i) grad_in[argmax[i]] += grad_out[static_cast<Index>(i)];
  return grad_in;
}

template <typename Scalar>
Tensor<Scalar> upsample_nearest2(const Tensor<Scalar>& input) {
  const PlaneDims p = plane_dims(input.shape(), "upsample_nearest2");
  const Index oh = 2 * p.height, ow = 2 * p.width;
  Tensor<Scalar> out(with_spatial(input.shape(), oh, ow));
  for (Index plane = 0; plane < p.planes; ++plane) {
    const Scalar* src = input.data() + plane * p.height * p.width;
    Scalar* dst = out.data() + plane * oh * ow;
    for (Index y = 0; y < oh; ++y)
      for (Index x = 0; x < ow; ++x) dst[y * ow + x] = src[(y / 2) * p.width + x / 2];
  }
  return out;
}

template <typename Scalar>
Tensor<Scalar> upsample_nearest2_backward(const Tensor<Scalar>& grad_out) {
  const PlaneDims p = plane_dims(grad_out.shape(), "upsample_nearest2_backward");
  if (p.height % 2 != 0 || p.width % 2 != 0)
    throw GeometryError("upsample gradient needs even extents, got " + to_string(grad_out.shape()));
  const Index ih = p.height / 2, iw = p.width / 2;
  Tensor<Scalar> grad_in(with_spatial(grad_out.shape(), ih, iw));
  for (Index plane = 0; plane < p.planes; ++plane) {
    const Scalar* src = grad_out.data() + plane * p.height * p.width;
    Scalar* dst = grad_in.data() + plane * ih * iw;
    for (Index y = 0; y < p.height; ++y)
      for (Index x = 0; x < p.width; ++x) dst[(y / 2) * iw + x / 2] += src[y * p.width + x];
  }
  return grad_in;
}

template <typename Scalar>
Tensor<Scalar> box_sum(const Tensor<Scalar>& input, Index window) {
  if (window <= 0 || window % 2 == 0) throw GeometryError("box window must be odd and positive");
  const PlaneDims p = plane_dims(input.shape(), "box_sum");
  const Index r = window / 2;
  Tensor<Scalar> out(input.shape());
  for (Index plane = 0; plane < p.planes; ++plane) {
    const Scalar* src = input.data() + plane * p.height * p.width;
    Scalar* dst = out.data() + plane * p.height * p.width;
    for (Index y = 0; y < p.height; ++y)
      for (Index x = 0; x < p.width; ++x) {
        Scalar acc = 0;
        for (Index yy = std::max<Index>(0, y - r); yy <= std::min(p.height - 1, y + r); ++yy)
          for (Index xx = std::max<Index>(0, x - r); xx <= std::min(p.width - 1, x + r); ++xx)
            acc += src[yy * p.width + xx];
        dst[y * p.width + x] = acc;
      }
  }
  return out;
}

#define ANET_INSTANTIATE(S)                                                                                       \
  template Tensor<S> matmul(const Tensor<S>&, const Tensor<S>&);                                                  \
  template Tensor<S> conv2d(const Tensor<S>&, const Tensor<S>&, const Tensor<S>&, const ConvGeometry&);           \
  template Tensor<S> conv2d_input_grad(const Tensor<S>&, const Tensor<S>&, const Shape&, const ConvGeometry&);    \
  template Tensor<S> conv2d_kernel_grad(const Tensor<S>&, const Tensor<S>&, const Shape&, const ConvGeometry&);   \
  template Tensor<S> elementwise_pow(const Tensor<S>&, int, int);                                                 \
  template PoolResult<S> maxpool2(const Tensor<S>&);                                                              \
  template Tensor<S> maxpool2_backward(const Tensor<S>&, const std::vector<Index>&, const Shape&);                \
  template Tensor<S> upsample_nearest2(const Tensor<S>&);                                                         \
  template Tensor<S> upsample_nearest2_backward(const Tensor<S>&);                                                \
  template Tensor<S> box_sum(const Tensor<S>&, Index);

ANET_INSTANTIATE(float)
ANET_INSTANTIATE(double)
#undef ANET_INSTANTIATE

}  // namespace anet
