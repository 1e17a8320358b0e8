#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "anet/errors.hpp"

namespace anet {

using Index = Eigen::Index;
using Shape = std::vector<Index>;

Index numel(const Shape& shape);
std::string to_string(const Shape& shape);

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense row-major n-dimensional array. Image tensors are channels-first
// (C x H x W, or N x C x H x W when batched).
template <typename Scalar>
class Tensor {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using MatrixMap = Eigen::Map<RowMatrix<Scalar>>;
  using ConstMatrixMap = Eigen::Map<const RowMatrix<Scalar>>;

  Tensor() = default;
  explicit Tensor(Shape shape) : shape_(std::move(shape)), data_(Array::Zero(numel(shape_))) {}
  Tensor(Shape shape, Scalar fill) : shape_(std::move(shape)), data_(Array::Constant(numel(shape_), fill)) {}
  Tensor(Shape shape, std::initializer_list<Scalar> values) : shape_(std::move(shape)), data_(numel(shape_)) {
    if (static_cast<Index>(values.size()) != data_.size())
      throw DimensionError("tensor of shape " + to_string(shape_) + " given " + std::to_string(values.size()) +
                           " values");
    std::copy(values.begin(), values.end(), data_.data());
  }
  Tensor(Shape shape, Array data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (numel(shape_) != data_.size())
      throw DimensionError("tensor of shape " + to_string(shape_) + " given " + std::to_string(data_.size()) +
                           " values");
  }

  const Shape& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index dim(Index axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  Index size() const { return data_.size(); }
  bool empty() const { return data_.size() == 0; }

  Array& array() { return data_; }
  const Array& array() const { return data_; }
  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }
  std::span<Scalar> values() { return {data_.data(), static_cast<std::size_t>(data_.size())}; }
  std::span<const Scalar> values() const { return {data_.data(), static_cast<std::size_t>(data_.size())}; }

  Scalar& operator[](Index i) { return data_[i]; }
  Scalar operator[](Index i) const { return data_[i]; }

  template <typename... Idx>
  Scalar& at(Idx... idx) {
    return data_[offset({static_cast<Index>(idx)...})];
  }
  template <typename... Idx>
  Scalar at(Idx... idx) const {
    return data_[offset({static_cast<Index>(idx)...})];
  }

  // Row-major matrix view over the whole buffer.
  MatrixMap matrix(Index rows, Index cols) {
    check_view(rows, cols);
    return MatrixMap(data_.data(), rows, cols);
  }
  ConstMatrixMap matrix(Index rows, Index cols) const {
    check_view(rows, cols);
    return ConstMatrixMap(data_.data(), rows, cols);
  }

  Tensor reshaped(Shape shape) const {
    if (numel(shape) != size())
      throw DimensionError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
    return Tensor(std::move(shape), data_);
  }

  template <typename Other>
  Tensor<Other> cast() const {
    return Tensor<Other>(shape_, data_.template cast<Other>().eval());
  }

  void set_zero() { data_.setZero(); }
  bool all_finite() const { return data_.allFinite(); }

  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && (data_ == other.data_).all();
  }

 private:
  Index offset(std::initializer_list<Index> idx) const {
    if (static_cast<Index>(idx.size()) != rank())
      throw DimensionError("index of rank " + std::to_string(idx.size()) + " into tensor " + to_string(shape_));
    Index linear = 0;
    std::size_t axis = 0;
    for (Index i : idx) {
      if (i < 0 || i >= shape_[axis]) throw DimensionError("index out of range for tensor " + to_string(shape_));
      linear = linear * shape_[axis] + i;
      ++axis;
    }
    return linear;
  }

  void check_view(Index rows, Index cols) const {
    if (rows * cols != size())
      throw DimensionError("matrix view " + std::to_string(rows) + "x" + std::to_string(cols) + " of tensor " +
                           to_string(shape_));
  }

  Shape shape_;
  Array data_;
};

enum class Padding { zero, circular };

struct ConvGeometry {
  Index kernel_height = 1;
  Index kernel_width = 1;
  Index stride = 1;
  Index padding = 0;
  // Circular padding exists for equivariance tests; models use zero padding.
  Padding mode = Padding::zero;

  // "Same" geometry for an odd square kernel: padding (k - 1) / 2, stride 1.
  static ConvGeometry same(Index kernel, Padding mode = Padding::zero);

  Index output_height(Index in) const;
  Index output_width(Index in) const;
  void validate() const;
};

// Fixed upper bound on polynomial powers.
inline constexpr int kMaxPower = 8;

template <typename Scalar>
Tensor<Scalar> matmul(const Tensor<Scalar>& a, const Tensor<Scalar>& b);

// Cross-correlation. input is C x H x W or N x C x H x W; kernels O x C x kh x kw;
// bias has O entries or is empty.
template <typename Scalar>
Tensor<Scalar> conv2d(const Tensor<Scalar>& input, const Tensor<Scalar>& kernels, const Tensor<Scalar>& bias,
                      const ConvGeometry& geom);

// Adjoints of conv2d with respect to its input and its kernels.
template <typename Scalar>
Tensor<Scalar> conv2d_input_grad(const Tensor<Scalar>& grad_out, const Tensor<Scalar>& kernels,
                                 const Shape& input_shape, const ConvGeometry& geom);
template <typename Scalar>
Tensor<Scalar> conv2d_kernel_grad(const Tensor<Scalar>& grad_out, const Tensor<Scalar>& input,
                                  const Shape& kernel_shape, const ConvGeometry& geom);

template <typename Scalar>
Tensor<Scalar> elementwise_pow(const Tensor<Scalar>& t, int k, int k_max = kMaxPower);

template <typename Scalar>
struct PoolResult {
  Tensor<Scalar> output;
  // Linear index into the input of the element selected for each output.
  std::vector<Index> argmax;
};

// 2x2 max pooling with stride 2 over the last two axes (rank 3 or 4).
template <typename Scalar>
PoolResult<Scalar> maxpool2(const Tensor<Scalar>& input);

template <typename Scalar>
Tensor<Scalar> maxpool2_backward(const Tensor<Scalar>& grad_out, const std::vector<Index>& argmax,
                                 const Shape& input_shape);

// Nearest-neighbour 2x upsampling over the last two axes.
template <typename Scalar>
Tensor<Scalar> upsample_nearest2(const Tensor<Scalar>& input);

// Adjoint of upsample_nearest2: sums each 2x2 block.
template <typename Scalar>
Tensor<Scalar> upsample_nearest2_backward(const Tensor<Scalar>& grad_out);

// Zero-padded window sum over the last two axes (odd window, centred).
template <typename Scalar>
Tensor<Scalar> box_sum(const Tensor<Scalar>& input, Index window);

}  // namespace anet
