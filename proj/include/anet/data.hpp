#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "anet/tensor.hpp"

namespace anet {

// Images in [0, 1], N x C x H x W. Classification sets carry labels;
// denoising sets additionally carry clean targets of the images' shape.
struct Dataset {
  Tensor<float> images;
  std::vector<int> labels;
  Tensor<float> targets;

  Index size() const { return images.rank() == 0 ? 0 : images.dim(0); }
  bool has_targets() const { return !targets.empty(); }
  Shape sample_shape() const { return Shape(images.shape().begin() + 1, images.shape().end()); }

  // Rows in the given order; labels and targets follow.
  Dataset select(std::span<const Index> indices) const;
  Tensor<float> gather_images(std::span<const Index> indices) const;
  Tensor<float> gather_targets(std::span<const Index> indices) const;
  std::vector<int> gather_labels(std::span<const Index> indices) const;
  void validate() const;
};

// MNIST IDX pair: images magic 2051 (u8, N x H x W), labels magic 2049.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);
void write_idx(const std::filesystem::path& images, const std::filesystem::path& labels, const Dataset& data);

// CIFAR-10 binary: records of 1 label byte + 3072 pixel bytes (R, G, B
// planes of 32 x 32). Multiple files are concatenated in order.
inline constexpr Index kCifarRecordBytes = 1 + 3 * 32 * 32;
Dataset load_cifar10_bin(const std::vector<std::filesystem::path>& paths);
void write_cifar10_bin(const std::filesystem::path& path, const Dataset& data);

struct NoiseOptions {
  double variance = 0.05;
  std::uint64_t seed = 0;
  bool clamp = true;
};

// images <- clean + N(0, variance) per pixel (clamped to [0, 1] unless
// disabled), targets <- clean. `clamped_fraction` reports the share of
// pixels the clamp touched.
Dataset corrupt_gaussian(const Dataset& clean, const NoiseOptions& options, double* clamped_fraction = nullptr);

enum class SubsetMode { stratified, first_n };

// Stratified: per-class shares proportional to the population (largest
// remainder), seeded draw, original order kept. n == size returns all rows.
std::vector<Index> subset_indices(const Dataset& data, Index n, std::uint64_t seed, SubsetMode mode);
Dataset subset(const Dataset& data, Index n, std::uint64_t seed, SubsetMode mode);

struct Split {
  Dataset train;
  Dataset validation;
};

// Seeded shuffle, then the last round(fraction * N) rows become validation.
Split split_validation(const Dataset& data, double fraction, std::uint64_t seed);

}  // namespace anet
