#include "anet/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>

namespace anet {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kIdxImagesMagic = 2051;
constexpr std::uint32_t kIdxLabelsMagic = 2049;
constexpr int kClasses = 10;

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset, const fs::path& path) {
  if (offset + 4 > bytes.size()) throw FormatError(path.string() + ": truncated header", bytes.size());
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void append_be32(std::vector<std::uint8_t>& bytes, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) bytes.push_back(static_cast<std::uint8_t>(v >> shift));
}

struct IdxArray {
  std::vector<std::uint32_t> dims;
  std::size_t payload_offset;
};

IdxArray parse_idx(const std::vector<std::uint8_t>& bytes, std::uint32_t magic, std::size_t rank,
                   const fs::path& path) {
  if (bytes.empty()) throw FormatError(path.string() + ": empty file", 0);
  const std::uint32_t found = read_be32(bytes, 0, path);
  if (found != magic)
    throw FormatError(path.string() + ": bad magic " + std::to_string(found) + ", expected " + std::to_string(magic),
                      0);
  IdxArray idx{{}, 4 + 4 * rank};
  std::uint64_t payload = 1;
  for (std::size_t d = 0; d < rank; ++d) {
    idx.dims.push_back(read_be32(bytes, 4 + 4 * d, path));
    payload *= idx.dims.back();
  }
  const std::uint64_t expected = idx.payload_offset + payload;
  if (bytes.size() < expected)
    throw FormatError(path.string() + ": truncated payload, expected " + std::to_string(expected) + " bytes, found " +
                          std::to_string(bytes.size()),
                      bytes.size());
  if (bytes.size() > expected) throw FormatError(path.string() + ": trailing bytes after payload", expected);
  return idx;
}

Tensor<float> scale_pixels(const std::uint8_t* src, Shape shape) {
  Tensor<float> t(std::move(shape));
  for (Index i = 0; i < t.size(); ++i) t[i] = static_cast<float>(src[i]) / 255.0f;
  return t;
}

std::uint8_t to_byte(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

}  // namespace

Tensor<float> Dataset::gather_images(std::span<const Index> indices) const {
  const Shape sample = sample_shape();
  const Index stride = numel(sample);
  Shape shape{static_cast<Index>(indices.size())};
  shape.insert(shape.end(), sample.begin(), sample.end());
  Tensor<float> out(shape);
  for (std::size_t i = 0; i < indices.size(); ++i)
    out.array().segment(static_cast<Index>(i) * stride, stride) = images.array().segment(indices[i] * stride, stride);
  return out;
}

Tensor<float> Dataset::gather_targets(std::span<const Index> indices) const {
  if (!has_targets()) return {};
  const Index stride = targets.size() / targets.dim(0);
  Shape shape = targets.shape();
  shape[0] = static_cast<Index>(indices.size());
  Tensor<float> out(shape);
  for (std::size_t i = 0; i < indices.size(); ++i)
    out.array().segment(static_cast<Index>(i) * stride, stride) = targets.array().segment(indices[i] * stride, stride);
  return out;
}

std::vector<int> Dataset::gather_labels(std::span<const Index> indices) const {
  std::vector<int> out;
  if (labels.empty()) return out;
  out.reserve(indices.size());
  for (Index i : indices) out.push_back(labels[static_cast<std::size_t>(i)]);
  return out;
}

Dataset Dataset::select(std::span<const Index> indices) const {
  for (Index i : indices)
    if (i < 0 || i >= size()) throw DimensionError("dataset index " + std::to_string(i) + " out of range");
  return {gather_images(indices), gather_labels(indices), gather_targets(indices)};
}

void Dataset::validate() const {
  if (images.rank() != 4) throw DimensionError("dataset images must be N x C x H x W, got " + to_string(images.shape()));
  if (!labels.empty() && static_cast<Index>(labels.size()) != size())
    throw DimensionError("dataset has " + std::to_string(labels.size()) + " labels for " + std::to_string(size()) +
                         " images");
  if (has_targets() && targets.shape() != images.shape())
    throw DimensionError("denoising targets " + to_string(targets.shape()) + " do not match images");
}

Dataset load_idx(const fs::path& images_path, const fs::path& labels_path) {
  const auto image_bytes = read_bytes(images_path);
  const auto label_bytes = read_bytes(labels_path);
  const IdxArray img = parse_idx(image_bytes, kIdxImagesMagic, 3, images_path);
  const IdxArray lab = parse_idx(label_bytes, kIdxLabelsMagic, 1, labels_path);
  if (img.dims[0] != lab.dims[0])
    throw FormatError("count mismatch: " + images_path.string() + " holds " + std::to_string(img.dims[0]) +
                          " images but " + labels_path.string() + " holds " + std::to_string(lab.dims[0]) + " labels",
                      4);

  Dataset data;
  const Index n = img.dims[0], h = img.dims[1], w = img.dims[2];
  data.images = scale_pixels(image_bytes.data() + img.payload_offset, {n, 1, h, w});
  data.labels.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const std::size_t offset = lab.payload_offset + static_cast<std::size_t>(i);
    if (label_bytes[offset] >= kClasses)
      throw FormatError(labels_path.string() + ": label " + std::to_string(label_bytes[offset]) + " outside 0-9",
                        offset);
    data.labels.push_back(label_bytes[offset]);
  }
  return data;
}

void write_idx(const fs::path& images_path, const fs::path& labels_path, const Dataset& data) {
  data.validate();
  if (data.images.dim(1) != 1) throw DimensionError("IDX images must have one channel");
  if (static_cast<Index>(data.labels.size()) != data.size()) throw DimensionError("IDX export needs one label per image");
  std::vector<std::uint8_t> img;
  append_be32(img, kIdxImagesMagic);
  append_be32(img, static_cast<std::uint32_t>(data.size()));
  append_be32(img, static_cast<std::uint32_t>(data.images.dim(2)));
  append_be32(img, static_cast<std::uint32_t>(data.images.dim(3)));
  for (float v : data.images.values()) img.push_back(to_byte(v));
  std::vector<std::uint8_t> lab;
  append_be32(lab, kIdxLabelsMagic);
  append_be32(lab, static_cast<std::uint32_t>(data.labels.size()));
  for (int l : data.labels) lab.push_back(static_cast<std::uint8_t>(l));
  write_bytes(images_path, img);
  write_bytes(labels_path, lab);
}

Dataset load_cifar10_bin(const std::vector<fs::path>& paths) {
  if (paths.empty()) throw DataError("no CIFAR-10 batch files given");
  std::vector<std::vector<std::uint8_t>> files;
  Index total = 0;
  for (const auto& path : paths) {
    auto bytes = read_bytes(path);
    if (bytes.empty()) throw FormatError(path.string() + ": empty file", 0);
    const std::size_t record = static_cast<std::size_t>(kCifarRecordBytes);
    if (bytes.size() % record != 0)
      throw FormatError(path.string() + ": short record, file length " + std::to_string(bytes.size()) +
                            " is not a multiple of " + std::to_string(record),
                        bytes.size() - bytes.size() % record);
    total += static_cast<Index>(bytes.size() / record);
    files.push_back(std::move(bytes));
  }
  Dataset data;
  data.images = Tensor<float>({total, 3, 32, 32});
  data.labels.reserve(static_cast<std::size_t>(total));
  const Index pixels = kCifarRecordBytes - 1;
  Index row = 0;
  for (std::size_t f = 0; f < files.size(); ++f) {
    const auto& bytes = files[f];
    for (std::size_t off = 0; off < bytes.size(); off += static_cast<std::size_t>(kCifarRecordBytes), ++row) {
      if (bytes[off] >= kClasses)
        throw FormatError(paths[f].string() + ": label " + std::to_string(bytes[off]) + " outside 0-9", off);
      data.labels.push_back(bytes[off]);
      for (Index p = 0; p < pixels; ++p)
        data.images[row * pixels + p] = static_cast<float>(bytes[off + 1 + static_cast<std::size_t>(p)]) / 255.0f;
    }
  }
  return data;
}

void write_cifar10_bin(const fs::path& path, const Dataset& data) {
  data.validate();
  if (data.sample_shape() != Shape{3, 32, 32}) throw DimensionError("CIFAR-10 records are 3 x 32 x 32");
  std::vector<std::uint8_t> bytes;
  const Index pixels = kCifarRecordBytes - 1;
  for (Index i = 0; i < data.size(); ++i) {
    bytes.push_back(static_cast<std::uint8_t>(data.labels.at(static_cast<std::size_t>(i))));
    for (Index p = 0; p < pixels; ++p) bytes.push_back(to_byte(data.images[i * pixels + p]));
  }
  write_bytes(path, bytes);
}

Dataset corrupt_gaussian(const Dataset& clean, const NoiseOptions& options, double* clamped_fraction) {
  if (!(options.variance >= 0)) throw ContractError("noise variance must be non-negative");
  Dataset out{clean.images, clean.labels, clean.images};
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(options.variance));
  Index clamped = 0;
  for (auto& v : out.images.values()) {
    double noisy = static_cast<double>(v) + (options.variance > 0 ? noise(rng) : 0.0);
    if (options.clamp && (noisy < 0.0 || noisy > 1.0)) {
      noisy = std::clamp(noisy, 0.0, 1.0);
      ++clamped;
    }
    v = static_cast<float>(noisy);
  }
  if (clamped_fraction)
    *clamped_fraction = out.images.empty() ? 0.0 : static_cast<double>(clamped) / static_cast<double>(out.images.size());
  return out;
}

std::vector<Index> subset_indices(const Dataset& data, Index n, std::uint64_t seed, SubsetMode mode) {
  const Index total = data.size();
  if (n < 0 || n > total)
    throw ContractError("subset of " + std::to_string(n) + " exceeds population " + std::to_string(total));
  std::vector<Index> picked;
  if (mode == SubsetMode::first_n || n == total || data.labels.empty()) {
    picked.resize(static_cast<std::size_t>(n));
    std::iota(picked.begin(), picked.end(), Index{0});
    return picked;
  }

  std::vector<std::vector<Index>> by_class;
  for (Index i = 0; i < total; ++i) {
    const auto label = static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)]);
    if (label >= by_class.size()) by_class.resize(label + 1);
    by_class[label].push_back(i);
  }
  // Largest-remainder apportionment of n across classes.
  std::vector<Index> quota(by_class.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  Index assigned = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const double exact = static_cast<double>(n) * static_cast<double>(by_class[c].size()) / static_cast<double>(total);
    quota[c] = static_cast<Index>(std::floor(exact));
    assigned += quota[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < n; ++r, ++assigned) ++quota[remainders[r].second];

  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto members = by_class[c];
    std::shuffle(members.begin(), members.end(), rng);
    picked.insert(picked.end(), members.begin(), members.begin() + quota[c]);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

Dataset subset(const Dataset& data, Index n, std::uint64_t seed, SubsetMode mode) {
  return data.select(subset_indices(data, n, seed, mode));
}

Split split_validation(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw ContractError("validation fraction must be in [0, 1)");
  std::vector<Index> order(static_cast<std::size_t>(data.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(order.size())));
  const std::span<const Index> all(order);
  std::vector<Index> train(all.begin(), all.end() - static_cast<std::ptrdiff_t>(n_val));
  std::vector<Index> val(all.end() - static_cast<std::ptrdiff_t>(n_val), all.end());
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  return {data.select(train), data.select(val)};
}

}  // namespace anet
