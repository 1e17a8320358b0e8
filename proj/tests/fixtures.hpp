#pragma once

// Hand-built dataset files, written byte by byte rather than through the
// library's writers.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fixture {

namespace fs = std::filesystem;
using Bytes = std::vector<std::uint8_t>;

inline void put_be32(Bytes& b, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) b.push_back(static_cast<std::uint8_t>(v >> s));
}

inline Bytes idx_images(std::uint32_t n, std::uint32_t h, std::uint32_t w, const Bytes& pixels,
                        std::uint32_t magic = 2051) {
  Bytes b;
  put_be32(b, magic);
  put_be32(b, n);
  put_be32(b, h);
  put_be32(b, w);
  b.insert(b.end(), pixels.begin(), pixels.end());
  return b;
}

inline Bytes idx_labels(std::uint32_t n, const Bytes& labels, std::uint32_t magic = 2049) {
  Bytes b;
  put_be32(b, magic);
  put_be32(b, n);
  b.insert(b.end(), labels.begin(), labels.end());
  return b;
}

inline Bytes cifar_record(std::uint8_t label, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Bytes rec{label};
  for (std::uint8_t v : {r, g, b}) rec.insert(rec.end(), 1024, v);
  return rec;
}

inline void write(const fs::path& path, const Bytes& bytes) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline Bytes ramp(std::size_t n) {
  Bytes b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>(i * 37 % 256);
  return b;
}

// MNIST file names inside `dir`.
inline fs::path train_images(const fs::path& dir) { return dir / "train-images-idx3-ubyte"; }
inline fs::path train_labels(const fs::path& dir) { return dir / "train-labels-idx1-ubyte"; }
inline fs::path test_images(const fs::path& dir) { return dir / "t10k-images-idx3-ubyte"; }
inline fs::path test_labels(const fs::path& dir) { return dir / "t10k-labels-idx1-ubyte"; }

struct Malformed {
  std::string name;
  std::string dataset;  // mnist | cifar10
  // Writes a complete data directory with exactly one defect.
  void (*make)(const fs::path& dir);
};

// A valid 4-image 28 x 28 MNIST directory.
inline void valid_mnist(const fs::path& dir) {
  write(train_images(dir), idx_images(4, 28, 28, ramp(4 * 784)));
  write(train_labels(dir), idx_labels(4, {0, 1, 2, 3}));
  write(test_images(dir), idx_images(2, 28, 28, ramp(2 * 784)));
  write(test_labels(dir), idx_labels(2, {4, 5}));
}

inline std::vector<Malformed> malformed_fixtures() {
  return {
      {"bad magic", "mnist",
       [](const fs::path& d) {
         valid_mnist(d);
         write(train_images(d), idx_images(4, 28, 28, ramp(4 * 784), 2049));
       }},
      {"truncation", "mnist",
       [](const fs::path& d) {
         valid_mnist(d);
         write(train_images(d), idx_images(4, 28, 28, ramp(3 * 784 + 100)));
       }},
      {"count mismatch", "mnist",
       [](const fs::path& d) {
         valid_mnist(d);
         write(train_labels(d), idx_labels(3, {0, 1, 2}));
       }},
      {"oversized label", "mnist",
       [](const fs::path& d) {
         valid_mnist(d);
         write(train_labels(d), idx_labels(4, {0, 1, 12, 3}));
       }},
      {"short record", "cifar10",
       [](const fs::path& d) {
         Bytes b = cifar_record(1, 10, 20, 30);
         const Bytes second = cifar_record(2, 1, 2, 3);
         b.insert(b.end(), second.begin(), second.begin() + 2000);
         write(d / "data_batch_1.bin", b);
         write(d / "test_batch.bin", cifar_record(3, 0, 0, 0));
       }},
      {"empty file", "mnist",
       [](const fs::path& d) {
         valid_mnist(d);
         write(train_labels(d), {});
       }},
  };
}

}  // namespace fixture
