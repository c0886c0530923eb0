// Copyright 2026 The bpgrad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bpgrad/idx.hpp"

#include <array>
#include <fstream>

#include <fmt/core.h>

#include "bpgrad/error.hpp"

namespace bpgrad {
namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw Error(ErrorKind::kInvalidInput, fmt::format("{}: truncated IDX header", path));
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kInvalidInput, fmt::format("cannot open {}", path));
  return in;
}

void expect_magic(std::uint32_t got, std::uint32_t want, const std::string& path) {
  if (got != want) {
    throw Error(ErrorKind::kInvalidInput,
                fmt::format("{}: bad IDX magic {:#010x}, expected {:#010x}", path, got, want));
  }
}

std::vector<std::uint8_t> read_payload(std::istream& in, std::size_t n, const std::string& path) {
  std::vector<std::uint8_t> out(n);
  if (n > 0 && !in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(n))) {
    throw Error(ErrorKind::kInvalidInput, fmt::format("{}: truncated IDX payload", path));
  }
  return out;
}

}  // namespace

IdxImages read_idx_images(const std::string& path) {
  auto in = open(path);
  expect_magic(read_be32(in, path), kIdxImageMagic, path);
  IdxImages img;
  img.count = read_be32(in, path);
  img.rows = read_be32(in, path);
  img.cols = read_be32(in, path);
  img.pixels = read_payload(in, std::size_t{img.count} * img.rows * img.cols, path);
  return img;
}

std::vector<std::uint8_t> read_idx_labels(const std::string& path) {
  auto in = open(path);
  expect_magic(read_be32(in, path), kIdxLabelMagic, path);
  const std::uint32_t count = read_be32(in, path);
  return read_payload(in, count, path);
}

Dataset load_idx_dataset(const std::string& images_path, const std::string& labels_path,
                         int class_count, std::size_t limit) {
  const IdxImages img = read_idx_images(images_path);
  const auto labels = read_idx_labels(labels_path);
  if (labels.size() != img.count) {
    throw Error(ErrorKind::kInvalidInput, "image and label counts differ");
  }
  std::size_t n = img.count;
  if (limit > 0 && limit < n) n = limit;
  const std::size_t pixels = std::size_t{img.rows} * img.cols;
  Dataset data;
  data.class_count = class_count;
  data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pixels));
  data.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < pixels; ++p) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) =
          img.pixels[i * pixels + p] / 255.0;
    }
    data.labels.push_back(labels[i]);
  }
  data.validate();
  return data;
}

}  // namespace bpgrad
