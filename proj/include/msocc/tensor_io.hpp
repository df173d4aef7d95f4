// Copyright 2026 The msocc Authors. All Rights Reserved.
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

#pragma once

// Binary tensor files.
//
//   offset  size       field
//   0       4          magic "MSOC"
//   4       2          format version (u16, currently 1)
//   6       1          dtype: 0 = f32, 1 = f64, 2 = u8, 3 = i32
//   7       1          ndim
//   8       8 * ndim   dims (u64 each)
//   ...                payload, row-major, densely packed
//
// All multi-byte fields are little-endian.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "msocc/error.hpp"
#include "msocc/tensor.hpp"

namespace msocc {

inline constexpr std::uint16_t kTensorFormatVersion = 1;

enum class DType : std::uint8_t { kF32 = 0, kF64 = 1, kU8 = 2, kI32 = 3 };

enum class TensorIoCode {
  kOpenFailed,
  kWriteFailed,
  kBadMagic,
  kUnsupportedVersion,
  kBadDtype,
  kTruncated,
  kDtypeMismatch,
};

const char* to_string(TensorIoCode code);

class TensorIoError : public Error {
 public:
  TensorIoError(TensorIoCode code, const std::string& what);
  TensorIoCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  TensorIoCode code_;
  std::string detail_;
};

using AnyTensor =
    std::variant<Tensor<float>, Tensor<double>, Tensor<std::uint8_t>, Tensor<std::int32_t>>;

template <typename T>
constexpr DType dtype_of();
template <> constexpr DType dtype_of<float>() { return DType::kF32; }
template <> constexpr DType dtype_of<double>() { return DType::kF64; }
template <> constexpr DType dtype_of<std::uint8_t>() { return DType::kU8; }
template <> constexpr DType dtype_of<std::int32_t>() { return DType::kI32; }

DType dtype_of(const AnyTensor& t);

std::vector<std::byte> encode_tensor(const AnyTensor& t);
AnyTensor decode_tensor(std::span<const std::byte> bytes);

void write_tensor(const std::filesystem::path& path, const AnyTensor& t);
AnyTensor read_tensor(const std::filesystem::path& path);

/// Reads a tensor and requires its dtype to be exactly T.
template <typename T>
Tensor<T> read_tensor_as(const std::filesystem::path& path) {
  AnyTensor any = read_tensor(path);
  if (auto* t = std::get_if<Tensor<T>>(&any)) return std::move(*t);
  throw TensorIoError(TensorIoCode::kDtypeMismatch,
                      path.string() + ": unexpected dtype for this input");
}

/// Reads an f32 or f64 tensor as f64.
Tensor<double> read_real_tensor(const std::filesystem::path& path);

/// Writes an f64 tensor narrowed to f32.
void write_f32(const std::filesystem::path& path, const Tensor<double>& t);

}  // namespace msocc
