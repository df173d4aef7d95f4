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

#include "msocc/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace msocc {
namespace {

constexpr char kMagic[4] = {'M', 'S', 'O', 'C'};

std::size_t dtype_size(DType d) {
  switch (d) {
    case DType::kF32: return 4;
    case DType::kF64: return 8;
    case DType::kU8: return 1;
    case DType::kI32: return 4;
  }
  return 0;
}

// Appends `value` as little-endian bytes.
template <typename T>
void put_le(std::vector<std::byte>& out, T value) {
  std::array<std::byte, sizeof(T)> raw;
  std::memcpy(raw.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  out.insert(out.end(), raw.begin(), raw.end());
}

template <typename T>
T get_le(const std::byte* p) {
  std::array<std::byte, sizeof(T)> raw;
  std::memcpy(raw.data(), p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  T value;
  std::memcpy(&value, raw.data(), sizeof(T));
  return value;
}

template <typename T>
AnyTensor decode_payload(Shape shape, const std::byte* p) {
  std::vector<T> data(element_count(shape));
  if constexpr (std::endian::native == std::endian::little) {
    if (!data.empty()) std::memcpy(data.data(), p, data.size() * sizeof(T));
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = get_le<T>(p + i * sizeof(T));
  }
  return Tensor<T>(std::move(shape), std::move(data));
}

}  // namespace

const char* to_string(TensorIoCode code) {
  switch (code) {
    case TensorIoCode::kOpenFailed: return "open-failed";
    case TensorIoCode::kWriteFailed: return "write-failed";
    case TensorIoCode::kBadMagic: return "bad-magic";
    case TensorIoCode::kUnsupportedVersion: return "unsupported-version";
    case TensorIoCode::kBadDtype: return "bad-dtype";
    case TensorIoCode::kTruncated: return "truncated";
    case TensorIoCode::kDtypeMismatch: return "dtype-mismatch";
  }
  return "unknown";
}

TensorIoError::TensorIoError(TensorIoCode code, const std::string& what)
    : Error(code == TensorIoCode::kDtypeMismatch ? ErrorKind::kValidation : ErrorKind::kIo,
            std::string(to_string(code)) + ": " + what),
      code_(code),
      detail_(what) {}

DType dtype_of(const AnyTensor& t) {
  return std::visit([](const auto& x) { return dtype_of<typename std::decay_t<decltype(x)>::value_type>(); }, t);
}

std::vector<std::byte> encode_tensor(const AnyTensor& any) {
  return std::visit(
      [](const auto& t) {
        using T = typename std::decay_t<decltype(t)>::value_type;
        require(t.rank() <= std::numeric_limits<std::uint8_t>::max(), "tensor rank too large");
        std::vector<std::byte> out;
        out.reserve(8 + 8 * t.rank() + t.size() * sizeof(T));
        for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
        put_le<std::uint16_t>(out, kTensorFormatVersion);
        out.push_back(static_cast<std::byte>(dtype_of<T>()));
        out.push_back(static_cast<std::byte>(t.rank()));
        for (std::size_t d : t.shape()) put_le<std::uint64_t>(out, d);
        for (const T& v : t.values()) put_le<T>(out, v);
        return out;
      },
      any);
}

AnyTensor decode_tensor(std::span<const std::byte> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw TensorIoError(TensorIoCode::kBadMagic, "missing MSOC magic");
  }
  if (bytes.size() < 8) throw TensorIoError(TensorIoCode::kTruncated, "header truncated");
  const auto version = get_le<std::uint16_t>(bytes.data() + 4);
  if (version != kTensorFormatVersion) {
    throw TensorIoError(TensorIoCode::kUnsupportedVersion,
                        "format version " + std::to_string(version) + " (this build reads " +
                            std::to_string(kTensorFormatVersion) + ")");
  }
  const auto code = static_cast<std::uint8_t>(bytes[6]);
  if (code > static_cast<std::uint8_t>(DType::kI32)) {
    throw TensorIoError(TensorIoCode::kBadDtype, "dtype code " + std::to_string(code));
  }
  const auto dtype = static_cast<DType>(code);
  const std::size_t ndim = static_cast<std::uint8_t>(bytes[7]);
  const std::size_t header = 8 + 8 * ndim;
  if (bytes.size() < header) throw TensorIoError(TensorIoCode::kTruncated, "dims truncated");

  Shape shape(ndim);
  std::size_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    shape[i] = get_le<std::uint64_t>(bytes.data() + 8 + 8 * i);
    if (shape[i] != 0 && count > std::numeric_limits<std::size_t>::max() / shape[i]) {
      throw TensorIoError(TensorIoCode::kTruncated, "dims overflow");
    }
    count *= shape[i];
  }
  const std::size_t payload = count * dtype_size(dtype);
  if (bytes.size() - header < payload) {
    throw TensorIoError(TensorIoCode::kTruncated, "payload has " + std::to_string(bytes.size() - header) +
                                                      " bytes, expected " + std::to_string(payload));
  }
  if (bytes.size() - header > payload) {
    throw TensorIoError(TensorIoCode::kTruncated, "trailing bytes after payload");
  }
  const std::byte* p = bytes.data() + header;
  switch (dtype) {
    case DType::kF32: return decode_payload<float>(std::move(shape), p);
    case DType::kF64: return decode_payload<double>(std::move(shape), p);
    case DType::kU8: return decode_payload<std::uint8_t>(std::move(shape), p);
    case DType::kI32: return decode_payload<std::int32_t>(std::move(shape), p);
  }
  throw TensorIoError(TensorIoCode::kBadDtype, "unreachable");
}

void write_tensor(const std::filesystem::path& path, const AnyTensor& t) {
  const auto bytes = encode_tensor(t);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TensorIoError(TensorIoCode::kWriteFailed, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw TensorIoError(TensorIoCode::kWriteFailed, "short write to " + path.string());
}

AnyTensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TensorIoError(TensorIoCode::kOpenFailed, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_tensor(std::as_bytes(std::span<const char>(raw)));
  } catch (const TensorIoError& e) {
    throw TensorIoError(e.code(), path.string() + ": " + e.detail());
  }
}

Tensor<double> read_real_tensor(const std::filesystem::path& path) {
  AnyTensor any = read_tensor(path);
  if (auto* t = std::get_if<Tensor<double>>(&any)) return std::move(*t);
  if (auto* t = std::get_if<Tensor<float>>(&any)) return t->cast<double>();
  throw TensorIoError(TensorIoCode::kDtypeMismatch, path.string() + ": expected an f32 or f64 tensor");
}

void write_f32(const std::filesystem::path& path, const Tensor<double>& t) {
  write_tensor(path, t.cast<float>());
}

}  // namespace msocc
