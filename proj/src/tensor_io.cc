// Copyright 2026 The semirng Authors.
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

#include "semirng/tensor_io.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include "semirng/errors.h"

namespace semirng {

namespace {

template <class T>
T load_le(std::string_view bytes, std::size_t offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i]))
         << (8 * i);
  }
  return static_cast<T>(v);
}

void store_le(std::string& out, std::uint64_t v, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

}  // namespace

std::uint64_t Tensor::element_count() const {
  std::uint64_t n = 1;
  for (std::uint64_t d : dims) n *= d;
  return n;
}

Tensor decode_tensor(std::string_view bytes, bool allow_nan) {
  constexpr std::size_t kHeader = 16;
  if (bytes.size() < kHeader || bytes.substr(0, 8) != kTensorMagic) {
    throw FormatError("not a SEMIRNG1 tensor file");
  }
  const auto version = load_le<std::uint32_t>(bytes, 8);
  if (version != kTensorVersion) {
    throw FormatError("unsupported tensor version " + std::to_string(version));
  }
  const auto ndim = load_le<std::uint32_t>(bytes, 12);
  if (bytes.size() < kHeader + 8ull * ndim) {
    throw FormatError("tensor header truncated");
  }
  Tensor t;
  std::size_t offset = kHeader;
  unsigned __int128 count = 1;
  for (std::uint32_t i = 0; i < ndim; ++i, offset += 8) {
    t.dims.push_back(load_le<std::uint64_t>(bytes, offset));
    count *= t.dims.back();
    if (count > bytes.size()) throw FormatError("tensor payload truncated");
  }
  const std::size_t payload = bytes.size() - offset;
  if (payload < 8 * static_cast<std::size_t>(count)) {
    throw FormatError("tensor payload truncated");
  }
  if (payload > 8 * static_cast<std::size_t>(count)) {
    throw FormatError("trailing bytes after tensor payload");
  }
  t.data.resize(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < t.data.size(); ++i, offset += 8) {
    t.data[i] = std::bit_cast<double>(load_le<std::uint64_t>(bytes, offset));
    if (!allow_nan && std::isnan(t.data[i])) {
      throw FormatError("NaN at tensor element " + std::to_string(i));
    }
  }
  return t;
}

std::string encode_tensor(const Tensor& tensor) {
  if (tensor.element_count() != tensor.data.size()) {
    throw UsageError("tensor dims do not match its data");
  }
  if (tensor.dims.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw UsageError("too many tensor dimensions");
  }
  std::string out(kTensorMagic);
  store_le(out, kTensorVersion, 4);
  store_le(out, tensor.dims.size(), 4);
  for (std::uint64_t d : tensor.dims) store_le(out, d, 8);
  for (double x : tensor.data) store_le(out, std::bit_cast<std::uint64_t>(x), 8);
  return out;
}

Tensor read_tensor(const std::filesystem::path& path, bool allow_nan) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open tensor file " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return decode_tensor(bytes, allow_nan);
}

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  const std::string bytes = encode_tensor(tensor);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write tensor file " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to " + path.string());
}

}  // namespace semirng
