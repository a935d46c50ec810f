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

// Binary tensor files.
//
//   offset 0   8 bytes   "SEMIRNG1"
//   offset 8   u32 LE    version (1)
//   offset 12  u32 LE    ndim
//   offset 16  u64 LE    dims[ndim]
//   then       f64 LE    row-major payload, prod(dims) values
//
// Nothing may follow the payload.

#ifndef SEMIRNG_TENSOR_IO_H_
#define SEMIRNG_TENSOR_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace semirng {

inline constexpr std::string_view kTensorMagic = "SEMIRNG1";
inline constexpr std::uint32_t kTensorVersion = 1;

struct Tensor {
  std::vector<std::uint64_t> dims;
  std::vector<double> data;

  std::uint64_t element_count() const;
};

// Throws FormatError on a bad header, size mismatch, trailing bytes, or a
// NaN entry when `allow_nan` is false.
Tensor decode_tensor(std::string_view bytes, bool allow_nan = false);
std::string encode_tensor(const Tensor& tensor);

Tensor read_tensor(const std::filesystem::path& path, bool allow_nan = false);
void write_tensor(const std::filesystem::path& path, const Tensor& tensor);

}  // namespace semirng

#endif  // SEMIRNG_TENSOR_IO_H_
