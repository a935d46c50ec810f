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

// Deterministic JSON output. Keys keep insertion order; doubles are printed
// with 17 significant digits; non-finite doubles become the strings "inf",
// "-inf" and "nan".

#ifndef SEMIRNG_REPORT_H_
#define SEMIRNG_REPORT_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semirng/engine.h"
#include "semirng/losses.h"

namespace semirng {

std::string format_double(double x);

class JsonObject {
 public:
  JsonObject& add(std::string_view key, double v);
  JsonObject& add(std::string_view key, std::int64_t v);
  JsonObject& add(std::string_view key, std::uint64_t v);
  JsonObject& add(std::string_view key, int v) { return add(key, std::int64_t{v}); }
  JsonObject& add(std::string_view key, bool v);
  JsonObject& add(std::string_view key, std::string_view v);
  JsonObject& add(std::string_view key, const char* v) {
    return add(key, std::string_view(v));
  }
  JsonObject& add(std::string_view key, const JsonObject& v);
  JsonObject& add(std::string_view key, std::span<const double> v);

  bool empty() const { return fields_.empty(); }

  // Two-space indented, newline terminated when `indent` is 0.
  std::string dump(int indent = 0) const;

 private:
  JsonObject& add_raw(std::string_view key, std::string raw);
  std::vector<std::pair<std::string, std::string>> fields_;
  std::vector<std::pair<std::string, JsonObject>> children_;
  std::vector<int> order_;  // >= 0 index into fields_, < 0 into children_
};

JsonObject ops_json(const OpCount& ops);
JsonObject loss_report_json(const LossReport& report);

}  // namespace semirng

#endif  // SEMIRNG_REPORT_H_
