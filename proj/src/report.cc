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

#include "semirng/report.h"

#include <cmath>
#include <cstdio>

namespace semirng {

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

JsonObject& JsonObject::add_raw(std::string_view key, std::string raw) {
  order_.push_back(static_cast<int>(fields_.size()));
  fields_.emplace_back(std::string(key), std::move(raw));
  return *this;
}

JsonObject& JsonObject::add(std::string_view key, double v) {
  return add_raw(key, format_double(v));
}
JsonObject& JsonObject::add(std::string_view key, std::int64_t v) {
  return add_raw(key, std::to_string(v));
}
JsonObject& JsonObject::add(std::string_view key, std::uint64_t v) {
  return add_raw(key, std::to_string(v));
}
JsonObject& JsonObject::add(std::string_view key, bool v) {
  return add_raw(key, v ? "true" : "false");
}
JsonObject& JsonObject::add(std::string_view key, std::string_view v) {
  return add_raw(key, quote(v));
}
JsonObject& JsonObject::add(std::string_view key, std::span<const double> v) {
  std::string raw = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) raw += ", ";
    raw += format_double(v[i]);
  }
  return add_raw(key, raw + "]");
}
JsonObject& JsonObject::add(std::string_view key, const JsonObject& v) {
  order_.push_back(-1 - static_cast<int>(children_.size()));
  children_.emplace_back(std::string(key), v);
  return *this;
}

std::string JsonObject::dump(int indent) const {
  if (order_.empty()) return indent == 0 ? "{}\n" : "{}";
  const std::string pad(2 * (indent + 1), ' ');
  std::string out = "{\n";
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const int k = order_[i];
    out += pad;
    if (k >= 0) {
      out += quote(fields_[k].first) + ": " + fields_[k].second;
    } else {
      const auto& [key, child] = children_[-1 - k];
      out += quote(key) + ": " + child.dump(indent + 1);
    }
    out += i + 1 < order_.size() ? ",\n" : "\n";
  }
  out += std::string(2 * indent, ' ') + "}";
  if (indent == 0) out += "\n";
  return out;
}

JsonObject ops_json(const OpCount& ops) {
  JsonObject o;
  o.add("mul", ops.real_multiplications);
  o.add("add", ops.real_additions);
  o.add("traversals", ops.traversals);
  return o;
}

JsonObject loss_report_json(const LossReport& r) {
  JsonObject o;
  o.add("nll", r.nll);
  if (r.entropy) o.add("entropy", *r.entropy);
  if (r.kl_state) o.add("kl_state", *r.kl_state);
  if (r.kl_seq) o.add("kl_seq", *r.kl_seq);
  if (r.teacher_entropy_term) o.add("teacher_entropy_term", *r.teacher_entropy_term);
  if (r.cross_term) o.add("cross_term", *r.cross_term);
  o.add("total", r.total);
  o.add("ops", ops_json(r.ops));
  return o;
}

}  // namespace semirng
