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

#include "semirng/case_file.h"

#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "json.hpp"
#include "semirng/errors.h"
#include "semirng/rnnt.h"
#include "semirng/tensor_io.h"

namespace semirng {

namespace {

using nlohmann::json;

std::size_t get_size(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw UsageError(std::string("case is missing \"") + key + "\"");
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw UsageError(std::string("\"") + key + "\" must be a nonnegative integer");
  }
  return it->get<std::size_t>();
}

double scalar(const json& v, bool allow_nan) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "nan" && allow_nan) return std::numeric_limits<double>::quiet_NaN();
  }
  throw FormatError("tensor entry is not a number: " + v.dump());
}

void flatten(const json& v, bool allow_nan, std::vector<double>& out) {
  if (v.is_array()) {
    for (const json& x : v) flatten(x, allow_nan, out);
  } else {
    out.push_back(scalar(v, allow_nan));
  }
}

std::vector<double> load_values(const json& v, std::size_t expected,
                                const std::filesystem::path& base_dir,
                                bool allow_nan, const char* what) {
  std::vector<double> out;
  if (v.is_string()) {
    out = read_tensor(base_dir / v.get<std::string>(), allow_nan).data;
  } else if (v.is_array()) {
    flatten(v, allow_nan, out);
  } else {
    throw UsageError(std::string("\"") + what +
                     "\" must be a tensor path or nested arrays");
  }
  if (out.size() != expected) {
    throw UsageError(std::string("\"") + what + "\" holds " +
                     std::to_string(out.size()) + " values, expected " +
                     std::to_string(expected));
  }
  return out;
}

}  // namespace

CaseData parse_case(std::string_view json_text,
                    const std::filesystem::path& base_dir, bool allow_nan) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("case file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("case file must hold a JSON object");

  CaseData c;
  const std::string kind = doc.value("kind", "");
  if (kind == "ctc") {
    c.kind = ModelKind::kCtc;
  } else if (kind == "rnnt") {
    c.kind = ModelKind::kRnnt;
  } else {
    throw UsageError("\"kind\" must be \"ctc\" or \"rnnt\"");
  }
  c.frames = get_size(doc, "T");
  if (c.frames == 0) throw UsageError("\"T\" must be at least 1");
  if (doc.contains("normalized")) {
    if (!doc["normalized"].is_boolean()) throw UsageError("\"normalized\" must be a boolean");
    c.normalized = doc["normalized"].get<bool>();
  }

  const bool sliced = c.kind == ModelKind::kRnnt && doc.contains("blank");
  if (doc.contains("labels")) {
    if (!doc["labels"].is_array()) throw UsageError("\"labels\" must be an array");
    for (const json& t : doc["labels"]) {
      if (!t.is_number_integer()) throw UsageError("labels must be integers");
      c.labels.tokens.push_back(t.get<int>());
    }
  } else if (!sliced) {
    throw UsageError("case is missing \"labels\"");
  }
  if (doc.contains("blank_id")) {
    if (!doc["blank_id"].is_number_integer()) throw UsageError("\"blank_id\" must be an integer");
    c.labels.blank_id = doc["blank_id"].get<int>();
  } else if (!sliced) {
    throw UsageError("case is missing \"blank_id\"");
  }
  if (doc.contains("U")) {
    c.label_count = get_size(doc, "U");
    if (doc.contains("labels") && c.label_count != c.labels.tokens.size()) {
      throw UsageError("\"U\" disagrees with the length of \"labels\"");
    }
  } else if (doc.contains("labels")) {
    c.label_count = c.labels.tokens.size();
  } else {
    throw UsageError("case needs \"U\" or \"labels\"");
  }

  const std::size_t T = c.frames, U = c.label_count;
  if (sliced) {
    if (doc.contains("V")) c.vocab = get_size(doc, "V");
    if (!doc.contains("label") && U > 0) throw UsageError("sliced case is missing \"label\"");
    c.blank = load_values(doc["blank"], T * (U + 1), base_dir, allow_nan, "blank");
    c.label = doc.contains("label")
                  ? load_values(doc["label"], (T + 1) * U, base_dir, allow_nan, "label")
                  : std::vector<double>{};
    if (doc.contains("teacher_blank") != doc.contains("teacher_label") && U > 0) {
      throw UsageError("\"teacher_blank\" and \"teacher_label\" go together");
    }
    if (doc.contains("teacher_blank")) {
      c.teacher_blank = load_values(doc["teacher_blank"], T * (U + 1), base_dir,
                                    allow_nan, "teacher_blank");
      c.teacher_label = doc.contains("teacher_label")
                            ? load_values(doc["teacher_label"], (T + 1) * U,
                                          base_dir, allow_nan, "teacher_label")
                            : std::vector<double>{};
    }
    return c;
  }

  c.vocab = get_size(doc, "V");
  if (c.vocab == 0) throw UsageError("\"V\" must be at least 1");
  const std::size_t expected =
      c.kind == ModelKind::kCtc ? T * c.vocab : (T + 1) * (U + 1) * c.vocab;
  if (!doc.contains("logits")) throw UsageError("case is missing \"logits\"");
  c.logits = load_values(doc["logits"], expected, base_dir, allow_nan, "logits");
  if (doc.contains("teacher_logits") && !doc["teacher_logits"].is_null()) {
    c.teacher_logits = load_values(doc["teacher_logits"], expected, base_dir,
                                   allow_nan, "teacher_logits");
  }
  return c;
}

CaseData load_case(const std::filesystem::path& path, bool allow_nan) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open case file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  return parse_case(text, path.parent_path(), allow_nan);
}

AlignmentProblem make_problem(const CaseData& c, bool require_final_blank) {
  if (c.kind == ModelKind::kCtc) {
    if (require_final_blank) throw UsageError("--final-blank applies to RNN-T only");
    const FrameLogProbs student(c.frames, c.vocab, c.logits, c.normalized);
    if (c.teacher_logits) {
      const FrameLogProbs teacher(c.frames, c.vocab, *c.teacher_logits, c.normalized);
      return make_ctc_problem(student, c.labels, &teacher);
    }
    return make_ctc_problem(student, c.labels);
  }
  if (c.blank) {
    const auto student = RnntGridLogProbs::from_slices(
        c.frames, c.label_count, *c.blank, *c.label, c.normalized);
    if (c.teacher_blank) {
      const auto teacher = RnntGridLogProbs::from_slices(
          c.frames, c.label_count, *c.teacher_blank, *c.teacher_label, c.normalized);
      return make_rnnt_problem(student, &teacher, {}, {}, c.vocab, require_final_blank);
    }
    return make_rnnt_problem(student, nullptr, {}, {}, c.vocab, require_final_blank);
  }
  const auto student = RnntGridLogProbs::from_joint(c.logits, c.frames, c.labels,
                                                    c.vocab, c.normalized);
  if (c.teacher_logits) {
    const auto teacher = RnntGridLogProbs::from_joint(
        *c.teacher_logits, c.frames, c.labels, c.vocab, c.normalized);
    return make_rnnt_problem(student, &teacher, c.logits, *c.teacher_logits,
                             c.vocab, require_final_blank);
  }
  return make_rnnt_problem(student, nullptr, c.logits, {}, c.vocab,
                           require_final_blank);
}

}  // namespace semirng
