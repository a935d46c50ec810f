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

// JSON case files.
//
//   {
//     "kind": "ctc" | "rnnt",
//     "T": int, "U": int, "V": int,
//     "labels": [int, ...], "blank_id": int,
//     "logits": "file.tensor" | nested arrays,
//     "teacher_logits": optional, same form,
//     "normalized": bool (default true)
//   }
//
// CTC logits are T x V. RNN-T logits are the (T + 1) x (U + 1) x V joint.
// An RNN-T case may instead give pre-sliced "blank" (T x (U + 1)) and
// "label" ((T + 1) x U) grids, with optional "teacher_blank" and
// "teacher_label"; then "V" and "labels" are optional and "normalized" is
// taken on trust. Tensor paths are relative to the case file. Inline
// arrays accept the strings "-inf", "inf" and "nan" for non-finite values.

#ifndef SEMIRNG_CASE_FILE_H_
#define SEMIRNG_CASE_FILE_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "semirng/ctc.h"
#include "semirng/losses.h"

namespace semirng {

struct CaseData {
  ModelKind kind = ModelKind::kCtc;
  std::size_t frames = 0;
  std::size_t label_count = 0;
  std::size_t vocab = 0;
  LabelSequence labels;
  bool normalized = true;
  std::vector<double> logits;
  std::optional<std::vector<double>> teacher_logits;
  // Pre-sliced RNN-T grids; `logits` is empty when these are used.
  std::optional<std::vector<double>> blank, label;
  std::optional<std::vector<double>> teacher_blank, teacher_label;

  bool has_teacher() const {
    return teacher_logits.has_value() || teacher_blank.has_value();
  }
};

// Throws FormatError for malformed JSON or tensors and UsageError for
// schema violations.
CaseData parse_case(std::string_view json_text,
                    const std::filesystem::path& base_dir,
                    bool allow_nan = false);

CaseData load_case(const std::filesystem::path& path, bool allow_nan = false);

// Builds the lattice problem for a case. Normalization of the logits is
// validated here unless the case declares "normalized": false.
AlignmentProblem make_problem(const CaseData& data, bool require_final_blank);

}  // namespace semirng

#endif  // SEMIRNG_CASE_FILE_H_
