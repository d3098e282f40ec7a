// Copyright (c) 2026 The ctc-interleave Authors. All Rights Reserved.
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

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "ctctts/alignment.h"
#include "ctctts/decoders.h"
#include "ctctts/interleave.h"
#include "ctctts/lexicon.h"
#include "ctctts/streaming.h"

namespace ctctts::io {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Pretty (2-space) unless compact; keys are always sorted.
std::string dump(const json& j, bool compact = false);

// Posteriogram files: a JSON manifest with inline "log_probs" rows or a
// "binary" sidecar (row-major little-endian float32, path relative to the
// manifest), or CSV with a header row of symbols. Rows are renormalized.
Posteriogram load_posteriogram(const std::filesystem::path& path,
                               const std::string& csv_blank = "∅");
Posteriogram posteriogram_from_json(const json& j,
                                    const std::filesystem::path& base_dir = {});
Posteriogram posteriogram_from_csv(const std::string& text, const std::string& blank);
json posteriogram_to_json(const Posteriogram& post);
// Manifest referencing `binary_name`; the bytes go to `binary`.
json posteriogram_to_json_binary(const Posteriogram& post, const std::string& binary_name,
                                 std::string& binary);

json utterance_to_json(const Utterance& utt);
Utterance utterance_from_json(const json& j);

json alignment_to_json(const UtteranceAlignment& alignment, const Alphabet& alphabet);
// Token spans of an alignment file, as a TokenMap.
TokenMap token_map_from_json(const json& j);

// Typed token as {"class", "value"}.
json token_to_json(const Token& tok);
Token token_from_json(const json& j);

std::string sequence_l_to_jsonl(const InterleavedSequenceL& seq, bool compact = true);
std::string sequence_f_to_jsonl(const PairedSequenceF& seq, bool compact = true);
std::vector<Token> sequence_l_from_jsonl(const std::string& text);
std::vector<PairedStep> sequence_f_from_jsonl(const std::string& text);

struct SequenceFile {
  Variant variant = Variant::kL;
  std::vector<Token> tokens;       // L
  std::vector<PairedStep> steps;   // F
};
// Layout is detected from the first record ("pos" vs "step").
SequenceFile sequence_from_jsonl(const std::string& text);

json trace_to_json(const StreamTrace& trace);
StreamTrace trace_from_json(const json& j);

json count_model_to_json(const CountModel& model);
CountModel count_model_from_json(const json& j);

json cost_to_json(const LatencyCostModel& cost);
LatencyCostModel cost_from_json(const json& j);

}  // namespace ctctts::io
