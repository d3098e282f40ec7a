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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctctts/error.h"
#include "ctctts/interleave.h"

namespace ctctts {

enum class Variant { kL, kF };

std::string_view to_string(Variant v);
// Accepts "l" / "f" (case-insensitive). Throws InvalidConfig.
Variant parse_variant(std::string_view s);

// Autoregressive predictor behind both engines. Each call returns the
// output for the last position of `context`: a speech token or eob.
class Decoder {
 public:
  virtual ~Decoder() = default;
  // Length-wise layout: context is every token placed so far.
  virtual Token next_l(std::span<const Token> context) = 0;
  // Feature-paired layout: context is every (speech_in, text_in) input so
  // far, including the one being answered.
  virtual Token next_f(std::span<const PairedStep> context) = 0;
};

struct LatencyCostModel {
  double per_step_ms = 10.0;
  double codec_chunk_ms = 50.0;
  int chunk_size = 1;

  // Throws InvalidConfig unless every field is positive.
  void validate() const;
};

// Words and separators as the engines consume them.
struct StreamText {
  std::vector<std::vector<std::string>> word_phonemes;
  std::vector<Separator> separators;
  int ratio = kDefaultRatio;

  static StreamText from_utterance(const Utterance& utt);
  // Recovers the text side of a block list (speech is ignored).
  static StreamText from_blocks(const std::vector<Block>& blocks,
                                int ratio = kDefaultRatio);
  // Text as an unambiguous key, used to check traces share an utterance.
  std::string key() const;
};

// Pre-aligned prompt replayed as forced context before generation.
struct PromptPrefix {
  std::vector<Block> blocks;
};

enum class StepPhase { kPrompt, kForced, kGenerated };

std::string_view to_string(StepPhase phase);

struct TraceStep {
  int index = 0;
  StepPhase phase = StepPhase::kForced;
  // L: the token placed at this position. F: {speech_in, text_in}.
  std::vector<Token> fed;
  // Decoder output (or the forced prompt target in F).
  std::optional<Token> emitted;
  // Set on the step that completes a chunk.
  std::optional<int> chunk;
};

struct StreamTrace {
  Variant variant = Variant::kL;
  std::vector<TraceStep> steps;
  int prompt_steps = 0;
  // Steps after the prompt up to and including the one completing the
  // first chunk.
  int fpl_steps = 0;
  double fpl_sim_ms = 0.0;
  std::vector<std::vector<int>> chunks;
  std::vector<int> per_block_token_counts;
  std::string utterance_key;

  // Generated speech tokens in order.
  std::vector<int> output_stream() const;
  // F inputs in step order (prompt included).
  std::vector<PairedStep> paired_steps() const;
  // L tokens in position order (prompt included).
  std::vector<Token> sequence() const;
};

// Generation guard: 4 * ratio * |phonemes| + 8 tokens per block.
int default_block_cap(int ratio, std::size_t phonemes);

struct StreamOptions {
  LatencyCostModel cost;
  const PromptPrefix* prompt = nullptr;
  // Per-block token cap; default_block_cap when unset.
  std::optional<int> cap;
};

// Thrown when a block hits its cap. Carries the trace up to that point.
class RunawayBlockError : public Error {
 public:
  RunawayBlockError(const std::string& detail, StreamTrace trace)
      : Error(ErrorKind::kRunawayBlock, detail), trace_(std::move(trace)) {}
  const StreamTrace& trace() const { return trace_; }

 private:
  StreamTrace trace_;
};

// Length-wise inference: for each block the text is forced, then the
// decoder runs until eob. Ends after the last word's eob.
StreamTrace stream_l(const StreamText& text, Decoder& decoder,
                     const StreamOptions& options = {});

// Feature-paired inference: output starts from the first phoneme.
StreamTrace stream_f(const StreamText& text, Decoder& decoder,
                     const StreamOptions& options = {});

StreamTrace stream(Variant variant, const StreamText& text, Decoder& decoder,
                   const StreamOptions& options = {});

// Consecutive chunks of `chunk_size`; the last may be short.
std::vector<std::vector<int>> chunk_emit(std::span<const int> tokens,
                                         int chunk_size);

double fpl_ms(int fpl_steps, const LatencyCostModel& cost);

enum class Ordering { kLess, kEqual, kGreater };

std::string_view to_string(Ordering o);

struct FplReport {
  Variant first_variant = Variant::kL;
  Variant second_variant = Variant::kF;
  double first_ms = 0.0;
  double second_ms = 0.0;
  // first compared with second.
  Ordering ordering = Ordering::kEqual;

  // True when an L/F pair puts F strictly first.
  bool feature_paired_faster() const;
};

// Throws TraceMismatch if the traces come from different utterances.
FplReport fpl_compare(const StreamTrace& first, const StreamTrace& second,
                      const LatencyCostModel& cost);

}  // namespace ctctts
