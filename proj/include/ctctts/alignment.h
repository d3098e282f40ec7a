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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctctts {

// Stand-in for log(0). Finite so that sums over unreachable trellis states
// never produce NaN.
inline constexpr double kLogZero = -1e30;

inline constexpr int kDefaultRatio = 3;

// Extended alphabet: phoneme symbols plus one blank, in posteriogram column
// order. Phoneme *labels* index phonemes() (blank excluded); *columns* index
// symbols() (blank included).
class Alphabet {
 public:
  Alphabet() = default;
  // `symbols` lists every column in order and must contain `blank` once.
  Alphabet(std::vector<std::string> symbols, std::string_view blank);

  // Blank appended after the phonemes.
  static Alphabet from_phonemes(std::vector<std::string> phonemes,
                                std::string blank = "∅");

  std::size_t size() const { return symbols_.size(); }
  std::size_t phoneme_count() const { return phonemes_.size(); }
  int blank_index() const { return blank_; }
  bool is_blank(int column) const { return column == blank_; }

  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::vector<std::string>& phonemes() const { return phonemes_; }
  const std::string& blank_symbol() const { return symbols_[blank_]; }

  int column_of(int label) const;
  int label_of(int column) const;

  std::optional<int> find_phoneme(std::string_view symbol) const;
  // Throws UnknownPhoneme.
  int phoneme_label(std::string_view symbol) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> symbols_;
  std::vector<std::string> phonemes_;
  int blank_ = 0;
};

// Frame-wise natural-log posteriors, T rows by |alphabet| columns. Every row
// is log-softmax normalized on construction.
class Posteriogram {
 public:
  // `values` is row-major, frames x alphabet.size(); rows may be logits.
  // NaN and +inf are rejected; -inf becomes kLogZero before normalizing.
  Posteriogram(Alphabet alphabet, std::vector<double> values,
               std::size_t frames);

  static Posteriogram from_probabilities(
      Alphabet alphabet, const std::vector<std::vector<double>>& rows);

  std::size_t frames() const { return frames_; }
  const Alphabet& alphabet() const { return alphabet_; }
  double log_prob(std::size_t frame, int column) const {
    return values_[frame * alphabet_.size() + static_cast<std::size_t>(column)];
  }
  std::span<const double> row(std::size_t frame) const {
    return {values_.data() + frame * alphabet_.size(), alphabet_.size()};
  }

 private:
  Alphabet alphabet_;
  std::vector<double> values_;
  std::size_t frames_ = 0;
};

// Target transcript as phoneme labels (no blanks).
using LabelSequence = std::vector<int>;

// Half-open interval with an owner label.
struct Span {
  int label = 0;
  int start = 0;
  int end = 0;

  int length() const { return end - start; }
  bool operator==(const Span&) const = default;
};

struct AlignmentPath {
  // Column index per frame.
  std::vector<int> path;
  // Target occurrence per frame from the trellis state; -1 on blank frames.
  std::vector<int> occurrence;
  double score = 0.0;

  // Occurrences reconstructed by walking the collapse rule over `path`.
  static AlignmentPath from_columns(std::vector<int> path,
                                    const Alphabet& alphabet);
};

struct RefinedAlignment {
  std::vector<int> frame_labels;
  // One per target occurrence, in order; partitions [0, T).
  std::vector<Span> phoneme_spans;

  std::size_t frames() const { return frame_labels.size(); }
  bool operator==(const RefinedAlignment&) const = default;
};

struct TokenMap {
  int ratio = kDefaultRatio;
  // One per target occurrence; partitions [0, ratio * T).
  std::vector<Span> phoneme_token_spans;

  bool operator==(const TokenMap&) const = default;
};

// Merge adjacent repeats, then drop blanks.
LabelSequence collapse(std::span<const int> path, const Alphabet& alphabet);

// Minimum frames needed to emit `target`: one per label plus a separating
// blank for each adjacent equal pair.
std::size_t min_frames(std::span<const int> target);

// Constrained Viterbi over the blank-interleaved trellis. Ties prefer stay,
// then advance-one, then skip-blank; at the final frame the last label state
// wins ties against the trailing blank.
AlignmentPath forced_align(const Posteriogram& post,
                           std::span<const int> target);

// Every blank joins the next phoneme occurrence; trailing blanks join the
// last one.
RefinedAlignment refine(const AlignmentPath& path, const Alphabet& alphabet);

TokenMap map_tokens(const RefinedAlignment& refined, int ratio,
                    std::size_t token_count);

struct UtteranceAlignment {
  AlignmentPath path;
  RefinedAlignment refined;
  TokenMap tokens;
};

UtteranceAlignment align_utterance(const Posteriogram& post,
                                   std::span<const int> target, int ratio,
                                   std::size_t token_count);

}  // namespace ctctts
