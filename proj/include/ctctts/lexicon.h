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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctctts/alignment.h"

namespace ctctts {

enum class Separator { kSpace, kComma, kPeriod, kQuestion, kExclamation };

std::string_view separator_symbol(Separator sep);
std::optional<Separator> separator_from_symbol(std::string_view symbol);

// word -> pronunciation. Stands in for a G2P front end.
class Lexicon {
 public:
  // Throws DuplicateEntry, or InvalidConfig for an empty pronunciation.
  void add(std::string word, std::vector<std::string> phonemes);

  const std::vector<std::string>* find(std::string_view word) const;
  // Throws UnknownWord.
  const std::vector<std::string>& at(std::string_view word) const;

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::vector<std::string>, std::less<>>&
  entries() const {
    return entries_;
  }

  // Tab-separated, one entry per line, sorted by word.
  std::string to_text() const;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

// Parses "word<TAB>ph1 ph2 ..." lines. Blank lines and lines starting with
// '#' are skipped. With an alphabet, every phoneme must belong to it.
Lexicon load_lexicon(std::string_view text, const Alphabet* alphabet = nullptr);

struct TextSplit {
  std::vector<std::string> words;
  std::vector<Separator> separators;
};

// Splits on whitespace and the separator punctuation. Each word takes the
// first punctuation mark that follows it, else a space; the final word
// defaults to a space as well.
TextSplit split_text(std::string_view text);

// Inverse of split_text for canonical spacing: "hi there."
std::string join_text(const std::vector<std::string>& words,
                      const std::vector<Separator>& separators);

struct Utterance {
  std::string text;
  std::vector<std::string> words;
  std::vector<std::vector<std::string>> word_phonemes;
  // One per word: the separator that follows it.
  std::vector<Separator> separators;
  std::vector<int> speech_tokens;
  int ratio = kDefaultRatio;

  // Flattened word_phonemes.
  std::vector<std::string> target() const;
  LabelSequence target_labels(const Alphabet& alphabet) const;
  std::size_t phoneme_count() const;

  // Throws EmptyUtterance, InvalidConfig on shape violations.
  void validate() const;

  bool operator==(const Utterance&) const = default;
};

// Words and separators from `text`, pronunciations from `lexicon`.
// Throws UnknownWord.
Utterance make_utterance(std::string_view text, const Lexicon& lexicon,
                         std::vector<int> speech_tokens = {},
                         int ratio = kDefaultRatio);

struct Range {
  int begin = 0;
  int end = 0;

  int length() const { return end - begin; }
  bool operator==(const Range&) const = default;
};

struct WordSpan {
  int word_index = 0;
  Range phonemes;  // into the flattened target
  Range tokens;    // into speech_tokens
  bool operator==(const WordSpan&) const = default;
};

// Throws LexiconAlignmentMismatch when the alignment does not cover the
// utterance's phonemes one-to-one.
std::vector<WordSpan> word_spans(const Utterance& utt, const TokenMap& tmap);

struct SynthConfig {
  int word_count = 2;
  std::vector<std::string> phoneme_inventory = {
      "a", "e", "i", "o", "u", "p", "t", "k", "s", "m", "n", "l",
      "r", "b", "d", "g", "f", "v", "z", "h", "w", "j", "x", "c"};
  int ratio = kDefaultRatio;
  double peak_prob = 0.95;
  int max_word_phonemes = 4;
  int max_phoneme_frames = 3;
  int speech_vocab = 4096;
};

struct SynthUtterance {
  Utterance utterance;
  Posteriogram posteriogram;
  Lexicon lexicon;
  // Frame labeling the posteriogram was peaked on, blanks included.
  std::vector<int> planted_path;
  // refine() of planted_path: what a correct aligner must recover.
  std::vector<int> planted_labels;
};

// Deterministic in (seed, config). The path opens with 0-2 blank frames and
// puts 0-2 more before every later word; adjacent equal phonemes are always
// separated by at least one blank so the planted path is feasible. There are
// no trailing blanks, which keeps every word (blanks folded in) within
// default_block_cap when max_phoneme_frames <= 3.
SynthUtterance synth_utterance(std::uint64_t seed, const SynthConfig& config);

}  // namespace ctctts
