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

#include <string>
#include <vector>

#include "ctctts/lexicon.h"

namespace ctctts {

enum class TokenClass { kPhoneme, kSeparator, kSpeech, kEob, kEos, kPad, kZero };

std::string_view to_string(TokenClass cls);

// Typed token. Classes are explicit so no vocabulary layout is assumed:
// `symbol` carries phoneme and separator text, `id` carries speech ids.
struct Token {
  TokenClass cls = TokenClass::kPad;
  std::string symbol;
  int id = 0;

  static Token phoneme(std::string symbol) { return {TokenClass::kPhoneme, std::move(symbol), 0}; }
  static Token separator(Separator sep) {
    return {TokenClass::kSeparator, std::string(separator_symbol(sep)), 0};
  }
  static Token speech(int id) { return {TokenClass::kSpeech, {}, id}; }
  static Token eob() { return {TokenClass::kEob, {}, 0}; }
  static Token eos() { return {TokenClass::kEos, {}, 0}; }
  static Token pad() { return {TokenClass::kPad, {}, 0}; }
  static Token zero() { return {TokenClass::kZero, {}, 0}; }

  // Text positions are excluded from the training loss.
  bool is_text() const {
    return cls == TokenClass::kPhoneme || cls == TokenClass::kSeparator ||
           cls == TokenClass::kEos;
  }
  bool is_target() const { return cls == TokenClass::kSpeech || cls == TokenClass::kEob; }

  // Compact unambiguous form: "p:a", "s:,", "t:17", "<eob>", ...
  std::string key() const;

  bool operator==(const Token&) const = default;
  auto operator<=>(const Token&) const = default;
};

// Bi-word block k: current word, its separator, the next word (or eos for
// the last word), then the current word's speech tokens.
struct Block {
  int index = 0;
  std::vector<std::string> cur_phonemes;
  Separator separator = Separator::kSpace;
  std::vector<std::string> next_phonemes;  // empty means eos
  std::vector<int> speech_tokens;

  bool has_eos() const { return next_phonemes.empty(); }
  // cur_phonemes, separator, next_phonemes or eos.
  std::vector<Token> text() const;

  bool operator==(const Block&) const = default;
};

std::vector<Block> build_blocks(const Utterance& utt,
                                const std::vector<WordSpan>& spans);

// Length-wise layout: per block, text then speech then eob.
struct InterleavedSequenceL {
  std::vector<Token> tokens;
  std::vector<int> mask_positions;
};

InterleavedSequenceL render_l(const std::vector<Block>& blocks);

// Positions of every text-class token (phonemes, separators, eos).
std::vector<int> loss_mask(const InterleavedSequenceL& seq);

std::vector<Block> parse_l(const std::vector<Token>& tokens);

// One feature-paired step: both input channels and the prediction target.
struct PairedStep {
  Token speech_in;
  Token text_in;
  Token target;
  bool operator==(const PairedStep&) const = default;
};

struct PairedSequenceF {
  std::vector<PairedStep> steps;
  // Step indices whose target is eob.
  std::vector<int> block_boundaries;
  // Text that did not fit its own block and moved into later slots.
  int carried_symbols = 0;
  std::vector<std::string> warnings;
};

// Feature-paired layout. The first block opens with (zero, first phoneme);
// every later block opens with (eob, zero). Each other step pairs the
// previous target with the next pending text symbol, or pad once the text is
// exhausted. Text that outlives its block carries into the next block's
// slots with a warning; throws TextOverflow if it outlives the last block.
PairedSequenceF render_f(const std::vector<Block>& blocks);

// Inverse of render_f. Where carried text leaves the phonemes of the next
// word adjacent to those of the word after it, the split relies on the
// next-word redundancy between consecutive blocks.
std::vector<Block> parse_f(const std::vector<PairedStep>& steps);

}  // namespace ctctts
