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

#include "ctctts/interleave.h"

#include <deque>

#include "ctctts/error.h"

namespace ctctts {

namespace {

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(ErrorKind::kParseError, what);
}

std::string where(std::size_t pos) { return " at position " + std::to_string(pos); }

// One entry of the F text channel: a text symbol or pad, tagged with the
// block whose steps hold it.
struct Slot {
  Token token;
  int host = 0;
};

}  // namespace

std::string_view to_string(TokenClass cls) {
  switch (cls) {
    case TokenClass::kPhoneme: return "phoneme";
    case TokenClass::kSeparator: return "sep";
    case TokenClass::kSpeech: return "speech";
    case TokenClass::kEob: return "eob";
    case TokenClass::kEos: return "eos";
    case TokenClass::kPad: return "pad";
    case TokenClass::kZero: return "zero";
  }
  return "pad";
}

std::string Token::key() const {
  switch (cls) {
    case TokenClass::kPhoneme: return "p:" + symbol;
    case TokenClass::kSeparator: return "s:" + symbol;
    case TokenClass::kSpeech: return "t:" + std::to_string(id);
    default: return "<" + std::string(to_string(cls)) + ">";
  }
}

std::vector<Token> Block::text() const {
  std::vector<Token> out;
  out.reserve(cur_phonemes.size() + next_phonemes.size() + 2);
  for (const auto& ph : cur_phonemes) out.push_back(Token::phoneme(ph));
  out.push_back(Token::separator(separator));
  if (has_eos()) {
    out.push_back(Token::eos());
  } else {
    for (const auto& ph : next_phonemes) out.push_back(Token::phoneme(ph));
  }
  return out;
}

std::vector<Block> build_blocks(const Utterance& utt,
                                const std::vector<WordSpan>& spans) {
  if (utt.words.empty()) throw Error(ErrorKind::kEmptyUtterance, "no words");
  utt.validate();
  if (spans.size() != utt.words.size()) {
    throw Error(ErrorKind::kLexiconAlignmentMismatch,
                std::to_string(spans.size()) + " word spans for " +
                    std::to_string(utt.words.size()) + " words");
  }
  int expected = 0;
  for (const auto& span : spans) {
    if (span.tokens.begin != expected || span.tokens.end < span.tokens.begin) {
      throw Error(ErrorKind::kLexiconAlignmentMismatch,
                  "word token ranges are not contiguous");
    }
    expected = span.tokens.end;
  }
  if (static_cast<std::size_t>(expected) != utt.speech_tokens.size()) {
    throw Error(ErrorKind::kLexiconAlignmentMismatch,
                "word token ranges do not cover the speech tokens");
  }

  std::vector<Block> blocks;
  blocks.reserve(utt.words.size());
  for (std::size_t k = 0; k < utt.words.size(); ++k) {
    Block b;
    b.index = static_cast<int>(k);
    b.cur_phonemes = utt.word_phonemes[k];
    b.separator = utt.separators[k];
    if (k + 1 < utt.words.size()) b.next_phonemes = utt.word_phonemes[k + 1];
    b.speech_tokens.assign(utt.speech_tokens.begin() + spans[k].tokens.begin,
                           utt.speech_tokens.begin() + spans[k].tokens.end);
    blocks.push_back(std::move(b));
  }
  return blocks;
}

InterleavedSequenceL render_l(const std::vector<Block>& blocks) {
  if (blocks.empty()) throw Error(ErrorKind::kEmptyUtterance, "no blocks to render");
  InterleavedSequenceL seq;
  for (const auto& b : blocks) {
    for (auto& tok : b.text()) {
      seq.mask_positions.push_back(static_cast<int>(seq.tokens.size()));
      seq.tokens.push_back(std::move(tok));
    }
    for (int id : b.speech_tokens) seq.tokens.push_back(Token::speech(id));
    seq.tokens.push_back(Token::eob());
  }
  return seq;
}

std::vector<int> loss_mask(const InterleavedSequenceL& seq) {
  std::vector<int> out;
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    if (seq.tokens[i].is_text()) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<Block> parse_l(const std::vector<Token>& tokens) {
  if (tokens.empty()) parse_error("empty sequence");
  std::vector<Block> blocks;
  std::size_t i = 0;
  const std::size_t n = tokens.size();
  auto is = [&](TokenClass cls) { return i < n && tokens[i].cls == cls; };

  while (i < n) {
    Block b;
    b.index = static_cast<int>(blocks.size());
    while (is(TokenClass::kPhoneme)) b.cur_phonemes.push_back(tokens[i++].symbol);
    if (b.cur_phonemes.empty()) parse_error("block must open with phonemes" + where(i));
    if (!is(TokenClass::kSeparator)) parse_error("expected separator" + where(i));
    auto sep = separator_from_symbol(tokens[i].symbol);
    if (!sep) parse_error("unknown separator '" + tokens[i].symbol + "'" + where(i));
    b.separator = *sep;
    ++i;
    if (is(TokenClass::kEos)) {
      ++i;
    } else {
      while (is(TokenClass::kPhoneme)) b.next_phonemes.push_back(tokens[i++].symbol);
      if (b.next_phonemes.empty()) parse_error("expected next-word phonemes or eos" + where(i));
    }
    while (is(TokenClass::kSpeech)) b.speech_tokens.push_back(tokens[i++].id);
    if (i >= n) parse_error("dangling block " + std::to_string(b.index) + ": missing eob");
    if (!is(TokenClass::kEob)) {
      parse_error("unexpected " + std::string(to_string(tokens[i].cls)) +
                  " inside block" + where(i));
    }
    ++i;
    blocks.push_back(std::move(b));
  }
  return blocks;
}

PairedSequenceF render_f(const std::vector<Block>& blocks) {
  if (blocks.empty()) throw Error(ErrorKind::kEmptyUtterance, "no blocks to render");
  PairedSequenceF seq;
  struct Pending {
    Token token;
    int origin;
  };
  std::deque<Pending> pending;
  auto next_text = [&](int host) {
    if (pending.empty()) return Token::pad();
    Pending p = std::move(pending.front());
    pending.pop_front();
    if (p.origin != host) ++seq.carried_symbols;
    return p.token;
  };

  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Block& b = blocks[k];
    const int host = static_cast<int>(k);
    for (auto& tok : b.text()) pending.push_back({std::move(tok), host});

    Token prev;
    const std::size_t n = b.speech_tokens.size();
    for (std::size_t j = 0; j <= n; ++j) {
      PairedStep step;
      if (j == 0 && k == 0) {
        step.speech_in = Token::zero();
        step.text_in = next_text(host);
      } else if (j == 0) {
        step.speech_in = Token::eob();
        step.text_in = Token::zero();
      } else {
        step.speech_in = prev;
        step.text_in = next_text(host);
      }
      step.target = j < n ? Token::speech(b.speech_tokens[j]) : Token::eob();
      prev = step.target;
      seq.steps.push_back(std::move(step));
    }
    seq.block_boundaries.push_back(static_cast<int>(seq.steps.size()) - 1);

    if (!pending.empty()) {
      if (k + 1 == blocks.size()) {
        throw Error(ErrorKind::kTextOverflow,
                    std::to_string(pending.size()) +
                        " text symbols left after the final block");
      }
      seq.warnings.push_back("block " + std::to_string(k) + ": " +
                             std::to_string(pending.size()) +
                             " text symbols carried into block " +
                             std::to_string(k + 1));
    }
  }
  return seq;
}

std::vector<Block> parse_f(const std::vector<PairedStep>& steps) {
  if (steps.empty()) parse_error("empty step list");

  std::vector<Block> blocks;
  std::vector<Slot> slots;
  Block cur;
  bool opening = true;
  const Token* prev_target = nullptr;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const PairedStep& s = steps[i];
    const int host = static_cast<int>(blocks.size());
    if (!s.target.is_target()) {
      parse_error("target must be speech or eob" + where(i));
    }
    if (opening && host == 0) {
      if (s.speech_in.cls != TokenClass::kZero || s.text_in.cls != TokenClass::kPhoneme) {
        parse_error("sequence must open with (zero, phoneme)" + where(i));
      }
    } else if (opening) {
      if (s.speech_in.cls != TokenClass::kEob || s.text_in.cls != TokenClass::kZero) {
        parse_error("block must open with (eob, zero)" + where(i));
      }
    } else {
      if (s.speech_in != *prev_target || s.speech_in.cls != TokenClass::kSpeech) {
        parse_error("speech channel does not echo the previous target" + where(i));
      }
      if (!s.text_in.is_text() && s.text_in.cls != TokenClass::kPad) {
        parse_error("text channel holds " + std::string(to_string(s.text_in.cls)) + where(i));
      }
    }
    if (s.text_in.cls != TokenClass::kZero) slots.push_back({s.text_in, host});

    opening = false;
    prev_target = &s.target;
    if (s.target.cls == TokenClass::kEob) {
      cur.index = host;
      blocks.push_back(std::move(cur));
      cur = Block{};
      opening = true;
    } else {
      cur.speech_tokens.push_back(s.target.id);
    }
  }
  if (!opening) parse_error("dangling block " + std::to_string(blocks.size()) + ": missing eob");

  // Recover each block's text from the concatenated text channel.
  std::size_t i = 0;
  auto at = [&](TokenClass cls) { return i < slots.size() && slots[i].token.cls == cls; };
  const std::size_t count = blocks.size();
  for (std::size_t k = 0; k < count; ++k) {
    Block& b = blocks[k];
    while (at(TokenClass::kPad)) ++i;
    while (at(TokenClass::kPhoneme)) b.cur_phonemes.push_back(slots[i++].token.symbol);
    if (b.cur_phonemes.empty()) parse_error("block " + std::to_string(k) + " has no phonemes");
    if (!at(TokenClass::kSeparator)) parse_error("block " + std::to_string(k) + " lacks a separator");
    b.separator = *separator_from_symbol(slots[i++].token.symbol);
    if (at(TokenClass::kEos)) {
      ++i;
      continue;
    }
    const std::size_t run_begin = i;
    while (at(TokenClass::kPhoneme)) ++i;
    const std::size_t run_end = i;
    if (run_end == run_begin) parse_error("block " + std::to_string(k) + " lacks next-word text");
    std::size_t split = run_end;
    if (at(TokenClass::kSeparator)) {
      // The run holds this block's next word followed by the next block's
      // current word.
      if (k + 1 == count) parse_error("text continues past the final block");
      const std::size_t len = run_end - run_begin;
      bool halves = len % 2 == 0;
      for (std::size_t j = 0; halves && j < len / 2; ++j) {
        halves = slots[run_begin + j].token == slots[run_begin + len / 2 + j].token;
      }
      if (halves) {
        split = run_begin + len / 2;
      } else {
        split = run_begin;
        while (split < run_end && slots[split].host <= static_cast<int>(k)) ++split;
        if (split == run_begin || split == run_end) {
          parse_error("cannot split the text between blocks " + std::to_string(k) +
                      " and " + std::to_string(k + 1));
        }
      }
    } else if (i < slots.size() && !at(TokenClass::kPad)) {
      parse_error("unexpected " + std::string(to_string(slots[i].token.cls)) +
                  " after block " + std::to_string(k) + " text");
    }
    for (std::size_t j = run_begin; j < split; ++j) b.next_phonemes.push_back(slots[j].token.symbol);
    i = split;
  }
  for (; i < slots.size(); ++i) {
    if (slots[i].token.cls != TokenClass::kPad) parse_error("text left over after the final block");
  }
  return blocks;
}

}  // namespace ctctts
